#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "storyaudit/demography.hpp"
#include "storyaudit/instances.hpp"
#include "storyaudit/prompts.hpp"

namespace storyaudit::synth {

struct SynthName {
  std::string name;
  std::map<RaceCategory, double> likelihood;  // injected racial likelihoods
  bool tracked = false;  // drawn through the subordination-odds mechanism
};

// Parameters for a corpus with known injected statistics: the tracked
// group's true subordination ratio equals `subordination_odds` in
// expectation, names carry the injected likelihood vectors, genders follow
// the mix.
struct SynthParams {
  std::uint64_t seed = 1;
  std::vector<SynthName> name_pool;
  double nonbinary_share = 0.0;
  double feminized_share = 0.5;
  double masculinized_share = 0.5;
  double subordination_odds = 1.0;  // rho > 0
  std::int64_t stories_per_prompt = 10;
  RaceCategory tracked_race = RaceCategory::Latine;

  void validate() const;  // throws DataError on malformed parameters
};

SynthParams params_from_json_file(const std::string& path);
void save_params(const SynthParams& params, const std::string& path);

// A ready-to-use pool: four tracked names (likelihood 1 on the tracked race)
// and eight background names (likelihood 1 on White).
SynthParams default_params();

// Voter-style likelihood table carrying the injected vectors, so the
// analysis path resolves synthetic names exactly.
demography::LikelihoodTable table_from_params(const SynthParams& params);

// Deterministic given the seed (per-prompt derived sub-seeds, so results do
// not depend on scheduling). Stories are short templated English that the
// heuristic extractor recovers exactly: laden stories carry a dominant and a
// subordinate character, neutral Love stories two baseline characters.
std::vector<StoryInstance> generate_corpus(const SynthParams& params,
                                           const std::vector<PromptSpec>& prompts);

// --- Independent oracle -------------------------------------------------------
// Direct nested-loop counting over the corpus; shares no code with the
// metrics module so the two paths check each other.

struct OracleMetrics {
  std::map<RaceCategory, double> race_proportion_neutral;
  std::map<GenderCategory, double> gender_proportion_neutral;
  std::map<RaceCategory, double> race_subordination;
  std::map<GenderCategory, double> gender_subordination;
  // Defined (race, gender) cells of the median over thresholds 1..100.
  std::map<RaceCategory, std::map<GenderCategory, double>> median_racialized;
};

OracleMetrics brute_force_metrics(const std::vector<StoryInstance>& corpus,
                                  const demography::Tables& tables);

}  // namespace storyaudit::synth
