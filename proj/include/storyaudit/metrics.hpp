#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "storyaudit/demography.hpp"
#include "storyaudit/instances.hpp"
#include "storyaudit/stats.hpp"
#include "storyaudit/types.hpp"

namespace storyaudit::metrics {

// One extracted character flattened out of an instance; the unit every
// metric counts over.
struct CharacterObservation {
  std::string model_id;
  Domain domain = Domain::Learning;
  std::optional<LoveSubtype> love_subtype;
  PowerCondition condition = PowerCondition::Neutral;
  PowerRole role = PowerRole::Baseline;
  std::optional<std::string> name;  // normalized first name
  GenderCategory gender = GenderCategory::Unspecified;
  bool ambiguous_instance = false;
};

// Flattens subject/object slots into observations; `include_ambiguous`
// mirrors the analyze flag. Love-neutral prompts contribute both symmetric
// characters as baseline.
std::vector<CharacterObservation> corpus_characters(const std::vector<StoryInstance>& instances,
                                                    bool include_ambiguous = false);

struct RatioEstimate {
  double value = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double p_value = 1.0;
  std::int64_t numerator_n = 0;    // effective supports behind the interval
  std::int64_t denominator_n = 0;
};

struct RaceProportions {
  std::map<RaceCategory, double> proportion;
  std::int64_t matched = 0;      // names found in the table (the effective n)
  std::int64_t named = 0;        // named characters considered
  double coverage() const { return named == 0 ? 1.0 : static_cast<double>(matched) / named; }
  bool defined() const { return matched > 0; }
};

// Fractional race proportions: mean likelihood over matched names,
// weighted by occurrence count. Unmatched names are excluded and reported
// through the coverage fields.
RaceProportions race_proportion(const std::vector<std::pair<std::string, double>>& names,
                                const demography::LikelihoodTable& table);

// Representation ratio p / p*: Wilson interval on p (the baseline is a
// constant) scaled by 1/p*, two-tailed p-value against ratio 1. `n` is the
// effective support; fractional race mass is rounded to integer successes,
// recorded in numerator_n.
RatioEstimate representation_ratio(double p, double p_star, std::int64_t n);

// Demographic mass and pool mass per power role. Counts are nonnegative
// reals; fractional values only arise from likelihood weighting.
struct RoleCounts {
  double baseline = 0.0;
  double dominant = 0.0;
  double subordinate = 0.0;
  double baseline_total = 0.0;
  double dominant_total = 0.0;
  double subordinate_total = 0.0;
};

enum class Smoothing { Off, On };

// Subordination ratio using within-role-pool proportions, so equal
// pool sizes reduce to count ratios. With smoothing on, a zero count in
// either role adds one to both role counts (and pools) before forming
// proportions. Throws DataError when both role pools are empty or a zero
// count survives with smoothing off.
RatioEstimate subordination_ratio(const RoleCounts& counts, Smoothing smoothing);

struct MedianSubordination {
  RatioEstimate estimate;
  int thresholds_used = 0;  // thresholds (of 100) that yielded a defined ratio
};

// Median racialized subordination ratio: condition on gender, sweep
// integer percent thresholds keeping names with likelihood > t/100, compute
// the smoothed subordination ratio per threshold and take the median of the
// defined ones (mean of the middle two when even). Returns nullopt when no
// threshold yields a defined ratio.
std::optional<MedianSubordination> median_racialized_subordination(
    const std::vector<CharacterObservation>& characters, const demography::Tables& tables,
    RaceCategory race, GenderCategory gender, int threshold_low = 1, int threshold_high = 100);

struct KeywordCounts {
  std::int64_t neutral = 0;
  std::int64_t laden = 0;
  std::int64_t total() const { return neutral + laden; }
};

// Case-insensitive whole-word counts of stories containing each term, split
// by the power condition of the story's prompt.
std::map<std::string, KeywordCounts> keyword_probe(const std::vector<StoryInstance>& instances,
                                                   const std::vector<std::string>& terms);

// The non-exhaustive identity-cue search list used for the default probe.
std::vector<std::string> default_probe_terms();

struct TopNameRow {
  std::string name;
  double likelihood = 0.0;
  std::int64_t baseline = 0;
  std::int64_t dominant = 0;
  std::int64_t subordinate = 0;
  std::int64_t total() const { return baseline + dominant + subordinate; }
};

// Names above the racial-likelihood threshold ranked by total occurrences,
// with counts split by power role.
std::vector<TopNameRow> top_names(const std::vector<CharacterObservation>& characters,
                                  const demography::Tables& tables, RaceCategory race,
                                  double threshold = 0.60, std::size_t k = 25);

}  // namespace storyaudit::metrics
