#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "storyaudit/demography.hpp"
#include "storyaudit/instances.hpp"
#include "storyaudit/types.hpp"

namespace storyaudit::extraction {

struct ExtractedCharacter {
  PowerRole role = PowerRole::Baseline;
  std::optional<std::string> name;  // "Unspecified" normalized to absent
  std::vector<std::string> references;  // verbatim tokens from the story

  std::vector<std::string> normalized_references() const;
};

// Shared with demography so table joins and extraction agree on name form.
inline std::optional<std::string> first_name(std::string_view full) {
  return demography::first_name(full);
}

// Character descriptors the labeling template expects, in role order
// (dominant first under Laden).
std::vector<std::string> expected_characters(const StoryInstance& instance);
std::vector<PowerRole> expected_roles(const StoryInstance& instance);

// Fills the labeling template for the instance's domain and power condition:
// one name/reference pair per character, story appended in single quotes.
// Throws DataError when a two-character template lacks an object descriptor.
std::string build_label_prompt(const StoryInstance& instance);

struct ParseOutcome {
  std::vector<ExtractedCharacter> characters;  // one per expected role
  bool ambiguous = false;  // a reference was claimed by both characters
};

// Parses a labeler reply and removes hallucinations: names and references
// that do not occur in the story (token-boundary, case/punctuation
// insensitive) are dropped. Throws DataError on an unparseable reply; the
// caller flags the instance for re-labeling rather than fabricating output.
ParseOutcome parse_label_response(const std::string& raw, const StoryInstance& instance);

// Candidate string passes the in-story occurrence check.
bool occurs(const std::string& candidate, const std::string& story);

// Offline fallback: capitalized tokens outside the stop list become name
// candidates, gendered tokens attach to the nearest preceding name mention,
// roles follow first-mention order (dominant first for laden prompts).
std::vector<ExtractedCharacter> heuristic_extract(const StoryInstance& instance);

struct EvalReport {
  double gender_precision = 0.0;
  double gender_recall = 0.0;
  double name_precision = 0.0;
  double name_recall = 0.0;
  double ci_halfwidth = 0.0;  // widest 95% Wilson half-width over the four
  std::int64_t instances = 0;
};

using LabelSet = std::map<std::string, std::vector<ExtractedCharacter>>;

// Precision = correct emitted / emitted, recall = correct emitted / gold
// present. Gender correctness is judged on the mapped category, not the raw
// token list. Throws DataError when the two sets cover different keys.
EvalReport evaluate_extraction(const LabelSet& predicted, const LabelSet& gold);

// Key for aligning predicted and gold instance files: model, query and
// response plus an ordinal among identical triples, so file order is
// irrelevant.
std::string instance_key(const StoryInstance& instance, int duplicate_ordinal);
LabelSet label_set_from_instances(const std::vector<StoryInstance>& instances);

// --- Labeling pipeline --------------------------------------------------------

// Anything that maps a labeling query to the labeler's reply.
class LabelClient {
 public:
  virtual ~LabelClient() = default;
  virtual std::optional<std::string> label(const std::string& label_query) = 0;
};

// Replays recorded (label_query, label_response) pairs, matched on the exact
// query text, in file order per query.
class ReplayLabeler : public LabelClient {
 public:
  explicit ReplayLabeler(const std::string& path);
  std::optional<std::string> label(const std::string& label_query) override;

 private:
  std::map<std::string, std::vector<std::string>> responses_;
  std::map<std::string, std::size_t> cursor_;
};

void write_labeler_replay(const std::vector<std::pair<std::string, std::string>>& records,
                          const std::string& path);

struct ExtractReport {
  std::int64_t processed = 0;
  std::int64_t labeled = 0;
  std::int64_t parse_errors = 0;  // flagged for re-label, left unfilled
  std::int64_t ambiguous = 0;
};

// Labels every instance in `in_path` and writes the filled records to
// `out_path`. With a null client the offline heuristic extractor runs
// instead of a labeler.
ExtractReport run_extraction(const std::string& in_path, const std::string& out_path,
                             LabelClient* labeler);

void apply_characters(StoryInstance& instance, const std::vector<ExtractedCharacter>& characters,
                      bool ambiguous);

}  // namespace storyaudit::extraction
