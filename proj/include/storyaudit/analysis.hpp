#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "storyaudit/demography.hpp"
#include "storyaudit/metrics.hpp"

namespace storyaudit::analysis {

struct RunConfig {
  std::string baseline_source = "census2022";  // or a custom baseline file path
  bool smoothing = true;
  int threshold_low = 1;
  int threshold_high = 100;
  bool include_ambiguous = false;
  double top_name_threshold = 0.60;
  std::size_t top_name_k = 25;
  std::vector<std::string> probe_terms;  // empty -> default search list
  int parallelism = 1;
  std::uint64_t seed = 0;
};

// Hash over the analysis-affecting settings only; collection knobs such as
// parallelism do not change outputs and stay out of the hash.
std::string config_hash(const RunConfig& config);

struct RepresentationRow {
  std::string model;
  Domain domain = Domain::Learning;
  std::string kind;  // "race" | "gender" | "pair"
  std::string demographic;
  double proportion = 0.0;
  double baseline = 0.0;
  metrics::RatioEstimate estimate;
  std::int64_t n = 0;
};

// Median representation ratio across models per (domain, demographic).
struct MedianRepresentationRow {
  Domain domain = Domain::Learning;
  std::string kind;
  std::string demographic;
  double median_ratio = 0.0;
  int models = 0;
};

struct GenderSubordinationRow {
  std::string model;
  Domain domain = Domain::Learning;
  GenderCategory gender = GenderCategory::Feminized;
  metrics::RatioEstimate estimate;
};

struct MedianSubordinationRow {
  std::string model;
  Domain domain = Domain::Learning;
  RaceCategory race = RaceCategory::White;
  GenderCategory gender = GenderCategory::Feminized;
  metrics::RatioEstimate estimate;
  int thresholds_used = 0;
};

struct NameSubordinationRow {
  Domain domain = Domain::Learning;
  std::string name;
  std::int64_t baseline = 0;
  std::int64_t dominant = 0;
  std::int64_t subordinate = 0;
  std::optional<metrics::RatioEstimate> estimate;  // absent when undefined
};

struct TopNameTableRow {
  RaceCategory race = RaceCategory::White;
  metrics::TopNameRow row;
};

struct KeywordRow {
  std::string term;
  metrics::KeywordCounts counts;
};

struct AnalysisResult {
  RunConfig config;
  std::string hash;
  std::vector<RepresentationRow> representation;
  std::vector<MedianRepresentationRow> representation_median;
  std::vector<GenderSubordinationRow> gender_subordination;
  std::vector<MedianSubordinationRow> median_subordination;
  std::vector<NameSubordinationRow> name_subordination;
  std::vector<TopNameTableRow> top_names;
  std::vector<KeywordRow> keywords;
  demography::CoverageCounter coverage;
  std::int64_t instances = 0;
  std::int64_t excluded_ambiguous = 0;
};

// Role-count assembly feeding the subordination ratio. Pools are matched
// named characters for
// races, determinate-gender characters for genders, named characters for
// name-level counts.
metrics::RoleCounts race_role_counts(const std::vector<metrics::CharacterObservation>& characters,
                                     const demography::Tables& tables, RaceCategory race);
metrics::RoleCounts gender_role_counts(const std::vector<metrics::CharacterObservation>& characters,
                                       GenderCategory gender);
metrics::RoleCounts name_role_counts(const std::vector<metrics::CharacterObservation>& characters,
                                     const std::string& normalized_name);

AnalysisResult analyze(const std::vector<StoryInstance>& instances,
                       const demography::Tables& tables, const RunConfig& config);

// Delimited report files with a metadata header; byte-identical across
// re-runs on identical inputs. Ratios print with one decimal at >= 10 and
// two below; p-values with three significant figures.
void emit_reports(const AnalysisResult& result, const std::string& out_dir);

std::string format_ratio(double value);
std::string format_p(double p);

}  // namespace storyaudit::analysis
