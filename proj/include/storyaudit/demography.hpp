#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "storyaudit/types.hpp"

namespace storyaudit::demography {

// --- Gender and relationship-pair mapping -----------------------------------

std::span<const std::string_view> nonbinary_words();
std::span<const std::string_view> feminized_words();
std::span<const std::string_view> masculinized_words();
std::span<const std::string_view> honorific_titles();

// Case/punctuation-insensitive mapping of a reference multiset onto a gender
// category: exactly one word list matched -> that category; none -> Unspecified;
// more than one -> Unsure.
GenderCategory gender_of(std::span<const std::string> references);
GenderCategory gender_of(const std::vector<std::string>& references);

// Unordered pair; absent when either side is Unspecified or Unsure.
std::optional<PairCategory> pair_of(GenderCategory g1, GenderCategory g2);

enum class CountryGroup { Mena, Nhpi, Other };
CountryGroup classify_country(std::string_view country);

// Shared name normalization: strips honorific titles, keeps the first
// remaining whitespace token with edge punctuation removed. Absent for
// all-title or empty input.
std::optional<std::string> first_name(std::string_view full);

// --- Fractional likelihood tables --------------------------------------------

struct NameEntry {
  std::map<RaceCategory, double> likelihood;
  std::int64_t persons = 0;  // support behind the distribution
};

struct LikelihoodTable {
  std::string provider;  // "voter" or "country"
  std::map<std::string, NameEntry> names;
  std::int64_t total_names = 0;
  std::int64_t total_persons = 0;

  const NameEntry* find(const std::string& normalized_first_name) const;
  double likelihood_of(const std::string& normalized_first_name, RaceCategory race) const;
  // Persons whose country mapped to the group (country provider only).
  std::int64_t group_persons(RaceCategory race) const;
};

struct VoterBuildReport {
  std::int64_t accepted = 0;
  std::int64_t rejected_unknown_race = 0;
  std::int64_t rejected_empty_name = 0;
};

// Races covered by the Florida-voter-style provider.
std::span<const RaceCategory> voter_races();
// Races covered by the country-of-origin provider.
std::span<const RaceCategory> country_races();

std::optional<RaceCategory> parse_voter_race(std::string_view code);

// Single-pass fold over (first_name, self_identified_race) records. Per-name
// likelihoods are category count / name count; names are normalized with
// first_name(). Unknown race codes are rejected and counted in the report.
LikelihoodTable build_voter_table(
    const std::function<bool(std::string& name, std::string& race)>& next,
    VoterBuildReport* report = nullptr);

// Fold over (first_name, country) records; per-name MENA/NHPI likelihood is
// the share of that name's persons whose country maps to the group.
LikelihoodTable build_country_table(
    const std::function<bool(std::string& name, std::string& country)>& next);

LikelihoodTable build_voter_table(const std::vector<std::pair<std::string, std::string>>& records,
                                  VoterBuildReport* report = nullptr);
LikelihoodTable build_country_table(
    const std::vector<std::pair<std::string, std::string>>& records);

// Streaming builds over delimited provider files: a header row names
// `first_name` plus `race` (voter) or `country` (wiki-style); the delimiter
// is sniffed from the header (tab or comma). Multiple voter snapshots are
// concatenated without dedup.
LikelihoodTable build_voter_table_from_files(const std::vector<std::string>& paths,
                                             VoterBuildReport* report = nullptr);
LikelihoodTable build_country_table_from_file(const std::string& path);

struct Tables {
  LikelihoodTable voter;
  LikelihoodTable country;

  // Provider that owns a race category.
  const LikelihoodTable& provider_for(RaceCategory race) const;
};

// Running coverage: matched named characters / named characters.
struct CoverageCounter {
  std::int64_t named = 0;
  std::int64_t matched = 0;
  double coverage() const { return named == 0 ? 1.0 : static_cast<double>(matched) / named; }
};

// Exact match on the normalized first name against one provider; a miss is a
// value, recorded in the counter.
std::optional<std::map<RaceCategory, double>> lookup(const LikelihoodTable& table,
                                                     const std::string& name,
                                                     CoverageCounter& coverage);

// Table files: deterministic delimited text with provider metadata and a
// checksum over the data rows.
void save_table(const LikelihoodTable& table, const std::string& path);
LikelihoodTable load_table(const std::string& path);

// --- Baselines ---------------------------------------------------------------

struct BaselineDistribution {
  std::string source;
  std::map<std::string, double> proportions;

  double at(const std::string& key) const;
};

// Household Pulse Survey gender shares renormalized over {NB, F, M}.
BaselineDistribution gender_baseline();

// HPS sexual-orientation shares mapped to the six unordered gender pairs.
BaselineDistribution pair_baseline();

enum class RaceBaselineSource { Census2022 };

// 2022 Census race shares; MENA, absent from the Census, is added from the
// country provider's overall share when a table is supplied.
BaselineDistribution race_baseline(RaceBaselineSource source,
                                   const LikelihoodTable* country_table = nullptr);

double mena_baseline(const LikelihoodTable& country_table);

// Custom baseline table: delimited "key<TAB>proportion" rows.
BaselineDistribution load_baseline(const std::string& path);
void save_baseline(const BaselineDistribution& baseline, const std::string& path);

}  // namespace storyaudit::demography
