#include <doctest.h>

#include <cmath>
#include <random>

#include "storyaudit/analysis.hpp"
#include "storyaudit/metrics.hpp"
#include "storyaudit/prompts.hpp"
#include "storyaudit/synth.hpp"

using namespace storyaudit;
using metrics::CharacterObservation;

namespace {

demography::LikelihoodTable fixture_voter_table() {
  // Likelihoods for the fixture names. Each row sums to 1 across the five
  // voter categories.
  demography::LikelihoodTable table;
  table.provider = "voter";
  auto add = [&](const std::string& name, double white, double latine, double black,
                 double asian) {
    demography::NameEntry entry;
    entry.likelihood[RaceCategory::White] = white;
    entry.likelihood[RaceCategory::Latine] = latine;
    entry.likelihood[RaceCategory::Black] = black;
    entry.likelihood[RaceCategory::Asian] = asian;
    entry.likelihood[RaceCategory::Aian] = 1.0 - white - latine - black - asian;
    entry.persons = 1000;
    table.total_persons += 1000;
    table.names.emplace(name, std::move(entry));
  };
  add("sarah", 0.831, 0.08, 0.05, 0.039);
  add("john", 0.880, 0.05, 0.04, 0.030);
  add("maria", 0.20, 0.723, 0.05, 0.027);
  add("juan", 0.10, 0.869, 0.02, 0.011);
  add("jamal", 0.15, 0.08, 0.734, 0.036);
  add("amari", 0.10, 0.02, 0.864, 0.016);
  add("priya", 0.25, 0.05, 0.018, 0.682);
  add("hiroshi", 0.28, 0.04, 0.013, 0.667);
  add("fillmore", 0.95, 0.02, 0.02, 0.01);
  table.total_names = static_cast<std::int64_t>(table.names.size());
  return table;
}

StoryInstance laden_learning_instance(const std::string& dom_name, const std::string& sub_name) {
  static const PromptSpec* prompt = find_prompt_by_id("learning-laden-8");
  StoryInstance instance;
  instance.model_id = "fixture";
  instance.domain = prompt->domain;
  instance.power_condition = prompt->condition;
  instance.subject_desc = prompt->subject_desc;
  instance.object_desc = prompt->object_desc;
  instance.query = prompt->text;
  instance.response = dom_name + " mentored " + sub_name + ".";
  instance.subject_name = dom_name;
  instance.object_name = sub_name;
  return instance;
}

StoryInstance neutral_learning_instance(const std::string& name) {
  static const PromptSpec* prompt = find_prompt_by_id("learning-neutral-8");
  StoryInstance instance;
  instance.model_id = "fixture";
  instance.domain = prompt->domain;
  instance.power_condition = prompt->condition;
  instance.subject_desc = prompt->subject_desc;
  instance.query = prompt->text;
  instance.response = name + " excelled.";
  instance.subject_name = name;
  return instance;
}

// Per-name dominant/subordinate counts for the Learning column of the
// top-names fixture.
struct NameRoleCounts {
  const char* name;
  int baseline;
  int dominant;
  int subordinate;
};

constexpr NameRoleCounts kLearningFixture[] = {
    {"Priya", 0, 52, 21},      {"Hiroshi", 0, 0, 36},    {"Amari", 176, 1251, 2},
    {"Jamal", 9, 40, 211},     {"Maria", 550, 364, 13580}, {"Juan", 8, 12, 2213},
    {"Sarah", 11699, 10925, 5939}, {"John", 5915, 5239, 3005},
};

std::vector<StoryInstance> learning_fixture_corpus() {
  std::vector<StoryInstance> corpus;
  std::vector<std::string> dom_names, sub_names;
  for (const auto& row : kLearningFixture) {
    for (int i = 0; i < row.dominant; ++i) dom_names.emplace_back(row.name);
    for (int i = 0; i < row.subordinate; ++i) sub_names.emplace_back(row.name);
  }
  // Every laden story holds one dominant and one subordinate character, so
  // the two role pools stay equal; filler names absorb the imbalance.
  const std::size_t stories = std::max(dom_names.size(), sub_names.size());
  while (dom_names.size() < stories) dom_names.emplace_back("Fillmore");
  while (sub_names.size() < stories) sub_names.emplace_back("Fillmore");
  corpus.reserve(stories + 20000);
  for (std::size_t i = 0; i < stories; ++i)
    corpus.push_back(laden_learning_instance(dom_names[i], sub_names[i]));
  for (const auto& row : kLearningFixture)
    for (int i = 0; i < row.baseline; ++i) corpus.push_back(neutral_learning_instance(row.name));
  return corpus;
}

}  // namespace

TEST_CASE("race_proportion splits evenly for symmetric one-hot names") {
  demography::LikelihoodTable table;
  table.provider = "voter";
  demography::NameEntry a, b;
  for (auto race : demography::voter_races()) {
    a.likelihood[race] = race == RaceCategory::White ? 1.0 : 0.0;
    b.likelihood[race] = race == RaceCategory::Latine ? 1.0 : 0.0;
  }
  a.persons = b.persons = 1;
  table.names.emplace("ann", a);
  table.names.emplace("beto", b);
  const auto props = metrics::race_proportion({{"ann", 1.0}, {"beto", 1.0}}, table);
  CHECK(props.proportion.at(RaceCategory::White) == 0.5);
  CHECK(props.proportion.at(RaceCategory::Latine) == 0.5);
}

TEST_CASE("race_proportion matches the fixture likelihood and reports coverage") {
  const auto table = fixture_voter_table();
  const auto props = metrics::race_proportion({{"sarah", 1.0}}, table);
  CHECK(props.proportion.at(RaceCategory::White) == 0.831);
  CHECK(props.matched == 1);

  const auto missing = metrics::race_proportion({{"sarah", 1.0}, {"zanzibar", 1.0}}, table);
  CHECK(missing.matched == 1);
  CHECK(missing.named == 2);
  CHECK(missing.coverage() == 0.5);
  CHECK(missing.proportion.at(RaceCategory::White) == 0.831);  // unmatched excluded

  const auto none = metrics::race_proportion({{"zanzibar", 1.0}}, table);
  CHECK_FALSE(none.defined());
}

TEST_CASE("race_proportion equals the double-loop oracle on random corpora") {
  const auto table = fixture_voter_table();
  std::vector<std::string> pool;
  for (const auto& [name, entry] : table.names) pool.push_back(name);
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<std::pair<std::string, double>> names;
    const int n = std::uniform_int_distribution<int>(1, 60)(rng);
    for (int i = 0; i < n; ++i)
      names.emplace_back(pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng)],
                         1.0);
    const auto props = metrics::race_proportion(names, table);

    // Oracle: direct double-loop summation.
    for (auto race : demography::voter_races()) {
      double sum = 0.0;
      for (const auto& [name, weight] : names) sum += table.likelihood_of(name, race) * weight;
      CHECK(std::fabs(props.proportion.at(race) - sum / n) <= 1e-12);
    }
  }
}

TEST_CASE("representation ratio matches the pinned reference arithmetic") {
  // White / Learning / first model: p = 0.710 against the Census 0.589.
  const auto white = metrics::representation_ratio(0.710, 0.589, 15000);
  CHECK(std::fabs(white.value - 1.2054) < 1e-4);

  // Non-binary: p = 0.039 against the unrounded baseline share.
  const auto base = demography::gender_baseline();
  const auto nb = metrics::representation_ratio(0.039, base.at("non-binary"), 15000);
  CHECK(std::fabs(nb.value - 2.280) < 1e-3);

  // Identity: p == p*.
  const auto unit = metrics::representation_ratio(0.589, 0.589, 1000);
  CHECK(unit.value == 1.0);
  CHECK(unit.p_value == doctest::Approx(1.0).epsilon(1e-6));

  CHECK_THROWS_AS(static_cast<void>(metrics::representation_ratio(0.5, 0.0, 100)), DataError);
}

TEST_CASE("representation ratio times the baseline returns the proportion") {
  std::mt19937_64 rng(15);
  std::uniform_real_distribution<double> unit(0.01, 0.99);
  for (int i = 0; i < 200; ++i) {
    const double p = unit(rng);
    const double p_star = unit(rng);
    const auto est = metrics::representation_ratio(p, p_star, 500);
    CHECK(est.value * p_star == doctest::Approx(p).epsilon(1e-14));
    CHECK(est.ci_low <= est.value);
    CHECK(est.value <= est.ci_high);
    // Ratio significance agrees with the interval.
    const bool outside = !(est.ci_low <= 1.0 && 1.0 <= est.ci_high);
    if (std::fabs(est.p_value - 0.05) > 1e-6) CHECK((est.p_value < 0.05) == outside);
  }
}

TEST_CASE("subordination ratio on the fixture matches the pinned ratios") {
  const auto corpus = learning_fixture_corpus();
  const auto characters = metrics::corpus_characters(corpus);

  const auto juan = metrics::subordination_ratio(analysis::name_role_counts(characters, "juan"),
                                                 metrics::Smoothing::On);
  CHECK(std::fabs(juan.value - 184.4) < 0.5);

  const auto jamal = metrics::subordination_ratio(analysis::name_role_counts(characters, "jamal"),
                                                  metrics::Smoothing::On);
  CHECK(std::fabs(jamal.value - 5.28) < 0.01);

  const auto maria = metrics::subordination_ratio(analysis::name_role_counts(characters, "maria"),
                                                  metrics::Smoothing::On);
  CHECK(std::fabs(maria.value - 37.31) < 0.01);

  // Hiroshi: 36 subordinate, 0 dominant; smoothing imputes 37/1.
  const auto hiroshi = metrics::subordination_ratio(
      analysis::name_role_counts(characters, "hiroshi"), metrics::Smoothing::On);
  CHECK(std::fabs(hiroshi.value - 37.0) < 1e-9);
}

TEST_CASE("subordination ratio basics and invariants") {
  metrics::RoleCounts counts;
  counts.dominant = 40;
  counts.subordinate = 40;
  counts.dominant_total = 500;
  counts.subordinate_total = 500;
  CHECK(metrics::subordination_ratio(counts, metrics::Smoothing::Off).value == 1.0);

  // Scale invariance with smoothing off.
  metrics::RoleCounts scaled;
  std::mt19937_64 rng(31);
  std::uniform_int_distribution<int> draw(1, 400);
  for (int i = 0; i < 200; ++i) {
    metrics::RoleCounts c;
    c.dominant = draw(rng);
    c.subordinate = draw(rng);
    c.dominant_total = c.dominant + draw(rng);
    c.subordinate_total = c.subordinate + draw(rng);
    const double base = metrics::subordination_ratio(c, metrics::Smoothing::Off).value;
    metrics::RoleCounts seven = c;
    seven.dominant *= 7;
    seven.subordinate *= 7;
    seven.dominant_total *= 7;
    seven.subordinate_total *= 7;
    CHECK(metrics::subordination_ratio(seven, metrics::Smoothing::Off).value ==
          doctest::Approx(base).epsilon(1e-12));

    // Swapping roles inverts the ratio.
    metrics::RoleCounts swapped = c;
    std::swap(swapped.dominant, swapped.subordinate);
    std::swap(swapped.dominant_total, swapped.subordinate_total);
    const double inv = metrics::subordination_ratio(swapped, metrics::Smoothing::Off).value;
    CHECK(base * inv == doctest::Approx(1.0).epsilon(1e-12));
  }

  metrics::RoleCounts empty;
  CHECK_THROWS_AS(static_cast<void>(metrics::subordination_ratio(empty, metrics::Smoothing::On)),
                  DataError);
  metrics::RoleCounts zero;
  zero.dominant_total = zero.subordinate_total = 10;
  CHECK_THROWS_AS(static_cast<void>(metrics::subordination_ratio(zero, metrics::Smoothing::Off)),
                  DataError);
}

TEST_CASE("median racialized subordination is 1 for identical role pools") {
  demography::Tables tables;
  tables.voter = fixture_voter_table();
  std::vector<StoryInstance> corpus;
  // Identical name distributions in dominant and subordinate roles.
  for (int i = 0; i < 40; ++i) {
    for (const char* name : {"Maria", "Sarah", "Juan"}) {
      auto a = laden_learning_instance(name, name);
      a.subject_references = {"she"};
      a.object_references = {"she"};
      corpus.push_back(std::move(a));
    }
  }
  const auto characters = metrics::corpus_characters(corpus);
  const auto median = metrics::median_racialized_subordination(
      characters, tables, RaceCategory::Latine, GenderCategory::Feminized);
  REQUIRE(median.has_value());
  CHECK(median->estimate.value == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("median racialized subordination equals the brute-force oracle on random corpora") {
  demography::Tables tables;
  tables.voter = fixture_voter_table();
  std::vector<std::string> pool;
  for (const auto& [name, entry] : tables.voter.names) pool.push_back(name);
  std::mt19937_64 rng(2718);
  int checked_cells = 0;
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<StoryInstance> corpus;
    const int stories = std::uniform_int_distribution<int>(1, 60)(rng);
    for (int s = 0; s < stories; ++s) {
      const auto& dom = pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng)];
      auto sub = pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng)];
      auto instance = laden_learning_instance(dom, sub);
      instance.subject_references = {std::uniform_int_distribution<int>(0, 1)(rng) ? "he" : "she"};
      instance.object_references = {std::uniform_int_distribution<int>(0, 1)(rng) ? "he" : "she"};
      corpus.push_back(std::move(instance));
    }
    const auto characters = metrics::corpus_characters(corpus);
    const auto oracle = synth::brute_force_metrics(corpus, tables);
    for (auto race : {RaceCategory::White, RaceCategory::Latine, RaceCategory::Black,
                      RaceCategory::Asian}) {
      for (auto gender : {GenderCategory::Feminized, GenderCategory::Masculinized}) {
        const auto mine =
            metrics::median_racialized_subordination(characters, tables, race, gender);
        const bool oracle_has = oracle.median_racialized.count(race) &&
                                oracle.median_racialized.at(race).count(gender);
        CHECK(mine.has_value() == oracle_has);
        if (mine && oracle_has) {
          CHECK(std::fabs(mine->estimate.value - oracle.median_racialized.at(race).at(gender)) <=
                1e-9);
          ++checked_cells;
        }
      }
    }
  }
  CHECK(checked_cells > 500);
}

TEST_CASE("scaling every count by 7 leaves the median unchanged") {
  demography::Tables tables;
  tables.voter = fixture_voter_table();
  std::vector<StoryInstance> base;
  for (int i = 0; i < 3; ++i) {
    auto a = laden_learning_instance("Maria", "Juan");
    a.subject_references = {"he"};
    a.object_references = {"he"};
    base.push_back(a);
    auto b = laden_learning_instance("Juan", "Maria");
    b.subject_references = {"he"};
    b.object_references = {"he"};
    base.push_back(b);
    auto c = laden_learning_instance("Sarah", "Sarah");
    c.subject_references = {"he"};
    c.object_references = {"he"};
    base.push_back(c);
  }
  std::vector<StoryInstance> seven;
  for (int i = 0; i < 7; ++i) seven.insert(seven.end(), base.begin(), base.end());

  const auto m1 = metrics::median_racialized_subordination(
      metrics::corpus_characters(base), tables, RaceCategory::Latine,
      GenderCategory::Masculinized);
  const auto m7 = metrics::median_racialized_subordination(
      metrics::corpus_characters(seven), tables, RaceCategory::Latine,
      GenderCategory::Masculinized);
  REQUIRE(m1.has_value());
  REQUIRE(m7.has_value());
  CHECK(m1->estimate.value == doctest::Approx(m7->estimate.value).epsilon(1e-12));
}

TEST_CASE("keyword probe counts stories, not occurrences, with whole-word boundaries") {
  std::vector<StoryInstance> corpus;
  for (int i = 0; i < 13; ++i) {
    auto instance = laden_learning_instance("James", "Elder");
    instance.response = "An Inuit elder met Inuit neighbors.";  // counted once
    corpus.push_back(std::move(instance));
  }
  auto neutral = neutral_learning_instance("Gayle");
  neutral.response = "Gayle smiled at the gathering.";
  corpus.push_back(neutral);

  const auto counts =
      metrics::keyword_probe(corpus, {"Inuit", "gay", "Native American", "absent-term"});
  CHECK(counts.at("Inuit").total() == 13);
  CHECK(counts.at("Inuit").laden == 13);
  CHECK(counts.at("Inuit").neutral == 0);
  CHECK(counts.at("gay").total() == 0);  // "Gayle" is not a whole-word match
  CHECK(counts.at("absent-term").total() == 0);
  CHECK(counts.at("Native American").total() == 0);
}

TEST_CASE("keyword probe is invariant under story order permutation") {
  std::vector<StoryInstance> corpus;
  for (int i = 0; i < 20; ++i) {
    auto instance = neutral_learning_instance("Ana");
    instance.response = i % 3 ? "a quiet tale" : "a tale of Navajo weavers";
    corpus.push_back(std::move(instance));
  }
  const auto before = metrics::keyword_probe(corpus, {"Navajo"});
  std::mt19937_64 rng(1);
  std::shuffle(corpus.begin(), corpus.end(), rng);
  const auto after = metrics::keyword_probe(corpus, {"Navajo"});
  CHECK(before.at("Navajo").neutral == after.at("Navajo").neutral);
  CHECK(before.at("Navajo").laden == after.at("Navajo").laden);
}

TEST_CASE("top names reproduce the fixture row and honor thresholds") {
  demography::Tables tables;
  tables.voter = fixture_voter_table();
  const auto corpus = learning_fixture_corpus();
  const auto characters = metrics::corpus_characters(corpus);

  const auto latine = metrics::top_names(characters, tables, RaceCategory::Latine, 0.60, 25);
  REQUIRE(!latine.empty());
  CHECK(latine[0].name == "maria");
  CHECK(latine[0].likelihood == 0.723);
  CHECK(latine[0].baseline == 550);
  CHECK(latine[0].dominant == 364);
  CHECK(latine[0].subordinate == 13580);

  // Impossible threshold.
  CHECK(metrics::top_names(characters, tables, RaceCategory::Latine, 1.01, 25).empty());
  // Empty corpus.
  CHECK(metrics::top_names({}, tables, RaceCategory::Latine, 0.6, 25).empty());
}
