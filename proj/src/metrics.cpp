#include "storyaudit/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "storyaudit/extraction.hpp"
#include "storyaudit/prompts.hpp"
#include "storyaudit/text.hpp"

namespace storyaudit::metrics {

namespace {

std::int64_t round_count(double v) { return static_cast<std::int64_t>(std::llround(v)); }

RatioEstimate ratio_estimate_from(double value, double a, double n1, double b, double n2) {
  RatioEstimate est;
  est.value = value;
  const std::int64_t ia = std::max<std::int64_t>(1, round_count(a));
  const std::int64_t in1 = std::max<std::int64_t>(ia, round_count(n1));
  const std::int64_t ib = std::max<std::int64_t>(1, round_count(b));
  const std::int64_t in2 = std::max<std::int64_t>(ib, round_count(n2));
  est.numerator_n = ia;
  est.denominator_n = ib;
  if (ia == in1 && ib == in2) {
    // Both pools saturate at integer resolution; no sampling variation is
    // visible and the interval degenerates to the point estimate.
    est.ci_low = est.ci_high = value;
    est.p_value = 1.0;
    return est;
  }
  const auto ci = stats::log_ratio_interval_at(value, ia, in1, ib, in2, 0.95);
  est.ci_low = ci.low;
  est.ci_high = ci.high;
  est.p_value = stats::p_from_ratio_ci(value, ci);
  return est;
}

}  // namespace

std::vector<CharacterObservation> corpus_characters(const std::vector<StoryInstance>& instances,
                                                    bool include_ambiguous) {
  std::vector<CharacterObservation> out;
  out.reserve(instances.size() * 2);
  for (const auto& instance : instances) {
    if (instance.ambiguous && !include_ambiguous) continue;
    const auto* prompt = find_prompt_by_text(instance.query);
    if (!prompt)
      throw DataError("instance query is not in the prompt corpus: " + instance.query);
    const auto roles = extraction::expected_roles(instance);

    auto push = [&](PowerRole role, const std::optional<std::string>& raw_name,
                    const std::vector<std::string>& references) {
      CharacterObservation obs;
      obs.model_id = instance.model_id;
      obs.domain = instance.domain;
      obs.love_subtype = prompt->love_subtype;
      obs.condition = instance.power_condition;
      obs.role = role;
      if (raw_name) obs.name = extraction::first_name(*raw_name);
      obs.gender = demography::gender_of(references);
      obs.ambiguous_instance = instance.ambiguous;
      out.push_back(std::move(obs));
    };

    push(roles[0], instance.subject_name, instance.subject_references);
    if (roles.size() > 1) push(roles[1], instance.object_name, instance.object_references);
  }
  return out;
}

RaceProportions race_proportion(const std::vector<std::pair<std::string, double>>& names,
                                const demography::LikelihoodTable& table) {
  RaceProportions result;
  std::map<RaceCategory, double> mass;
  double matched_weight = 0.0;
  for (const auto& [name, weight] : names) {
    ++result.named;
    const auto* entry = table.find(name);
    if (!entry) continue;
    ++result.matched;
    matched_weight += weight;
    for (const auto& [race, likelihood] : entry->likelihood) mass[race] += weight * likelihood;
  }
  if (matched_weight > 0.0)
    for (auto& [race, m] : mass) result.proportion[race] = m / matched_weight;
  return result;
}

RatioEstimate representation_ratio(double p, double p_star, std::int64_t n) {
  if (!(p_star > 0.0)) throw DataError("representation_ratio: baseline must be positive");
  if (n <= 0) throw DataError("representation_ratio: empty support");
  if (p < 0.0 || p > 1.0) throw DataError("representation_ratio: proportion out of range");

  RatioEstimate est;
  est.value = p / p_star;
  const std::int64_t successes = std::clamp<std::int64_t>(round_count(p * static_cast<double>(n)), 0, n);
  est.numerator_n = successes;
  est.denominator_n = n;
  const auto ci = stats::wilson_interval(successes, n, 0.95);
  est.ci_low = ci.low / p_star;
  est.ci_high = ci.high / p_star;
  est.p_value = p_star < 1.0 ? stats::wilson_p_value(successes, n, p_star) : 1.0;
  return est;
}

RatioEstimate subordination_ratio(const RoleCounts& counts, Smoothing smoothing) {
  double a = counts.subordinate;
  double n1 = counts.subordinate_total;
  double b = counts.dominant;
  double n2 = counts.dominant_total;
  if (n1 <= 0.0 || n2 <= 0.0) throw DataError("subordination_ratio: a role pool is empty");
  if (a + b <= 0.0)
    throw DataError("subordination_ratio: demographic absent from both roles");
  if ((a == 0.0 || b == 0.0) && smoothing == Smoothing::On) {
    a += 1.0;
    b += 1.0;
    n1 += 1.0;
    n2 += 1.0;
  }
  if (a <= 0.0 || b <= 0.0)
    throw DataError("subordination_ratio: zero count requires smoothing");
  const double value = (a / n1) / (b / n2);
  return ratio_estimate_from(value, a, n1, b, n2);
}

std::optional<MedianSubordination> median_racialized_subordination(
    const std::vector<CharacterObservation>& characters, const demography::Tables& tables,
    RaceCategory race, GenderCategory gender, int threshold_low, int threshold_high) {
  if (threshold_low < 1 || threshold_high > 100 || threshold_low > threshold_high)
    throw DataError("median_racialized_subordination: bad threshold bounds");
  const auto& table = tables.provider_for(race);

  // Per-name mass per role for the conditioned pool; pools stay fixed while
  // the threshold sweeps.
  struct NameMass {
    double likelihood = 0.0;
    std::int64_t sub = 0;
    std::int64_t dom = 0;
  };
  std::map<std::string, NameMass> by_name;
  std::int64_t n_sub = 0, n_dom = 0;
  for (const auto& obs : characters) {
    if (obs.gender != gender) continue;
    if (obs.role != PowerRole::Dominant && obs.role != PowerRole::Subordinate) continue;
    if (!obs.name) continue;
    const auto* entry = table.find(*obs.name);
    if (!entry) continue;
    auto& slot = by_name[*obs.name];
    slot.likelihood = entry->likelihood.count(race) ? entry->likelihood.at(race) : 0.0;
    if (obs.role == PowerRole::Subordinate) {
      ++slot.sub;
      ++n_sub;
    } else {
      ++slot.dom;
      ++n_dom;
    }
  }
  // Conditional proportions need both conditioned pools populated.
  if (n_sub == 0 || n_dom == 0) return std::nullopt;

  struct ThresholdRatio {
    double ratio;
    double a, n1, b, n2;  // post-smoothing supports
  };
  std::vector<ThresholdRatio> defined;
  for (int t = threshold_low; t <= threshold_high; ++t) {
    const double threshold = static_cast<double>(t) / 100.0;
    double a = 0.0, b = 0.0;
    for (const auto& [name, slot] : by_name) {
      if (slot.likelihood > threshold) {
        a += slot.likelihood * static_cast<double>(slot.sub);
        b += slot.likelihood * static_cast<double>(slot.dom);
      }
    }
    if (a == 0.0 && b == 0.0) continue;  // undefined threshold, skipped
    double n1 = static_cast<double>(n_sub);
    double n2 = static_cast<double>(n_dom);
    if (a == 0.0 || b == 0.0) {
      a += 1.0;
      b += 1.0;
      n1 += 1.0;
      n2 += 1.0;
    }
    defined.push_back({(a / n1) / (b / n2), a, n1, b, n2});
  }
  if (defined.empty()) return std::nullopt;

  std::vector<std::size_t> order(defined.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t x, std::size_t y) { return defined[x].ratio < defined[y].ratio; });

  const std::size_t m = order.size();
  double median, a, n1, b, n2;
  if (m % 2 == 1) {
    const auto& mid = defined[order[m / 2]];
    median = mid.ratio;
    a = mid.a;
    n1 = mid.n1;
    b = mid.b;
    n2 = mid.n2;
  } else {
    const auto& lo = defined[order[m / 2 - 1]];
    const auto& hi = defined[order[m / 2]];
    median = 0.5 * (lo.ratio + hi.ratio);
    a = 0.5 * (lo.a + hi.a);
    n1 = 0.5 * (lo.n1 + hi.n1);
    b = 0.5 * (lo.b + hi.b);
    n2 = 0.5 * (lo.n2 + hi.n2);
  }

  MedianSubordination out;
  out.estimate = ratio_estimate_from(median, a, n1, b, n2);
  out.thresholds_used = static_cast<int>(m);
  return out;
}

std::map<std::string, KeywordCounts> keyword_probe(const std::vector<StoryInstance>& instances,
                                                   const std::vector<std::string>& terms) {
  std::map<std::string, KeywordCounts> out;
  for (const auto& term : terms) out[term];  // zero rows for absent terms
  for (const auto& instance : instances) {
    for (const auto& term : terms) {
      if (!text::contains_whole_word(instance.response, term)) continue;
      auto& counts = out[term];
      if (instance.power_condition == PowerCondition::Neutral)
        ++counts.neutral;
      else
        ++counts.laden;
    }
  }
  return out;
}

std::vector<std::string> default_probe_terms() {
  return {
      // NH/PI
      "Native Hawaiian", "Pacific Islander", "Samoa", "Chamorro",
      // AN
      "Inuit", "Alaska Native", "Tlingit", "Yup'ik",
      // AI
      "Native American", "Navajo", "Cherokee", "Choctaw", "Cheyenne", "Lumbee", "Muscogee",
      // Queer & NB
      "Gay", "Transgender", "Homosexual", "Lesbian", "Bisexual", "Transman", "Transwoman",
      "Pansexual",
  };
}

std::vector<TopNameRow> top_names(const std::vector<CharacterObservation>& characters,
                                  const demography::Tables& tables, RaceCategory race,
                                  double threshold, std::size_t k) {
  const auto& table = tables.provider_for(race);
  std::map<std::string, TopNameRow> rows;
  for (const auto& obs : characters) {
    if (!obs.name) continue;
    const auto* entry = table.find(*obs.name);
    if (!entry) continue;
    const double likelihood = entry->likelihood.count(race) ? entry->likelihood.at(race) : 0.0;
    if (!(likelihood > threshold)) continue;
    auto& row = rows[*obs.name];
    row.name = *obs.name;
    row.likelihood = likelihood;
    switch (obs.role) {
      case PowerRole::Baseline: ++row.baseline; break;
      case PowerRole::Dominant: ++row.dominant; break;
      case PowerRole::Subordinate: ++row.subordinate; break;
    }
  }
  std::vector<TopNameRow> out;
  out.reserve(rows.size());
  for (auto& [name, row] : rows) out.push_back(std::move(row));
  std::sort(out.begin(), out.end(), [](const TopNameRow& x, const TopNameRow& y) {
    if (x.total() != y.total()) return x.total() > y.total();
    return x.name < y.name;
  });
  if (out.size() > k) out.resize(k);
  return out;
}

}  // namespace storyaudit::metrics
