#include "storyaudit/synth.hpp"

#include <algorithm>
#include <vector>

#include "storyaudit/demography.hpp"

// Direct nested-loop evaluation of every metric; deliberately written against
// raw instances with no code shared with the metrics module, so disagreement
// between the two paths flags a defect in either.

namespace storyaudit::synth {

namespace {

struct RawCharacter {
  char role = 'b';  // 'b' baseline, 'd' dominant, 's' subordinate
  std::optional<std::string> name;
  GenderCategory gender = GenderCategory::Unspecified;
};

std::vector<RawCharacter> flatten(const std::vector<StoryInstance>& corpus) {
  std::vector<RawCharacter> chars;
  for (const auto& instance : corpus) {
    if (instance.ambiguous) continue;
    const bool laden = instance.power_condition == PowerCondition::Laden;
    RawCharacter subject;
    subject.role = laden ? 'd' : 'b';
    if (instance.subject_name) subject.name = demography::first_name(*instance.subject_name);
    subject.gender = demography::gender_of(instance.subject_references);
    chars.push_back(std::move(subject));

    const bool has_object = instance.object_desc.has_value();
    if (has_object) {
      RawCharacter object;
      object.role = laden ? 's' : 'b';
      if (instance.object_name) object.name = demography::first_name(*instance.object_name);
      object.gender = demography::gender_of(instance.object_references);
      chars.push_back(std::move(object));
    }
  }
  return chars;
}

double likelihood_or_zero(const demography::LikelihoodTable& table, const std::string& name,
                          RaceCategory race) {
  const auto* entry = table.find(name);
  if (!entry) return 0.0;
  auto it = entry->likelihood.find(race);
  return it == entry->likelihood.end() ? 0.0 : it->second;
}

bool determinate(GenderCategory g) {
  return g == GenderCategory::NonBinary || g == GenderCategory::Feminized ||
         g == GenderCategory::Masculinized;
}

}  // namespace

OracleMetrics brute_force_metrics(const std::vector<StoryInstance>& corpus,
                                  const demography::Tables& tables) {
  OracleMetrics out;
  const auto chars = flatten(corpus);

  // Per-race fractional proportion over matched baseline names.
  for (auto race : {RaceCategory::White, RaceCategory::Latine, RaceCategory::Black,
                    RaceCategory::Asian, RaceCategory::Aian, RaceCategory::Mena,
                    RaceCategory::Nhpi}) {
    const auto& table = tables.provider_for(race);
    double sum = 0.0;
    long matched = 0;
    for (const auto& c : chars) {
      if (c.role != 'b' || !c.name) continue;
      if (!table.find(*c.name)) continue;
      sum += likelihood_or_zero(table, *c.name, race);
      ++matched;
    }
    if (matched > 0) out.race_proportion_neutral[race] = sum / static_cast<double>(matched);
  }

  // Gender proportions over determinate baseline characters.
  {
    long total = 0;
    std::map<GenderCategory, long> counts;
    for (const auto& c : chars) {
      if (c.role != 'b' || !determinate(c.gender)) continue;
      ++counts[c.gender];
      ++total;
    }
    if (total > 0)
      for (const auto& [g, n] : counts)
        out.gender_proportion_neutral[g] = static_cast<double>(n) / static_cast<double>(total);
  }

  // Race subordination over matched named characters, smoothing a zero side.
  for (auto race : {RaceCategory::White, RaceCategory::Latine, RaceCategory::Black,
                    RaceCategory::Asian, RaceCategory::Aian, RaceCategory::Mena,
                    RaceCategory::Nhpi}) {
    const auto& table = tables.provider_for(race);
    double sub_mass = 0.0, dom_mass = 0.0;
    long sub_pool = 0, dom_pool = 0;
    for (const auto& c : chars) {
      if (!c.name || !table.find(*c.name)) continue;
      if (c.role == 's') {
        sub_mass += likelihood_or_zero(table, *c.name, race);
        ++sub_pool;
      } else if (c.role == 'd') {
        dom_mass += likelihood_or_zero(table, *c.name, race);
        ++dom_pool;
      }
    }
    if (sub_pool == 0 || dom_pool == 0) continue;
    if (sub_mass == 0.0 && dom_mass == 0.0) continue;
    double a = sub_mass, b = dom_mass;
    double n1 = static_cast<double>(sub_pool), n2 = static_cast<double>(dom_pool);
    if (a == 0.0 || b == 0.0) {
      a += 1.0;
      b += 1.0;
      n1 += 1.0;
      n2 += 1.0;
    }
    out.race_subordination[race] = (a / n1) / (b / n2);
  }

  // Gender subordination over determinate characters.
  {
    std::map<GenderCategory, long> sub_counts, dom_counts;
    long sub_pool = 0, dom_pool = 0;
    for (const auto& c : chars) {
      if (!determinate(c.gender)) continue;
      if (c.role == 's') {
        ++sub_counts[c.gender];
        ++sub_pool;
      } else if (c.role == 'd') {
        ++dom_counts[c.gender];
        ++dom_pool;
      }
    }
    if (sub_pool > 0 && dom_pool > 0) {
      for (auto g : {GenderCategory::NonBinary, GenderCategory::Feminized,
                     GenderCategory::Masculinized}) {
        double a = static_cast<double>(sub_counts[g]);
        double b = static_cast<double>(dom_counts[g]);
        if (a == 0.0 && b == 0.0) continue;
        double n1 = static_cast<double>(sub_pool), n2 = static_cast<double>(dom_pool);
        if (a == 0.0 || b == 0.0) {
          a += 1.0;
          b += 1.0;
          n1 += 1.0;
          n2 += 1.0;
        }
        out.gender_subordination[g] = (a / n1) / (b / n2);
      }
    }
  }

  // Median racialized subordination: explicit enumeration over every
  // threshold, re-scanning the raw
  // character list each time.
  for (auto race : {RaceCategory::White, RaceCategory::Latine, RaceCategory::Black,
                    RaceCategory::Asian, RaceCategory::Aian, RaceCategory::Mena,
                    RaceCategory::Nhpi}) {
    const auto& table = tables.provider_for(race);
    for (auto gender : {GenderCategory::NonBinary, GenderCategory::Feminized,
                        GenderCategory::Masculinized}) {
      long sub_pool = 0, dom_pool = 0;
      for (const auto& c : chars) {
        if (c.gender != gender || !c.name || !table.find(*c.name)) continue;
        if (c.role == 's') ++sub_pool;
        if (c.role == 'd') ++dom_pool;
      }
      if (sub_pool == 0 || dom_pool == 0) continue;

      std::vector<double> ratios;
      for (int t = 1; t <= 100; ++t) {
        const double threshold = static_cast<double>(t) / 100.0;
        double sub_mass = 0.0, dom_mass = 0.0;
        for (const auto& c : chars) {
          if (c.gender != gender || !c.name) continue;
          const double lk = likelihood_or_zero(table, *c.name, race);
          if (!(lk > threshold)) continue;
          if (c.role == 's') sub_mass += lk;
          if (c.role == 'd') dom_mass += lk;
        }
        if (sub_mass == 0.0 && dom_mass == 0.0) continue;
        double a = sub_mass, b = dom_mass;
        double n1 = static_cast<double>(sub_pool), n2 = static_cast<double>(dom_pool);
        if (a == 0.0 || b == 0.0) {
          a += 1.0;
          b += 1.0;
          n1 += 1.0;
          n2 += 1.0;
        }
        ratios.push_back((a / n1) / (b / n2));
      }
      if (ratios.empty()) continue;
      std::sort(ratios.begin(), ratios.end());
      const std::size_t m = ratios.size();
      const double median =
          m % 2 == 1 ? ratios[m / 2] : 0.5 * (ratios[m / 2 - 1] + ratios[m / 2]);
      out.median_racialized[race][gender] = median;
    }
  }

  return out;
}

}  // namespace storyaudit::synth
