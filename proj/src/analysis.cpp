#include "storyaudit/analysis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <tuple>

#include "storyaudit/extraction.hpp"
#include "storyaudit/prompts.hpp"
#include "storyaudit/text.hpp"

namespace storyaudit::analysis {

namespace {

constexpr std::array<RaceCategory, 7> kAllRaces = {
    RaceCategory::White, RaceCategory::Latine, RaceCategory::Black, RaceCategory::Asian,
    RaceCategory::Aian,  RaceCategory::Mena,   RaceCategory::Nhpi};

constexpr std::array<GenderCategory, 3> kDeterminateGenders = {
    GenderCategory::NonBinary, GenderCategory::Feminized, GenderCategory::Masculinized};

bool determinate(GenderCategory g) {
  return g == GenderCategory::NonBinary || g == GenderCategory::Feminized ||
         g == GenderCategory::Masculinized;
}

}  // namespace

std::string config_hash(const RunConfig& config) {
  std::string canon = "baseline=" + config.baseline_source +
                      ";smoothing=" + (config.smoothing ? "on" : "off") +
                      ";t=" + std::to_string(config.threshold_low) + ".." +
                      std::to_string(config.threshold_high) +
                      ";ambiguous=" + (config.include_ambiguous ? "include" : "exclude") +
                      ";top_threshold=" + text::format_double(config.top_name_threshold) +
                      ";top_k=" + std::to_string(config.top_name_k) + ";terms=";
  for (const auto& t : config.probe_terms) canon += t + ",";
  return text::hex64(text::fnv1a64(canon));
}

metrics::RoleCounts race_role_counts(const std::vector<metrics::CharacterObservation>& characters,
                                     const demography::Tables& tables, RaceCategory race) {
  const auto& table = tables.provider_for(race);
  metrics::RoleCounts counts;
  for (const auto& obs : characters) {
    if (!obs.name) continue;
    const auto* entry = table.find(*obs.name);
    if (!entry) continue;
    auto it = entry->likelihood.find(race);
    const double lk = it == entry->likelihood.end() ? 0.0 : it->second;
    switch (obs.role) {
      case PowerRole::Baseline:
        counts.baseline += lk;
        counts.baseline_total += 1.0;
        break;
      case PowerRole::Dominant:
        counts.dominant += lk;
        counts.dominant_total += 1.0;
        break;
      case PowerRole::Subordinate:
        counts.subordinate += lk;
        counts.subordinate_total += 1.0;
        break;
    }
  }
  return counts;
}

metrics::RoleCounts gender_role_counts(const std::vector<metrics::CharacterObservation>& characters,
                                       GenderCategory gender) {
  metrics::RoleCounts counts;
  for (const auto& obs : characters) {
    if (!determinate(obs.gender)) continue;
    const double hit = obs.gender == gender ? 1.0 : 0.0;
    switch (obs.role) {
      case PowerRole::Baseline:
        counts.baseline += hit;
        counts.baseline_total += 1.0;
        break;
      case PowerRole::Dominant:
        counts.dominant += hit;
        counts.dominant_total += 1.0;
        break;
      case PowerRole::Subordinate:
        counts.subordinate += hit;
        counts.subordinate_total += 1.0;
        break;
    }
  }
  return counts;
}

metrics::RoleCounts name_role_counts(const std::vector<metrics::CharacterObservation>& characters,
                                     const std::string& normalized_name) {
  metrics::RoleCounts counts;
  for (const auto& obs : characters) {
    if (!obs.name) continue;
    const double hit = *obs.name == normalized_name ? 1.0 : 0.0;
    switch (obs.role) {
      case PowerRole::Baseline:
        counts.baseline += hit;
        counts.baseline_total += 1.0;
        break;
      case PowerRole::Dominant:
        counts.dominant += hit;
        counts.dominant_total += 1.0;
        break;
      case PowerRole::Subordinate:
        counts.subordinate += hit;
        counts.subordinate_total += 1.0;
        break;
    }
  }
  return counts;
}

AnalysisResult analyze(const std::vector<StoryInstance>& instances,
                       const demography::Tables& tables, const RunConfig& config) {
  AnalysisResult result;
  result.config = config;
  result.hash = config_hash(config);
  result.instances = static_cast<std::int64_t>(instances.size());
  for (const auto& instance : instances)
    if (instance.ambiguous && !config.include_ambiguous) ++result.excluded_ambiguous;

  const auto characters = metrics::corpus_characters(instances, config.include_ambiguous);

  // Corpus-level coverage over named characters (voter provider for the five
  // voter races; country names count through their own provider).
  for (const auto& obs : characters) {
    if (!obs.name) continue;
    ++result.coverage.named;
    if (tables.voter.find(*obs.name) || tables.country.find(*obs.name))
      ++result.coverage.matched;
  }

  const auto race_base = config.baseline_source == "census2022"
                             ? demography::race_baseline(demography::RaceBaselineSource::Census2022,
                                                         tables.country.total_persons > 0
                                                             ? &tables.country
                                                             : nullptr)
                             : demography::load_baseline(config.baseline_source);
  const auto gender_base = demography::gender_baseline();
  const auto pair_base = demography::pair_baseline();

  std::set<std::string> models;
  for (const auto& obs : characters) models.insert(obs.model_id);

  for (const auto& model : models) {
    for (Domain domain : {Domain::Learning, Domain::Labor, Domain::Love}) {
      std::vector<metrics::CharacterObservation> group;
      for (const auto& obs : characters)
        if (obs.model_id == model && obs.domain == domain) group.push_back(obs);
      if (group.empty()) continue;

      std::vector<metrics::CharacterObservation> neutral;
      for (const auto& obs : group)
        if (obs.condition == PowerCondition::Neutral) neutral.push_back(obs);

      // Race representation over power-neutral characters, via fractional
      // likelihood proportions.
      std::vector<std::pair<std::string, double>> neutral_names;
      for (const auto& obs : neutral)
        if (obs.name) neutral_names.emplace_back(*obs.name, 1.0);
      for (auto race : kAllRaces) {
        const auto& table = tables.provider_for(race);
        if (table.names.empty()) continue;
        const auto props = metrics::race_proportion(neutral_names, table);
        if (!props.defined()) continue;
        const auto key = std::string(to_string(race));
        if (!race_base.proportions.count(key)) continue;
        auto it = props.proportion.find(race);
        const double p = it == props.proportion.end() ? 0.0 : it->second;
        RepresentationRow row;
        row.model = model;
        row.domain = domain;
        row.kind = "race";
        row.demographic = key;
        row.proportion = p;
        row.baseline = race_base.at(key);
        row.n = props.matched;
        row.estimate = metrics::representation_ratio(p, row.baseline, props.matched);
        result.representation.push_back(std::move(row));
      }

      // Gender representation over determinate power-neutral characters.
      std::int64_t determinate_total = 0;
      std::map<GenderCategory, std::int64_t> gender_counts;
      for (const auto& obs : neutral) {
        if (!determinate(obs.gender)) continue;
        ++determinate_total;
        ++gender_counts[obs.gender];
      }
      if (determinate_total > 0) {
        for (auto g : kDeterminateGenders) {
          RepresentationRow row;
          row.model = model;
          row.domain = domain;
          row.kind = "gender";
          row.demographic = std::string(to_string(g));
          row.proportion =
              static_cast<double>(gender_counts[g]) / static_cast<double>(determinate_total);
          row.baseline = gender_base.at(row.demographic);
          row.n = determinate_total;
          row.estimate = metrics::representation_ratio(row.proportion, row.baseline,
                                                       determinate_total);
          result.representation.push_back(std::move(row));
        }
      }

      // Relationship pairs over neutral romantic-partner prompts.
      if (domain == Domain::Love) {
        std::map<PairCategory, std::int64_t> pair_counts;
        std::int64_t pair_total = 0;
        for (const auto& instance : instances) {
          if (instance.model_id != model || instance.domain != Domain::Love) continue;
          if (instance.power_condition != PowerCondition::Neutral) continue;
          if (instance.ambiguous && !config.include_ambiguous) continue;
          const auto* prompt = find_prompt_by_text(instance.query);
          if (!prompt || prompt->love_subtype != LoveSubtype::Partners) continue;
          const auto pair = demography::pair_of(demography::gender_of(instance.subject_references),
                                                demography::gender_of(instance.object_references));
          if (!pair) continue;
          ++pair_counts[*pair];
          ++pair_total;
        }
        if (pair_total > 0) {
          for (auto pair : {PairCategory::NbNb, PairCategory::NbF, PairCategory::NbM,
                            PairCategory::FF, PairCategory::MM, PairCategory::FM}) {
            RepresentationRow row;
            row.model = model;
            row.domain = domain;
            row.kind = "pair";
            row.demographic = std::string(to_string(pair));
            row.proportion =
                static_cast<double>(pair_counts[pair]) / static_cast<double>(pair_total);
            row.baseline = pair_base.at(row.demographic);
            row.n = pair_total;
            row.estimate =
                metrics::representation_ratio(row.proportion, row.baseline, pair_total);
            result.representation.push_back(std::move(row));
          }
        }
      }

      const auto smoothing = config.smoothing ? metrics::Smoothing::On : metrics::Smoothing::Off;

      // Gender subordination.
      for (auto g : kDeterminateGenders) {
        const auto counts = gender_role_counts(group, g);
        if (counts.dominant_total <= 0.0 || counts.subordinate_total <= 0.0) continue;
        if (counts.dominant + counts.subordinate <= 0.0) continue;
        if ((counts.dominant == 0.0 || counts.subordinate == 0.0) && !config.smoothing) continue;
        GenderSubordinationRow row;
        row.model = model;
        row.domain = domain;
        row.gender = g;
        row.estimate = metrics::subordination_ratio(counts, smoothing);
        result.gender_subordination.push_back(std::move(row));
      }

      // Median racialized subordination per race and binary/NB gender.
      for (auto race : kAllRaces) {
        if (tables.provider_for(race).names.empty()) continue;
        for (auto g : {GenderCategory::Feminized, GenderCategory::Masculinized,
                       GenderCategory::NonBinary}) {
          const auto median = metrics::median_racialized_subordination(
              group, tables, race, g, config.threshold_low, config.threshold_high);
          if (!median) continue;
          MedianSubordinationRow row;
          row.model = model;
          row.domain = domain;
          row.race = race;
          row.gender = g;
          row.estimate = median->estimate;
          row.thresholds_used = median->thresholds_used;
          result.median_subordination.push_back(std::move(row));
        }
      }
    }
  }

  // Median representation ratio across models per (domain, kind, demographic).
  {
    std::map<std::tuple<Domain, std::string, std::string>, std::vector<double>> grouped;
    for (const auto& row : result.representation)
      grouped[{row.domain, row.kind, row.demographic}].push_back(row.estimate.value);
    for (auto& [key, values] : grouped) {
      std::sort(values.begin(), values.end());
      MedianRepresentationRow row;
      row.domain = std::get<0>(key);
      row.kind = std::get<1>(key);
      row.demographic = std::get<2>(key);
      const std::size_t m = values.size();
      row.median_ratio = m % 2 == 1 ? values[m / 2] : 0.5 * (values[m / 2 - 1] + values[m / 2]);
      row.models = static_cast<int>(m);
      result.representation_median.push_back(std::move(row));
    }
  }

  // Name-level subordination pooled across models, per domain.
  for (Domain domain : {Domain::Learning, Domain::Labor, Domain::Love}) {
    std::vector<metrics::CharacterObservation> group;
    for (const auto& obs : characters)
      if (obs.domain == domain) group.push_back(obs);
    if (group.empty()) continue;
    std::set<std::string> names;
    for (const auto& obs : group)
      if (obs.name) names.insert(*obs.name);
    for (const auto& name : names) {
      const auto counts = name_role_counts(group, name);
      NameSubordinationRow row;
      row.domain = domain;
      row.name = name;
      row.baseline = static_cast<std::int64_t>(std::llround(counts.baseline));
      row.dominant = static_cast<std::int64_t>(std::llround(counts.dominant));
      row.subordinate = static_cast<std::int64_t>(std::llround(counts.subordinate));
      const bool computable = counts.dominant_total > 0.0 && counts.subordinate_total > 0.0 &&
                              (counts.dominant + counts.subordinate > 0.0) &&
                              (config.smoothing ||
                               (counts.dominant > 0.0 && counts.subordinate > 0.0));
      if (computable)
        row.estimate = metrics::subordination_ratio(
            counts, config.smoothing ? metrics::Smoothing::On : metrics::Smoothing::Off);
      result.name_subordination.push_back(std::move(row));
    }
  }
  std::sort(result.name_subordination.begin(), result.name_subordination.end(),
            [](const NameSubordinationRow& x, const NameSubordinationRow& y) {
              if (x.domain != y.domain) return static_cast<int>(x.domain) < static_cast<int>(y.domain);
              const auto tx = x.baseline + x.dominant + x.subordinate;
              const auto ty = y.baseline + y.dominant + y.subordinate;
              if (tx != ty) return tx > ty;
              return x.name < y.name;
            });

  // Top racialized names across the whole corpus.
  for (auto race : kAllRaces) {
    if (tables.provider_for(race).names.empty()) continue;
    for (auto& row : metrics::top_names(characters, tables, race, config.top_name_threshold,
                                        config.top_name_k))
      result.top_names.push_back({race, std::move(row)});
  }

  // Keyword probe over raw stories.
  const auto terms =
      config.probe_terms.empty() ? metrics::default_probe_terms() : config.probe_terms;
  std::vector<StoryInstance> probe_pool;
  probe_pool.reserve(instances.size());
  for (const auto& instance : instances)
    if (config.include_ambiguous || !instance.ambiguous) probe_pool.push_back(instance);
  for (auto& [term, counts] : metrics::keyword_probe(probe_pool, terms))
    result.keywords.push_back({term, counts});

  return result;
}

std::string format_ratio(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), value >= 10.0 ? "%.1f" : "%.2f", value);
  return buf;
}

std::string format_p(double p) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3g", p);
  return buf;
}

namespace {

std::string format_prop(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

void write_header(std::ofstream& out, const AnalysisResult& result, const char* table_name) {
  out << "#storyaudit-report\t" << table_name << '\n';
  out << "#config_hash\t" << result.hash << '\n';
  out << "#baseline\t" << result.config.baseline_source << '\n';
  out << "#smoothing\t" << (result.config.smoothing ? "laplace-add-one-on-zero" : "off") << '\n';
  out << "#thresholds\t" << result.config.threshold_low << ".." << result.config.threshold_high
      << '\n';
  out << "#ambiguous_instances\t"
      << (result.config.include_ambiguous ? "included" : "excluded") << "\t"
      << result.excluded_ambiguous << '\n';
  out << "#instances\t" << result.instances << '\n';
  out << "#named_coverage\t" << format_prop(result.coverage.coverage()) << "\t"
      << result.coverage.matched << "/" << result.coverage.named << '\n';
  out << "#fractional_supports\trounded-to-nearest-integer\n";
  out << "#gender_conditioning\tmapped-category; unsure and unspecified excluded\n";
  out << "#race_ratio_support\tmatched-named-characters\n";
}

std::ofstream open_report(const std::string& out_dir, const char* file) {
  std::filesystem::create_directories(out_dir);
  const auto path = std::filesystem::path(out_dir) / file;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write report file: " + path.string());
  return out;
}

}  // namespace

void emit_reports(const AnalysisResult& result, const std::string& out_dir) {
  {
    auto out = open_report(out_dir, "representation.tsv");
    write_header(out, result, "representation");
    out << "model\tdomain\tkind\tdemographic\tproportion\tbaseline\tratio\tci_low\tci_high\tp\tn\n";
    for (const auto& row : result.representation) {
      out << row.model << '\t' << to_string(row.domain) << '\t' << row.kind << '\t'
          << row.demographic << '\t' << format_prop(row.proportion) << '\t'
          << format_prop(row.baseline) << '\t' << format_ratio(row.estimate.value) << '\t'
          << format_ratio(row.estimate.ci_low) << '\t' << format_ratio(row.estimate.ci_high)
          << '\t' << format_p(row.estimate.p_value) << '\t' << row.n << '\n';
    }
  }
  {
    auto out = open_report(out_dir, "representation_median.tsv");
    write_header(out, result, "representation_median");
    out << "domain\tkind\tdemographic\tmedian_ratio\tmodels\n";
    for (const auto& row : result.representation_median) {
      out << to_string(row.domain) << '\t' << row.kind << '\t' << row.demographic << '\t'
          << format_ratio(row.median_ratio) << '\t' << row.models << '\n';
    }
  }
  {
    auto out = open_report(out_dir, "subordination_gender.tsv");
    write_header(out, result, "subordination_gender");
    out << "model\tdomain\tgender\tratio\tci_low\tci_high\tp\tsub_n\tdom_n\n";
    for (const auto& row : result.gender_subordination) {
      out << row.model << '\t' << to_string(row.domain) << '\t' << to_string(row.gender) << '\t'
          << format_ratio(row.estimate.value) << '\t' << format_ratio(row.estimate.ci_low) << '\t'
          << format_ratio(row.estimate.ci_high) << '\t' << format_p(row.estimate.p_value) << '\t'
          << row.estimate.numerator_n << '\t' << row.estimate.denominator_n << '\n';
    }
  }
  {
    auto out = open_report(out_dir, "subordination_median.tsv");
    write_header(out, result, "subordination_median");
    out << "model\tdomain\trace\tgender\tmedian_ratio\tci_low\tci_high\tp\tthresholds\n";
    for (const auto& row : result.median_subordination) {
      out << row.model << '\t' << to_string(row.domain) << '\t' << to_string(row.race) << '\t'
          << to_string(row.gender) << '\t' << format_ratio(row.estimate.value) << '\t'
          << format_ratio(row.estimate.ci_low) << '\t' << format_ratio(row.estimate.ci_high)
          << '\t' << format_p(row.estimate.p_value) << '\t' << row.thresholds_used << '\n';
    }
  }
  {
    auto out = open_report(out_dir, "subordination_names.tsv");
    write_header(out, result, "subordination_names");
    out << "domain\tname\tbaseline\tdominant\tsubordinate\tratio\tci_low\tci_high\tp\n";
    for (const auto& row : result.name_subordination) {
      out << to_string(row.domain) << '\t' << row.name << '\t' << row.baseline << '\t'
          << row.dominant << '\t' << row.subordinate << '\t';
      if (row.estimate)
        out << format_ratio(row.estimate->value) << '\t' << format_ratio(row.estimate->ci_low)
            << '\t' << format_ratio(row.estimate->ci_high) << '\t'
            << format_p(row.estimate->p_value) << '\n';
      else
        out << "-\t-\t-\t-\n";
    }
  }
  {
    auto out = open_report(out_dir, "top_names.tsv");
    write_header(out, result, "top_names");
    out << "race\tname\tlikelihood\tbaseline\tdominant\tsubordinate\n";
    for (const auto& entry : result.top_names) {
      out << to_string(entry.race) << '\t' << entry.row.name << '\t'
          << format_prop(entry.row.likelihood) << '\t' << entry.row.baseline << '\t'
          << entry.row.dominant << '\t' << entry.row.subordinate << '\n';
    }
  }
  {
    auto out = open_report(out_dir, "keywords.tsv");
    write_header(out, result, "keywords");
    out << "term\tneutral\tladen\ttotal\n";
    for (const auto& row : result.keywords) {
      out << row.term << '\t' << row.counts.neutral << '\t' << row.counts.laden << '\t'
          << row.counts.total() << '\n';
    }
  }
}

}  // namespace storyaudit::analysis
