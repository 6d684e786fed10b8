#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "storyaudit/analysis.hpp"
#include "storyaudit/demography.hpp"
#include "storyaudit/extraction.hpp"
#include "storyaudit/metrics.hpp"
#include "storyaudit/prompts.hpp"
#include "storyaudit/stats.hpp"
#include "storyaudit/synth.hpp"
#include "storyaudit/text.hpp"

namespace py = pybind11;
using namespace storyaudit;

namespace {

py::dict prompt_to_dict(const PromptSpec& p) {
  py::dict d;
  d["id"] = p.id;
  d["domain"] = std::string(to_string(p.domain));
  d["condition"] = std::string(to_string(p.condition));
  d["scenario_index"] = p.scenario_index;
  d["subject"] = p.subject_desc;
  d["object"] = p.object_desc ? py::object(py::str(*p.object_desc)) : py::none();
  d["text"] = p.text;
  if (p.love_subtype) d["love_subtype"] = std::string(to_string(*p.love_subtype));
  return d;
}

py::dict estimate_to_dict(const metrics::RatioEstimate& e) {
  py::dict d;
  d["value"] = e.value;
  d["ci_low"] = e.ci_low;
  d["ci_high"] = e.ci_high;
  d["p_value"] = e.p_value;
  d["numerator_n"] = e.numerator_n;
  d["denominator_n"] = e.denominator_n;
  return d;
}

RaceCategory race_arg(const std::string& name) {
  const auto race = race_from_string(name);
  if (!race) throw py::value_error("unknown race category: " + name);
  return *race;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Bias-audit pipeline for open-ended story generations";

  m.def("generate_prompts", [] {
    py::list out;
    for (const auto& p : generate_prompts()) out.append(prompt_to_dict(p));
    return out;
  });

  m.def("corpus_checksum", [] { return text::hex64(corpus_checksum()); });

  m.def(
      "gender_of",
      [](const std::vector<std::string>& references) {
        return std::string(to_string(demography::gender_of(references)));
      },
      py::arg("references"));

  m.def(
      "pair_of",
      [](const std::string& g1, const std::string& g2) -> py::object {
        const auto a = gender_from_string(g1);
        const auto b = gender_from_string(g2);
        if (!a || !b) throw py::value_error("unknown gender category");
        const auto pair = demography::pair_of(*a, *b);
        return pair ? py::object(py::str(std::string(to_string(*pair)))) : py::none();
      },
      py::arg("gender1"), py::arg("gender2"));

  m.def(
      "first_name",
      [](const std::string& full) -> py::object {
        const auto name = demography::first_name(full);
        return name ? py::object(py::str(*name)) : py::none();
      },
      py::arg("full"));

  m.def(
      "classify_country",
      [](const std::string& country) {
        switch (demography::classify_country(country)) {
          case demography::CountryGroup::Mena: return std::string("mena");
          case demography::CountryGroup::Nhpi: return std::string("nhpi");
          default: return std::string("other");
        }
      },
      py::arg("country"));

  m.def(
      "wilson_interval",
      [](std::int64_t successes, std::int64_t n, double confidence) {
        const auto ci = stats::wilson_interval(successes, n, confidence);
        return py::make_tuple(ci.low, ci.high);
      },
      py::arg("successes"), py::arg("n"), py::arg("confidence") = 0.95);

  m.def("wilson_p_value", &stats::wilson_p_value, py::arg("successes"), py::arg("n"),
        py::arg("p_star"));

  m.def(
      "log_ratio_interval",
      [](std::int64_t a, std::int64_t n1, std::int64_t b, std::int64_t n2, double confidence) {
        const auto ci = stats::log_ratio_interval(a, n1, b, n2, confidence);
        return py::make_tuple(ci.low, ci.high);
      },
      py::arg("a"), py::arg("n1"), py::arg("b"), py::arg("n2"), py::arg("confidence") = 0.95);

  m.def(
      "p_from_ratio_ci",
      [](double ratio, double low, double high) {
        return stats::p_from_ratio_ci(ratio, {low, high, 0.95});
      },
      py::arg("ratio"), py::arg("ci_low"), py::arg("ci_high"));

  m.def("gender_baseline", [] { return demography::gender_baseline().proportions; });
  m.def("pair_baseline", [] { return demography::pair_baseline().proportions; });
  m.def("race_baseline", [] {
    return demography::race_baseline(demography::RaceBaselineSource::Census2022).proportions;
  });

  m.def(
      "representation_ratio",
      [](double p, double p_star, std::int64_t n) {
        return estimate_to_dict(metrics::representation_ratio(p, p_star, n));
      },
      py::arg("p"), py::arg("p_star"), py::arg("n"));

  m.def(
      "subordination_ratio",
      [](double subordinate, double dominant, double subordinate_total, double dominant_total,
         bool smoothing) {
        metrics::RoleCounts counts;
        counts.subordinate = subordinate;
        counts.dominant = dominant;
        counts.subordinate_total = subordinate_total;
        counts.dominant_total = dominant_total;
        return estimate_to_dict(metrics::subordination_ratio(
            counts, smoothing ? metrics::Smoothing::On : metrics::Smoothing::Off));
      },
      py::arg("subordinate"), py::arg("dominant"), py::arg("subordinate_total"),
      py::arg("dominant_total"), py::arg("smoothing") = true);

  py::class_<demography::LikelihoodTable>(m, "LikelihoodTable")
      .def_readonly("provider", &demography::LikelihoodTable::provider)
      .def_readonly("total_names", &demography::LikelihoodTable::total_names)
      .def_readonly("total_persons", &demography::LikelihoodTable::total_persons)
      .def("likelihood_of",
           [](const demography::LikelihoodTable& t, const std::string& name,
              const std::string& race) { return t.likelihood_of(name, race_arg(race)); })
      .def("save", [](const demography::LikelihoodTable& t, const std::string& path) {
        demography::save_table(t, path);
      });

  m.def(
      "build_voter_table",
      [](const std::vector<std::pair<std::string, std::string>>& records) {
        return demography::build_voter_table(records);
      },
      py::arg("records"));
  m.def(
      "build_country_table",
      [](const std::vector<std::pair<std::string, std::string>>& records) {
        return demography::build_country_table(records);
      },
      py::arg("records"));
  m.def("load_table", &demography::load_table, py::arg("path"));

  m.def(
      "build_label_prompt",
      [](const std::string& story, const std::string& domain, const std::string& condition,
         const std::string& subject, py::object object) {
        StoryInstance instance;
        const auto d = domain_from_string(domain);
        const auto c = condition_from_string(condition);
        if (!d || !c) throw py::value_error("unknown domain or condition");
        instance.domain = *d;
        instance.power_condition = *c;
        instance.subject_desc = subject;
        if (!object.is_none()) instance.object_desc = object.cast<std::string>();
        instance.response = story;
        return extraction::build_label_prompt(instance);
      },
      py::arg("story"), py::arg("domain"), py::arg("condition"), py::arg("subject"),
      py::arg("object") = py::none());

  m.def(
      "heuristic_extract",
      [](const std::string& story, const std::string& domain, const std::string& condition,
         const std::string& subject, py::object object) {
        StoryInstance instance;
        const auto d = domain_from_string(domain);
        const auto c = condition_from_string(condition);
        if (!d || !c) throw py::value_error("unknown domain or condition");
        instance.domain = *d;
        instance.power_condition = *c;
        instance.subject_desc = subject;
        if (!object.is_none()) instance.object_desc = object.cast<std::string>();
        instance.response = story;
        py::list out;
        for (const auto& character : extraction::heuristic_extract(instance)) {
          py::dict entry;
          entry["role"] = std::string(to_string(character.role));
          entry["name"] = character.name ? py::object(py::str(*character.name)) : py::none();
          entry["references"] = character.references;
          out.append(entry);
        }
        return out;
      },
      py::arg("story"), py::arg("domain"), py::arg("condition"), py::arg("subject"),
      py::arg("object") = py::none());

  m.def(
      "run_extraction",
      [](const std::string& in_path, const std::string& out_path, const std::string& labeler) {
        std::unique_ptr<extraction::LabelClient> client;
        if (labeler != "heuristic") {
          if (labeler.rfind("replay:", 0) != 0)
            throw py::value_error("labeler must be 'heuristic' or 'replay:<path>'");
          client = std::make_unique<extraction::ReplayLabeler>(labeler.substr(7));
        }
        const auto report = extraction::run_extraction(in_path, out_path, client.get());
        py::dict d;
        d["processed"] = report.processed;
        d["labeled"] = report.labeled;
        d["parse_errors"] = report.parse_errors;
        d["ambiguous"] = report.ambiguous;
        return d;
      },
      py::arg("in_path"), py::arg("out_path"), py::arg("labeler") = "heuristic");

  m.def(
      "simulate",
      [](const std::string& params_path, const std::string& out_path) {
        const auto params = synth::params_from_json_file(params_path);
        const auto corpus = synth::generate_corpus(params, generate_prompts());
        write_instances(corpus, out_path);
        return static_cast<std::int64_t>(corpus.size());
      },
      py::arg("params_path"), py::arg("out_path"));

  m.def(
      "analyze",
      [](const std::string& in_path, const std::string& voter_table, const std::string& out_dir,
         py::object country_table, bool smoothing, bool include_ambiguous) {
        demography::Tables tables;
        if (!voter_table.empty()) tables.voter = demography::load_table(voter_table);
        if (!country_table.is_none())
          tables.country = demography::load_table(country_table.cast<std::string>());
        analysis::RunConfig config;
        config.smoothing = smoothing;
        config.include_ambiguous = include_ambiguous;
        const auto result = analysis::analyze(read_instances(in_path), tables, config);
        analysis::emit_reports(result, out_dir);
        py::dict d;
        d["instances"] = result.instances;
        d["excluded_ambiguous"] = result.excluded_ambiguous;
        d["coverage"] = result.coverage.coverage();
        d["config_hash"] = result.hash;
        return d;
      },
      py::arg("in_path"), py::arg("voter_table"), py::arg("out_dir"),
      py::arg("country_table") = py::none(), py::arg("smoothing") = true,
      py::arg("include_ambiguous") = false);

#ifdef VERSION_INFO
#define SA_STR(x) #x
#define SA_XSTR(x) SA_STR(x)
  m.attr("__version__") = SA_XSTR(VERSION_INFO);
#else
  m.attr("__version__") = "dev";
#endif
}
