#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "storyaudit/analysis.hpp"
#include "storyaudit/collect.hpp"
#include "storyaudit/demography.hpp"
#include "storyaudit/extraction.hpp"
#include "storyaudit/prompts.hpp"
#include "storyaudit/synth.hpp"
#include "storyaudit/text.hpp"

namespace {

using namespace storyaudit;

void log_line(const char* level, const std::string& msg) {
  std::fprintf(stderr, "storyaudit %s: %s\n", level, msg.c_str());
}

int cmd_gen_prompts(const std::string& format, const std::string& out_path, bool checksum_only) {
  if (checksum_only) {
    std::cout << text::hex64(corpus_checksum()) << '\n';
    return 0;
  }
  std::ostream* out = &std::cout;
  std::ofstream file;
  if (!out_path.empty()) {
    file.open(out_path, std::ios::binary);
    if (!file) {
      log_line("error", "cannot write " + out_path);
      return 2;
    }
    out = &file;
  }
  const auto& prompts = generate_prompts();
  if (format == "table") {
    *out << "id\ttext\n";
    for (const auto& p : prompts) *out << p.id << '\t' << p.text << '\n';
  } else {
    for (const auto& p : prompts) {
      nlohmann::json j;
      j["id"] = p.id;
      j["domain"] = to_string(p.domain);
      if (p.love_subtype) j["love_subtype"] = to_string(*p.love_subtype);
      j["condition"] = to_string(p.condition);
      j["scenario_index"] = p.scenario_index;
      j["subject"] = p.subject_desc;
      j["object"] = p.object_desc ? nlohmann::json(*p.object_desc) : nlohmann::json(nullptr);
      j["text"] = p.text;
      *out << j.dump() << '\n';
    }
  }
  return 0;
}

int cmd_collect(const std::string& plan_path, const std::string& endpoint,
                const std::string& replay_path, const std::string& out_path) {
  CollectionPlan plan;
  if (!plan_path.empty()) {
    plan = plan_from_json_file(plan_path);
  } else {
    plan.models = {"replay"};
    plan.samples_per_prompt = 1;
  }
  const auto& prompts = generate_prompts();
  InstanceSink sink(out_path);

  std::unique_ptr<TextClient> client;
  if (!replay_path.empty()) {
    auto replay = std::make_unique<ReplayClient>(replay_path);
    if (plan_path.empty()) {
      // Without an explicit plan, replay whatever the file holds.
      std::int64_t max_supply = 1;
      for (const auto& p : prompts) max_supply = std::max(max_supply, replay->remaining(p.id));
      plan.samples_per_prompt = max_supply;
    }
    client = std::move(replay);
  } else {
    if (plan.models.size() != 1)
      log_line("warn", "endpoint collection uses the first model id for requests");
    client = std::make_unique<HttpTextClient>(endpoint, plan.models.front(),
                                              plan.credentials_env);
  }

  const auto report = collect(*client, plan, prompts, sink);
  log_line("info", "collected " + std::to_string(report.success) + " instances, failed " +
                       std::to_string(report.failed) + ", skipped existing " +
                       std::to_string(report.skipped_existing) + ", wall " +
                       std::to_string(report.wall_seconds) + "s");
  for (const auto& key : report.short_prompts) log_line("warn", "short after retries: " + key);
  return report.complete() ? 0 : 2;
}

// Adapts the generic HTTP completion client to the labeling interface.
class HttpLabeler : public extraction::LabelClient {
 public:
  HttpLabeler(const std::string& endpoint, const std::string& credentials_env)
      : client_(endpoint, "labeler", credentials_env) {}
  std::optional<std::string> label(const std::string& label_query) override {
    auto result = client_.generate("label", label_query);
    if (result.text) return *result.text;
    log_line("warn", "labeler: " + result.error->message);
    return std::nullopt;
  }

 private:
  HttpTextClient client_;
};

int cmd_extract(const std::string& in_path, const std::string& labeler_spec,
                const std::string& out_path, const std::string& credentials_env) {
  std::unique_ptr<extraction::LabelClient> labeler;
  if (labeler_spec == "heuristic") {
    // offline path
  } else if (labeler_spec.rfind("replay:", 0) == 0) {
    labeler = std::make_unique<extraction::ReplayLabeler>(labeler_spec.substr(7));
  } else if (labeler_spec.rfind("http://", 0) == 0 || labeler_spec.rfind("https://", 0) == 0) {
    labeler = std::make_unique<HttpLabeler>(labeler_spec, credentials_env);
  } else {
    log_line("error", "labeler must be heuristic, replay:<path>, or an http(s) endpoint; got: " +
                          labeler_spec);
    return 1;
  }
  const auto report = extraction::run_extraction(in_path, out_path, labeler.get());
  log_line("info", "processed " + std::to_string(report.processed) + ", labeled " +
                       std::to_string(report.labeled) + ", parse errors " +
                       std::to_string(report.parse_errors) + ", ambiguous " +
                       std::to_string(report.ambiguous));
  return 0;
}

int cmd_eval_extraction(const std::string& pred_path, const std::string& gold_path) {
  const auto pred = extraction::label_set_from_instances(read_instances(pred_path));
  const auto gold = extraction::label_set_from_instances(read_instances(gold_path));
  const auto report = extraction::evaluate_extraction(pred, gold);
  std::printf("metric\tprecision\trecall\n");
  std::printf("gender\t%.1f%%\t%.1f%%\n", report.gender_precision * 100.0,
              report.gender_recall * 100.0);
  std::printf("name\t%.1f%%\t%.1f%%\n", report.name_precision * 100.0,
              report.name_recall * 100.0);
  std::printf("ci_halfwidth\t%.4f\n", report.ci_halfwidth);
  return 0;
}

int cmd_build_tables(const std::vector<std::string>& voter_paths, const std::string& wiki_path,
                     const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  if (!voter_paths.empty()) {
    demography::VoterBuildReport report;
    const auto table = demography::build_voter_table_from_files(voter_paths, &report);
    demography::save_table(table, (std::filesystem::path(out_dir) / "voter.tsv").string());
    log_line("info", "voter table: " + std::to_string(table.total_names) + " names, " +
                         std::to_string(table.total_persons) + " persons, rejected " +
                         std::to_string(report.rejected_unknown_race) + " unknown-race rows");
  }
  if (!wiki_path.empty()) {
    const auto table = demography::build_country_table_from_file(wiki_path);
    demography::save_table(table, (std::filesystem::path(out_dir) / "country.tsv").string());
    log_line("info", "country table: " + std::to_string(table.total_names) + " names, " +
                         std::to_string(table.total_persons) + " persons");
  }
  return 0;
}

demography::Tables load_tables(const std::string& dir) {
  demography::Tables tables;
  const auto voter = std::filesystem::path(dir) / "voter.tsv";
  const auto country = std::filesystem::path(dir) / "country.tsv";
  if (std::filesystem::exists(voter)) tables.voter = demography::load_table(voter.string());
  if (std::filesystem::exists(country)) tables.country = demography::load_table(country.string());
  if (tables.voter.names.empty() && tables.country.names.empty())
    throw DataError("no voter.tsv or country.tsv under " + dir);
  return tables;
}

int cmd_lookup(const std::string& raw_name, const std::string& tables_dir) {
  const auto tables = load_tables(tables_dir);
  const auto name = demography::first_name(raw_name);
  if (!name) {
    log_line("error", "no usable first name in input");
    return 2;
  }
  bool found = false;
  for (const auto* table : {&tables.voter, &tables.country}) {
    const auto* entry = table->find(*name);
    if (!entry) continue;
    found = true;
    std::printf("%s\t%s", table->provider.c_str(), name->c_str());
    for (const auto& [race, lk] : entry->likelihood)
      std::printf("\t%s=%.4f", std::string(to_string(race)).c_str(), lk);
    std::printf("\tpersons=%lld\n", static_cast<long long>(entry->persons));
  }
  if (!found) {
    std::printf("%s\tnot found\n", name->c_str());
  }
  return 0;
}

int cmd_analyze(const std::string& in_path, const std::string& tables_dir,
                const std::string& baselines, const std::string& out_dir, bool no_smoothing,
                bool include_ambiguous, const std::string& terms_path) {
  analysis::RunConfig config;
  config.baseline_source = baselines;
  config.smoothing = !no_smoothing;
  config.include_ambiguous = include_ambiguous;
  if (!terms_path.empty()) {
    std::ifstream in(terms_path);
    if (!in) throw DataError("cannot open terms file: " + terms_path);
    std::string line;
    while (std::getline(in, line))
      if (!line.empty() && line[0] != '#') config.probe_terms.push_back(line);
  }
  const auto tables = load_tables(tables_dir);
  const auto instances = read_instances(in_path);
  const auto result = analysis::analyze(instances, tables, config);
  analysis::emit_reports(result, out_dir);
  log_line("info", "analyzed " + std::to_string(result.instances) + " instances (excluded " +
                       std::to_string(result.excluded_ambiguous) + " ambiguous), coverage " +
                       std::to_string(result.coverage.coverage()));
  return 0;
}

int cmd_simulate(const std::string& params_path, const std::string& out_path,
                 const std::string& tables_out) {
  const auto params = synth::params_from_json_file(params_path);
  const auto corpus = synth::generate_corpus(params, generate_prompts());
  write_instances(corpus, out_path);
  if (!tables_out.empty()) {
    std::filesystem::create_directories(tables_out);
    demography::save_table(synth::table_from_params(params),
                           (std::filesystem::path(tables_out) / "voter.tsv").string());
  }
  log_line("info", "simulated " + std::to_string(corpus.size()) + " instances");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"storyaudit: open-ended story bias audit pipeline"};
  app.require_subcommand(1);

  // gen-prompts
  std::string gp_format = "jsonl", gp_out;
  bool gp_checksum = false;
  auto* gen = app.add_subcommand("gen-prompts", "Emit the 100-prompt corpus");
  gen->add_option("--format", gp_format, "jsonl or table")
      ->check(CLI::IsMember({"jsonl", "table"}));
  gen->add_option("--out", gp_out, "Write to a file instead of stdout");
  gen->add_flag("--checksum", gp_checksum, "Print the corpus checksum and exit");

  // collect
  std::string c_plan, c_endpoint, c_replay, c_out;
  auto* col = app.add_subcommand("collect", "Collect model responses");
  col->add_option("--plan", c_plan, "JSON collection plan");
  col->add_option("--endpoint", c_endpoint, "HTTP text-completion endpoint URL");
  col->add_option("--replay", c_replay, "Replay file of (prompt_id, response) records");
  col->add_option("--out", c_out, "Output instance file")->required();

  // extract
  std::string e_in, e_labeler, e_out, e_cred;
  auto* ext = app.add_subcommand("extract", "Extract names and gender references");
  ext->add_option("--in", e_in, "Input instance file")->required();
  ext->add_option("--labeler", e_labeler, "heuristic, replay:<path>, or an http(s) endpoint")
      ->required();
  ext->add_option("--credentials-env", e_cred,
                  "Name of the environment variable holding the endpoint token");
  ext->add_option("--out", e_out, "Output instance file")->required();

  // eval-extraction
  std::string ev_pred, ev_gold;
  auto* ev = app.add_subcommand("eval-extraction", "Score predicted labels against gold labels");
  ev->add_option("--pred", ev_pred, "Predicted instance file")->required();
  ev->add_option("--gold", ev_gold, "Gold instance file")->required();

  // build-tables
  std::vector<std::string> bt_voter;
  std::string bt_wiki, bt_out;
  auto* bt = app.add_subcommand("build-tables", "Build name-likelihood tables");
  bt->add_option("--voter", bt_voter,
                 "Voter provider file (first_name, race); repeat to concatenate snapshots");
  bt->add_option("--wiki", bt_wiki, "Country provider file (first_name, country)");
  bt->add_option("--out", bt_out, "Output directory")->required();

  // lookup
  std::string lk_name, lk_tables;
  auto* lk = app.add_subcommand("lookup", "Debug lookup of a name's likelihoods");
  lk->add_option("name", lk_name, "Name to look up")->required();
  lk->add_option("--tables", lk_tables, "Table directory")->required();

  // analyze
  std::string a_in, a_tables, a_baselines = "census2022", a_out, a_terms;
  bool a_no_smoothing = false, a_include_ambiguous = false;
  auto* an = app.add_subcommand("analyze", "Compute bias metrics and emit report tables");
  an->add_option("--in", a_in, "Extracted instance file")->required();
  an->add_option("--tables", a_tables, "Table directory")->required();
  an->add_option("--baselines", a_baselines, "census2022 or a baseline file path");
  an->add_option("--out", a_out, "Output directory")->required();
  an->add_option("--terms", a_terms, "Keyword probe terms file (one per line)");
  an->add_flag("--no-smoothing", a_no_smoothing, "Disable Laplace smoothing of zero counts");
  an->add_flag("--include-ambiguous", a_include_ambiguous,
               "Keep instances flagged ambiguous by extraction");

  // simulate
  std::string s_params, s_out, s_tables;
  auto* sim = app.add_subcommand("simulate", "Generate a synthetic corpus with known statistics");
  sim->add_option("--params", s_params, "Synth params JSON file")->required();
  sim->add_option("--out", s_out, "Output instance file")->required();
  sim->add_option("--tables-out", s_tables, "Also write the injected likelihood table here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (gen->parsed()) return cmd_gen_prompts(gp_format, gp_out, gp_checksum);
    if (col->parsed()) {
      if (c_endpoint.empty() == c_replay.empty()) {
        log_line("error", "collect needs exactly one of --endpoint or --replay");
        return 1;
      }
      if (!c_endpoint.empty() && c_plan.empty()) {
        log_line("error", "endpoint collection requires --plan");
        return 1;
      }
      return cmd_collect(c_plan, c_endpoint, c_replay, c_out);
    }
    if (ext->parsed()) return cmd_extract(e_in, e_labeler, e_out, e_cred);
    if (ev->parsed()) return cmd_eval_extraction(ev_pred, ev_gold);
    if (bt->parsed()) {
      if (bt_voter.empty() && bt_wiki.empty()) {
        log_line("error", "build-tables needs --voter and/or --wiki");
        return 1;
      }
      return cmd_build_tables(bt_voter, bt_wiki, bt_out);
    }
    if (lk->parsed()) return cmd_lookup(lk_name, lk_tables);
    if (an->parsed())
      return cmd_analyze(a_in, a_tables, a_baselines, a_out, a_no_smoothing, a_include_ambiguous,
                         a_terms);
    if (sim->parsed()) return cmd_simulate(s_params, s_out, s_tables);
  } catch (const DataError& e) {
    log_line("error", e.what());
    return 2;
  } catch (const std::exception& e) {
    log_line("error", e.what());
    return 2;
  }
  return 1;
}
