#include "storyaudit/collect.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <mutex>
#include <thread>

#include <nlohmann/json.hpp>

#include "storyaudit/text.hpp"

namespace storyaudit {

namespace {

using nlohmann::json;

std::string pair_key(const std::string& model_id, const std::string& prompt_id) {
  return model_id + "/" + prompt_id;
}

}  // namespace

CollectionPlan plan_from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open plan file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw DataError(path + ": invalid JSON plan (" + std::string(e.what()) + ")");
  }
  CollectionPlan plan;
  if (!j.contains("models") || !j["models"].is_array() || j["models"].empty())
    throw DataError(path + ": plan needs a non-empty 'models' array");
  for (const auto& m : j["models"]) plan.models.push_back(m.get<std::string>());
  plan.samples_per_prompt = j.value("samples_per_prompt", std::int64_t{1000});
  if (plan.samples_per_prompt < 1) throw DataError(path + ": samples_per_prompt must be >= 1");
  plan.max_parallel = j.value("max_parallel", 1);
  if (plan.max_parallel < 1) throw DataError(path + ": max_parallel must be >= 1");
  plan.retry_budget = j.value("retry_budget", 3);
  if (plan.retry_budget < 0) throw DataError(path + ": retry_budget must be >= 0");
  plan.seed = j.value("seed", std::uint64_t{0});
  plan.credentials_env = j.value("credentials_env", std::string{});
  return plan;
}

InstanceSink::InstanceSink(const std::string& path) {
  // Scan whatever is already there so collection resumes instead of
  // duplicating. A missing or empty file is a fresh sink.
  {
    std::ifstream probe(path, std::ios::binary);
    if (probe.good() && probe.peek() != std::ifstream::traits_type::eof()) {
      InstanceReader reader(path);
      while (auto instance = reader.next()) {
        const auto* prompt = find_prompt_by_text(instance->query);
        if (!prompt) throw DataError(path + ": existing instance has unknown query");
        ++existing_[pair_key(instance->model_id, prompt->id)];
      }
    }
  }
  writer_ = std::make_unique<InstanceWriter>(path, /*append=*/true);
}

void InstanceSink::write(const StoryInstance& instance) { writer_->write(instance); }

std::int64_t InstanceSink::existing(const std::string& model_id,
                                    const std::string& prompt_id) const {
  auto it = existing_.find(pair_key(model_id, prompt_id));
  return it == existing_.end() ? 0 : it->second;
}

void InstanceSink::flush() { writer_->flush(); }

CollectionReport collect(TextClient& client, const CollectionPlan& plan,
                         const std::vector<PromptSpec>& prompts, InstanceSink& sink,
                         std::chrono::milliseconds base_backoff) {
  const auto started = std::chrono::steady_clock::now();
  CollectionReport report;

  struct Task {
    const PromptSpec* prompt;
    std::string model_id;
    std::int64_t shortfall;
  };
  std::vector<Task> tasks;
  for (const auto& model : plan.models) {
    for (const auto& prompt : prompts) {
      const std::int64_t have = sink.existing(model, prompt.id);
      const std::int64_t want = plan.samples_per_prompt;
      report.skipped_existing += std::min(have, want);
      if (have < want) tasks.push_back({&prompt, model, want - have});
    }
  }

  std::mutex mu;  // guards sink + report
  std::atomic<std::size_t> next_task{0};

  auto run_one = [&](const Task& task) {
    PromptOutcome outcome;
    for (std::int64_t sample = 0; sample < task.shortfall; ++sample) {
      ClientResult result = client.generate(task.prompt->id, task.prompt->text);
      int attempts = 0;
      auto backoff = base_backoff;
      while (result.error && result.error->kind == ClientErrorKind::Transient &&
             attempts < plan.retry_budget) {
        std::this_thread::sleep_for(backoff);
        backoff *= 2;
        ++attempts;
        result = client.generate(task.prompt->id, task.prompt->text);
      }
      if (result.text) {
        StoryInstance instance;
        instance.model_id = task.model_id;
        instance.timestamp = static_cast<std::int64_t>(
            std::chrono::duration_cast<std::chrono::seconds>(
                std::chrono::system_clock::now().time_since_epoch())
                .count());
        instance.domain = task.prompt->domain;
        instance.power_condition = task.prompt->condition;
        instance.subject_desc = task.prompt->subject_desc;
        instance.object_desc = task.prompt->object_desc;
        instance.query = task.prompt->text;
        instance.response = *result.text;
        std::lock_guard<std::mutex> lock(mu);
        sink.write(instance);
        ++outcome.succeeded;
      } else {
        ++outcome.failed;
      }
    }
    std::lock_guard<std::mutex> lock(mu);
    report.success += outcome.succeeded;
    report.failed += outcome.failed;
    report.per_prompt[pair_key(task.model_id, task.prompt->id)] = outcome;
    if (outcome.failed > 0) report.short_prompts.push_back(pair_key(task.model_id, task.prompt->id));
  };

  const int workers = std::min<int>(plan.max_parallel, static_cast<int>(tasks.size()));
  if (workers <= 1) {
    for (const auto& task : tasks) run_one(task);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (;;) {
          const std::size_t i = next_task.fetch_add(1);
          if (i >= tasks.size()) return;
          run_one(tasks[i]);
        }
      });
    }
    for (auto& t : pool) t.join();
  }

  sink.flush();
  std::sort(report.short_prompts.begin(), report.short_prompts.end());
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return report;
}

ReplayClient::ReplayClient(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open replay file: " + path);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw DataError(path + ":" + std::to_string(line_no) + ": invalid JSON (" + e.what() + ")");
    }
    if (j.value("schema", "") == "storyaudit.replay") continue;  // header line
    if (!j.contains("prompt_id") || !j.contains("response"))
      throw DataError(path + ":" + std::to_string(line_no) +
                      ": replay record needs prompt_id and response");
    responses_[j["prompt_id"].get<std::string>()].push_back(j["response"].get<std::string>());
  }
}

ClientResult ReplayClient::generate(const std::string& prompt_id, const std::string&) {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = responses_.find(prompt_id);
  if (it == responses_.end())
    return ClientResult::fail(ClientErrorKind::Permanent, "replay: unknown prompt id " + prompt_id);
  auto& pos = cursor_[prompt_id];
  if (pos >= it->second.size())
    return ClientResult::fail(ClientErrorKind::Permanent,
                              "replay: supply exhausted for prompt " + prompt_id);
  return ClientResult::ok(it->second[pos++]);
}

std::int64_t ReplayClient::remaining(const std::string& prompt_id) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = responses_.find(prompt_id);
  if (it == responses_.end()) return 0;
  auto c = cursor_.find(prompt_id);
  const std::size_t used = c == cursor_.end() ? 0 : c->second;
  return static_cast<std::int64_t>(it->second.size() - used);
}

void write_replay_file(const std::vector<std::pair<std::string, std::string>>& records,
                       const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write replay file: " + path);
  out << R"({"schema":"storyaudit.replay","version":1})" << '\n';
  for (const auto& [prompt_id, response] : records) {
    json j;
    j["prompt_id"] = prompt_id;
    j["response"] = response;
    out << j.dump() << '\n';
  }
}

}  // namespace storyaudit
