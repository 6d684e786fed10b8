#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "storyaudit/instances.hpp"
#include "storyaudit/prompts.hpp"

namespace storyaudit {

enum class ClientErrorKind { Transient, Permanent };

struct ClientError {
  ClientErrorKind kind = ClientErrorKind::Permanent;
  std::string message;
};

struct ClientResult {
  std::optional<std::string> text;
  std::optional<ClientError> error;

  static ClientResult ok(std::string t) { return {std::move(t), std::nullopt}; }
  static ClientResult fail(ClientErrorKind kind, std::string msg) {
    return {std::nullopt, ClientError{kind, std::move(msg)}};
  }
};

// Anything that answers (prompt id, prompt text) -> story text. Calls may run
// concurrently; implementations guard their own state.
class TextClient {
 public:
  virtual ~TextClient() = default;
  virtual ClientResult generate(const std::string& prompt_id, const std::string& prompt_text) = 0;
};

struct CollectionPlan {
  std::vector<std::string> models;
  std::int64_t samples_per_prompt = 1000;
  int max_parallel = 1;
  int retry_budget = 3;
  std::uint64_t seed = 0;
  std::string credentials_env;  // name of the env var carrying the API token

  std::int64_t expected_instances(std::size_t prompt_count) const {
    return samples_per_prompt * static_cast<std::int64_t>(prompt_count) *
           static_cast<std::int64_t>(models.size());
  }
};

CollectionPlan plan_from_json_file(const std::string& path);

struct PromptOutcome {
  std::int64_t succeeded = 0;
  std::int64_t failed = 0;
};

struct CollectionReport {
  std::int64_t success = 0;
  std::int64_t failed = 0;
  std::int64_t skipped_existing = 0;  // resume shortfall accounting
  double wall_seconds = 0.0;
  // keyed by model_id + "/" + prompt_id
  std::map<std::string, PromptOutcome> per_prompt;
  std::vector<std::string> short_prompts;  // left short after retry exhaustion

  bool complete() const { return failed == 0; }
};

// Sink that serializes writes and knows how many samples each
// (model, prompt) pair already holds, so re-runs complete only the shortfall.
class InstanceSink {
 public:
  explicit InstanceSink(const std::string& path);
  void write(const StoryInstance& instance);
  std::int64_t existing(const std::string& model_id, const std::string& prompt_id) const;
  void flush();

 private:
  std::unique_ptr<InstanceWriter> writer_;
  std::map<std::string, std::int64_t> existing_;
};

// Runs the plan to completion: plan.samples_per_prompt samples per prompt per
// model, minus whatever the sink already holds. Transient failures retry up
// to plan.retry_budget with exponential backoff; permanent failures are
// recorded, never silently dropped.
CollectionReport collect(TextClient& client, const CollectionPlan& plan,
                         const std::vector<PromptSpec>& prompts, InstanceSink& sink,
                         std::chrono::milliseconds base_backoff = std::chrono::milliseconds(100));

// Client that replays recorded (prompt_id, response) pairs in file order,
// per prompt. Unknown prompt ids and exhausted supplies are permanent errors.
class ReplayClient : public TextClient {
 public:
  explicit ReplayClient(const std::string& path);
  ClientResult generate(const std::string& prompt_id, const std::string& prompt_text) override;
  std::int64_t remaining(const std::string& prompt_id) const;

 private:
  mutable std::mutex mu_;
  std::map<std::string, std::vector<std::string>> responses_;
  std::map<std::string, std::size_t> cursor_;
};

void write_replay_file(const std::vector<std::pair<std::string, std::string>>& records,
                       const std::string& path);

// Generic HTTP text-completion client: POST {"model":..,"prompt":..} and read
// {"text":..} back. Credentials come from the environment variable named in
// the plan, sent as a bearer token; vendor specifics stay in configuration.
class HttpTextClient : public TextClient {
 public:
  HttpTextClient(std::string endpoint_url, std::string model_id, std::string credentials_env);
  ~HttpTextClient() override;
  ClientResult generate(const std::string& prompt_id, const std::string& prompt_text) override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace storyaudit
