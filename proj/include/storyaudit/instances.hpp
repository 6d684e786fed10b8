#pragma once

#include <cstdint>
#include <fstream>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "storyaudit/types.hpp"

namespace storyaudit {

// One model response with provenance, in the datasheet's instance schema.
// Label fields stay absent until extraction runs.
struct StoryInstance {
  std::string model_id;
  std::int64_t timestamp = 0;  // Unix seconds, serialized as ISO-8601 UTC
  Domain domain = Domain::Learning;
  PowerCondition power_condition = PowerCondition::Neutral;
  std::string subject_desc;
  std::optional<std::string> object_desc;
  std::string query;
  std::string response;
  std::optional<std::string> label_query;
  std::optional<std::string> label_response;
  std::vector<std::string> subject_references;
  std::vector<std::string> object_references;
  std::optional<std::string> subject_name;
  std::optional<std::string> object_name;
  bool ambiguous = false;  // labeler assigned a reference to both characters

  bool operator==(const StoryInstance&) const = default;
};

std::string instance_to_json_line(const StoryInstance& instance);
StoryInstance instance_from_json_line(const std::string& line, const std::string& context);

// Streaming writer; emits the schema-version header before the first record.
class InstanceWriter {
 public:
  explicit InstanceWriter(const std::string& path, bool append = false);
  void write(const StoryInstance& instance);
  void flush();
  std::int64_t written() const { return written_; }

 private:
  std::ofstream out_;
  std::string path_;
  std::int64_t written_ = 0;
};

// Pull-based reader; one record in memory at a time. With `lenient`, a
// malformed line ends the stream instead of throwing.
class InstanceReader {
 public:
  explicit InstanceReader(const std::string& path, bool lenient = false);
  std::optional<StoryInstance> next();
  int line_number() const { return line_no_; }

 private:
  std::ifstream in_;
  std::string path_;
  bool lenient_ = false;
  int line_no_ = 0;
};

void write_instances(const std::vector<StoryInstance>& instances, const std::string& path);
std::vector<StoryInstance> read_instances(const std::string& path, bool lenient = false);

// Visits every record without materializing the file.
void for_each_instance(const std::string& path,
                       const std::function<void(const StoryInstance&)>& fn,
                       bool lenient = false);

}  // namespace storyaudit
