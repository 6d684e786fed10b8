#include "storyaudit/instances.hpp"

#include <nlohmann/json.hpp>

#include "storyaudit/text.hpp"

namespace storyaudit {

namespace {

using nlohmann::json;

constexpr const char* kSchemaHeader = R"({"schema":"storyaudit.instances","version":1})";

json optional_string(const std::optional<std::string>& v) {
  return v ? json(*v) : json(nullptr);
}

std::optional<std::string> get_optional_string(const json& j, const char* field,
                                               const std::string& context) {
  if (!j.contains(field) || j.at(field).is_null()) return std::nullopt;
  if (!j.at(field).is_string()) throw DataError(context + ": field '" + field + "' must be a string");
  return j.at(field).get<std::string>();
}

std::string get_string(const json& j, const char* field, const std::string& context) {
  if (!j.contains(field) || !j.at(field).is_string())
    throw DataError(context + ": missing string field '" + field + "'");
  return j.at(field).get<std::string>();
}

std::vector<std::string> get_string_array(const json& j, const char* field,
                                          const std::string& context) {
  std::vector<std::string> out;
  if (!j.contains(field) || j.at(field).is_null()) return out;
  if (!j.at(field).is_array()) throw DataError(context + ": field '" + field + "' must be an array");
  for (const auto& item : j.at(field)) {
    if (!item.is_string()) throw DataError(context + ": field '" + field + "' must hold strings");
    out.push_back(item.get<std::string>());
  }
  return out;
}

}  // namespace

std::string instance_to_json_line(const StoryInstance& instance) {
  // Field names follow the datasheet's instance schema, snake_cased.
  json j;
  j["model"] = instance.model_id;
  j["time"] = text::format_utc(instance.timestamp);
  j["domain"] = to_string(instance.domain);
  j["power_dynamic"] = to_string(instance.power_condition);
  j["subject"] = instance.subject_desc;
  j["object"] = optional_string(instance.object_desc);
  j["query"] = instance.query;
  j["response"] = instance.response;
  j["label_query"] = optional_string(instance.label_query);
  j["label_response"] = optional_string(instance.label_response);
  j["subject_references"] = instance.subject_references;
  j["object_references"] = instance.object_references;
  j["subject_name"] = optional_string(instance.subject_name);
  j["object_name"] = optional_string(instance.object_name);
  if (instance.ambiguous) j["ambiguous"] = true;
  return j.dump();
}

StoryInstance instance_from_json_line(const std::string& line, const std::string& context) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw DataError(context + ": invalid JSON (" + e.what() + ")");
  }
  if (!j.is_object()) throw DataError(context + ": record is not an object");

  StoryInstance out;
  out.model_id = get_string(j, "model", context);
  const std::string time = get_string(j, "time", context);
  if (!text::parse_utc(time, out.timestamp))
    throw DataError(context + ": field 'time' is not an ISO-8601 UTC instant: " + time);
  const auto domain = domain_from_string(get_string(j, "domain", context));
  if (!domain) throw DataError(context + ": field 'domain' has unknown value");
  out.domain = *domain;
  const auto cond = condition_from_string(get_string(j, "power_dynamic", context));
  if (!cond) throw DataError(context + ": field 'power_dynamic' has unknown value");
  out.power_condition = *cond;
  out.subject_desc = get_string(j, "subject", context);
  out.object_desc = get_optional_string(j, "object", context);
  out.query = get_string(j, "query", context);
  if (!j.contains("response") || !j.at("response").is_string())
    throw DataError(context + ": missing string field 'response'");
  out.response = j.at("response").get<std::string>();
  out.label_query = get_optional_string(j, "label_query", context);
  out.label_response = get_optional_string(j, "label_response", context);
  out.subject_references = get_string_array(j, "subject_references", context);
  out.object_references = get_string_array(j, "object_references", context);
  out.subject_name = get_optional_string(j, "subject_name", context);
  out.object_name = get_optional_string(j, "object_name", context);
  out.ambiguous = j.value("ambiguous", false);
  return out;
}

InstanceWriter::InstanceWriter(const std::string& path, bool append) : path_(path) {
  const bool exists_nonempty = [&] {
    if (!append) return false;
    std::ifstream probe(path, std::ios::binary);
    return probe.good() && probe.peek() != std::ifstream::traits_type::eof();
  }();
  out_.open(path, std::ios::binary | (append ? std::ios::app : std::ios::trunc));
  if (!out_) throw DataError("cannot open instance file for writing: " + path);
  if (!exists_nonempty) out_ << kSchemaHeader << '\n';
}

void InstanceWriter::write(const StoryInstance& instance) {
  out_ << instance_to_json_line(instance) << '\n';
  if (!out_) throw DataError("short write on instance file: " + path_);
  ++written_;
}

void InstanceWriter::flush() { out_.flush(); }

InstanceReader::InstanceReader(const std::string& path, bool lenient)
    : path_(path), lenient_(lenient) {
  in_.open(path, std::ios::binary);
  if (!in_) throw DataError("cannot open instance file: " + path);
  std::string header;
  if (!std::getline(in_, header)) throw DataError(path + ": empty instance file (missing header)");
  ++line_no_;
  try {
    const auto j = nlohmann::json::parse(header);
    if (j.value("schema", "") != "storyaudit.instances")
      throw DataError(path + ":1: not a storyaudit instance file");
    if (j.value("version", 0) != 1)
      throw DataError(path + ":1: unsupported instance schema version");
  } catch (const nlohmann::json::parse_error&) {
    throw DataError(path + ":1: missing schema header line");
  }
}

std::optional<StoryInstance> InstanceReader::next() {
  std::string line;
  while (std::getline(in_, line)) {
    ++line_no_;
    if (line.empty()) continue;
    try {
      return instance_from_json_line(line, path_ + ":" + std::to_string(line_no_));
    } catch (const DataError&) {
      if (lenient_) return std::nullopt;  // readable up to the fault
      throw;
    }
  }
  return std::nullopt;
}

void write_instances(const std::vector<StoryInstance>& instances, const std::string& path) {
  InstanceWriter writer(path);
  for (const auto& instance : instances) writer.write(instance);
  writer.flush();
}

std::vector<StoryInstance> read_instances(const std::string& path, bool lenient) {
  std::vector<StoryInstance> out;
  InstanceReader reader(path, lenient);
  while (auto instance = reader.next()) out.push_back(std::move(*instance));
  return out;
}

void for_each_instance(const std::string& path,
                       const std::function<void(const StoryInstance&)>& fn, bool lenient) {
  InstanceReader reader(path, lenient);
  while (auto instance = reader.next()) fn(*instance);
}

}  // namespace storyaudit
