#include <fstream>

#include <nlohmann/json.hpp>

#include "storyaudit/extraction.hpp"

namespace storyaudit::extraction {

namespace {
using nlohmann::json;
}

ReplayLabeler::ReplayLabeler(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open labeler replay file: " + path);
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
    if (j.value("schema", "") == "storyaudit.labels") continue;
    if (!j.contains("label_query") || !j.contains("label_response"))
      throw DataError(path + ":" + std::to_string(line_no) +
                      ": record needs label_query and label_response");
    responses_[j["label_query"].get<std::string>()].push_back(
        j["label_response"].get<std::string>());
  }
}

std::optional<std::string> ReplayLabeler::label(const std::string& label_query) {
  auto it = responses_.find(label_query);
  if (it == responses_.end()) return std::nullopt;
  auto& pos = cursor_[label_query];
  if (pos >= it->second.size()) return std::nullopt;
  return it->second[pos++];
}

void write_labeler_replay(const std::vector<std::pair<std::string, std::string>>& records,
                          const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write labeler replay file: " + path);
  out << R"({"schema":"storyaudit.labels","version":1})" << '\n';
  for (const auto& [query, response] : records) {
    json j;
    j["label_query"] = query;
    j["label_response"] = response;
    out << j.dump() << '\n';
  }
}

void apply_characters(StoryInstance& instance, const std::vector<ExtractedCharacter>& characters,
                      bool ambiguous) {
  instance.ambiguous = ambiguous;
  if (!characters.empty()) {
    instance.subject_name = characters[0].name;
    instance.subject_references = characters[0].references;
  }
  if (characters.size() > 1) {
    instance.object_name = characters[1].name;
    instance.object_references = characters[1].references;
  }
}

ExtractReport run_extraction(const std::string& in_path, const std::string& out_path,
                             LabelClient* labeler) {
  ExtractReport report;
  InstanceReader reader(in_path);
  InstanceWriter writer(out_path);
  while (auto instance = reader.next()) {
    ++report.processed;
    if (labeler) {
      const std::string query = build_label_prompt(*instance);
      instance->label_query = query;
      const auto reply = labeler->label(query);
      if (!reply) {
        ++report.parse_errors;  // no reply is equivalent: flagged, never fabricated
        writer.write(*instance);
        continue;
      }
      instance->label_response = reply;
      try {
        const auto outcome = parse_label_response(*reply, *instance);
        apply_characters(*instance, outcome.characters, outcome.ambiguous);
        if (outcome.ambiguous) ++report.ambiguous;
        ++report.labeled;
      } catch (const DataError&) {
        ++report.parse_errors;
      }
    } else {
      const auto characters = heuristic_extract(*instance);
      apply_characters(*instance, characters, false);
      ++report.labeled;
    }
    writer.write(*instance);
  }
  writer.flush();
  return report;
}

}  // namespace storyaudit::extraction
