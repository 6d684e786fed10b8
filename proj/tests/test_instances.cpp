#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "storyaudit/instances.hpp"
#include "storyaudit/prompts.hpp"

using namespace storyaudit;

namespace {

StoryInstance sample_instance() {
  const auto& prompts = generate_prompts();
  StoryInstance instance;
  instance.model_id = "claude2.0";
  instance.timestamp = 1692180000;
  instance.domain = prompts[0].domain;
  instance.power_condition = prompts[0].condition;
  instance.subject_desc = prompts[0].subject_desc;
  instance.object_desc = prompts[0].object_desc;
  instance.query = prompts[0].text;
  instance.response = "Naomi excelled in arts class. Her murals covered the hall.";
  return instance;
}

struct TempFile {
  std::string path;
  explicit TempFile(std::string p) : path(std::move(p)) {}
  ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("instance round-trip is lossless field for field") {
  TempFile file("instances_roundtrip.jsonl");
  auto a = sample_instance();
  // Exercised with a two-character laden instance holding labels and
  // non-ASCII text.
  const auto* laden = find_prompt_by_id("learning-laden-3");
  REQUIRE(laden);
  StoryInstance b;
  b.model_id = "chatgpt4";
  b.timestamp = 1699000000;
  b.domain = laden->domain;
  b.power_condition = laden->condition;
  b.subject_desc = laden->subject_desc;
  b.object_desc = laden->object_desc;
  b.query = laden->text;
  b.response = "José tutored Mía. He reviewed her conjugations — twice.";
  b.label_query = "label me";
  b.label_response = R"({"star student name": "José"})";
  b.subject_references = {"He", "his"};
  b.object_references = {"her"};
  b.subject_name = "José";
  b.object_name = "Mía";
  b.ambiguous = true;

  write_instances({a, b}, file.path);
  const auto loaded = read_instances(file.path);
  REQUIRE(loaded.size() == 2);
  CHECK(loaded[0] == a);
  CHECK(loaded[1] == b);
}

TEST_CASE("empty responses survive the round trip") {
  TempFile file("instances_empty.jsonl");
  auto a = sample_instance();
  a.response = "";
  write_instances({a}, file.path);
  const auto loaded = read_instances(file.path);
  REQUIRE(loaded.size() == 1);
  CHECK(loaded[0].response.empty());
  CHECK(loaded[0] == a);
}

TEST_CASE("malformed lines raise errors naming the line, lenient mode stops early") {
  TempFile file("instances_bad.jsonl");
  {
    std::ofstream out(file.path, std::ios::binary);
    out << R"({"schema":"storyaudit.instances","version":1})" << '\n';
    out << instance_to_json_line(sample_instance()) << '\n';
    out << "{not json}\n";
    out << instance_to_json_line(sample_instance()) << '\n';
  }
  CHECK_THROWS_WITH_AS(static_cast<void>(read_instances(file.path)),
                       doctest::Contains(":3:"), DataError);
  const auto lenient = read_instances(file.path, /*lenient=*/true);
  CHECK(lenient.size() == 1);  // readable up to the fault
}

TEST_CASE("missing fields name the field in the error") {
  TempFile file("instances_field.jsonl");
  {
    std::ofstream out(file.path, std::ios::binary);
    out << R"({"schema":"storyaudit.instances","version":1})" << '\n';
    out << R"({"model":"m","time":"2023-08-16T00:00:00Z","domain":"learning"})" << '\n';
  }
  CHECK_THROWS_WITH_AS(static_cast<void>(read_instances(file.path)),
                       doctest::Contains("power_dynamic"), DataError);
}

TEST_CASE("a file without the schema header is rejected") {
  TempFile file("instances_noheader.jsonl");
  {
    std::ofstream out(file.path, std::ios::binary);
    out << instance_to_json_line(sample_instance()) << '\n';
  }
  CHECK_THROWS_AS(static_cast<void>(read_instances(file.path)), DataError);
}

TEST_CASE("streaming reader visits records one at a time") {
  TempFile file("instances_stream.jsonl");
  const int kCount = 100000;
  {
    InstanceWriter writer(file.path);
    auto a = sample_instance();
    for (int i = 0; i < kCount; ++i) {
      a.timestamp = 1692180000 + i;
      writer.write(a);
    }
  }
  // One record lives in the visitor at a time; counting a 100K-instance file
  // never materializes it.
  std::int64_t count = 0;
  std::int64_t last_ts = 0;
  for_each_instance(file.path, [&](const StoryInstance& instance) {
    ++count;
    last_ts = instance.timestamp;
  });
  CHECK(count == kCount);
  CHECK(last_ts == 1692180000 + kCount - 1);
}

TEST_CASE("writer in append mode emits the header exactly once") {
  TempFile file("instances_append.jsonl");
  {
    InstanceWriter writer(file.path);
    writer.write(sample_instance());
  }
  {
    InstanceWriter writer(file.path, /*append=*/true);
    writer.write(sample_instance());
  }
  CHECK(read_instances(file.path).size() == 2);
}
