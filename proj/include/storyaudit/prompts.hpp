#pragma once

#include <optional>
#include <string>
#include <vector>

#include "storyaudit/types.hpp"

namespace storyaudit {

enum class CharacterSlot { First, Second };

struct PromptSpec {
  std::string id;  // "<domain>-<condition>-<scenario_index>"
  Domain domain = Domain::Learning;
  std::optional<LoveSubtype> love_subtype;
  PowerCondition condition = PowerCondition::Neutral;
  int scenario_index = 1;  // 1-based within the domain
  std::string subject_desc;
  std::optional<std::string> object_desc;
  std::string text;

  bool two_character() const { return object_desc.has_value(); }
};

// The full corpus of 100 prompts, ordered Learning, Labor, Love; neutral
// before laden; ascending scenario index. Repeated calls return identical
// byte sequences. Throws DataError if the embedded scenario data fails its
// checksum.
const std::vector<PromptSpec>& generate_prompts();

// Power role of a character slot under the prompt's condition. Throws
// std::invalid_argument when the second slot is requested for a
// one-character prompt.
PowerRole role_of(const PromptSpec& spec, CharacterSlot slot);

// Lookup helpers for joining instances back to their prompts.
const PromptSpec* find_prompt_by_id(const std::string& id);
const PromptSpec* find_prompt_by_text(const std::string& text);

// FNV-1a over every prompt text; the frozen value guards the embedded
// scenario resource.
std::uint64_t corpus_checksum();

}  // namespace storyaudit
