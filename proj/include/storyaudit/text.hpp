#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace storyaudit::text {

std::string to_lower(std::string_view s);

// Lowercases and strips leading/trailing punctuation; internal apostrophes
// (and any other internal characters) are preserved. "Her," -> "her".
std::string normalize_token(std::string_view token);

// Whitespace-delimited verbatim tokens.
std::vector<std::string> tokenize(std::string_view s);

// normalize_token applied to every whitespace token, empties dropped.
std::vector<std::string> normalized_tokens(std::string_view s);

// Token-boundary occurrence check: the normalized tokens of `candidate`
// appear as a consecutive run within the normalized tokens of `story`.
bool occurs_in_story(std::string_view candidate, std::string_view story);
bool occurs_in_tokens(std::string_view candidate, const std::vector<std::string>& story_tokens);

// Case-insensitive whole-word containment ("gay" matches "gay," but not
// "Gayle"). Multi-word terms match as a phrase.
bool contains_whole_word(std::string_view story, std::string_view term);

std::uint64_t fnv1a64(std::string_view data);
std::uint64_t fnv1a64_combine(std::uint64_t seed, std::string_view data);
std::string hex64(std::uint64_t v);

// Shortest round-trip decimal representation of a double.
std::string format_double(double v);

// ISO-8601 UTC instants, e.g. "2023-08-16T00:00:00Z".
std::string format_utc(std::int64_t unix_seconds);
bool parse_utc(std::string_view s, std::int64_t& unix_seconds_out);

}  // namespace storyaudit::text
