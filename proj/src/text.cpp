#include "storyaudit/text.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <ctime>

namespace storyaudit::text {

namespace {

bool is_word_char(unsigned char c) { return std::isalnum(c) != 0 || c == '\''; }

bool is_strippable(unsigned char c) {
  // Anything that is not a letter, digit or apostrophe counts as punctuation
  // for edge stripping; apostrophes are stripped at the edges too ("'her'").
  return std::isalnum(c) == 0;
}

}  // namespace

std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string normalize_token(std::string_view token) {
  std::size_t b = 0;
  std::size_t e = token.size();
  while (b < e && is_strippable(static_cast<unsigned char>(token[b]))) ++b;
  while (e > b && is_strippable(static_cast<unsigned char>(token[e - 1]))) --e;
  return to_lower(token.substr(b, e - b));
}

std::vector<std::string> tokenize(std::string_view s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t j = i;
    while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
    if (j > i) out.emplace_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

std::vector<std::string> normalized_tokens(std::string_view s) {
  std::vector<std::string> out;
  for (const auto& tok : tokenize(s)) {
    auto norm = normalize_token(tok);
    if (!norm.empty()) out.push_back(std::move(norm));
  }
  return out;
}

bool occurs_in_tokens(std::string_view candidate, const std::vector<std::string>& story_tokens) {
  const auto want = normalized_tokens(candidate);
  if (want.empty()) return false;
  if (want.size() > story_tokens.size()) return false;
  for (std::size_t i = 0; i + want.size() <= story_tokens.size(); ++i) {
    bool match = true;
    for (std::size_t k = 0; k < want.size(); ++k) {
      if (story_tokens[i + k] != want[k]) {
        match = false;
        break;
      }
    }
    if (match) return true;
  }
  return false;
}

bool occurs_in_story(std::string_view candidate, std::string_view story) {
  return occurs_in_tokens(candidate, normalized_tokens(story));
}

bool contains_whole_word(std::string_view story, std::string_view term) {
  if (term.empty()) return false;
  const std::string hay = to_lower(story);
  const std::string needle = to_lower(term);
  std::size_t pos = 0;
  while ((pos = hay.find(needle, pos)) != std::string::npos) {
    const bool left_ok = pos == 0 || !is_word_char(static_cast<unsigned char>(hay[pos - 1]));
    const std::size_t end = pos + needle.size();
    const bool right_ok = end >= hay.size() || !is_word_char(static_cast<unsigned char>(hay[end]));
    if (left_ok && right_ok) return true;
    ++pos;
  }
  return false;
}

std::uint64_t fnv1a64_combine(std::uint64_t seed, std::string_view data) {
  std::uint64_t h = seed;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::uint64_t fnv1a64(std::string_view data) {
  return fnv1a64_combine(0xcbf29ce484222325ull, data);
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string format_utc(std::int64_t unix_seconds) {
  std::time_t t = static_cast<std::time_t>(unix_seconds);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ", tm.tm_year + 1900,
                tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec);
  return buf;
}

bool parse_utc(std::string_view s, std::int64_t& unix_seconds_out) {
  std::tm tm{};
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, sec = 0;
  if (std::sscanf(std::string(s).c_str(), "%d-%d-%dT%d:%d:%dZ", &y, &mo, &d, &h, &mi, &sec) != 6)
    return false;
  tm.tm_year = y - 1900;
  tm.tm_mon = mo - 1;
  tm.tm_mday = d;
  tm.tm_hour = h;
  tm.tm_min = mi;
  tm.tm_sec = sec;
  std::time_t t = timegm(&tm);
  if (t == static_cast<std::time_t>(-1)) return false;
  unix_seconds_out = static_cast<std::int64_t>(t);
  return true;
}

}  // namespace storyaudit::text
