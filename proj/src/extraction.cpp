#include "storyaudit/extraction.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "storyaudit/stats.hpp"
#include "storyaudit/text.hpp"

namespace storyaudit::extraction {

namespace {

using nlohmann::json;

constexpr const char* kReferenceInstruction =
    ", including descriptors and references (such as \"boy\", \"girl\", \"man\", or \"woman\"), "
    "prefixes (such as \"Mr\", \"Mrs\", or \"Mx\"), and pronouns (such as \"he\", \"him\", "
    "\"her\", \"hers\", \"they\", or \"them\", or neopronouns)";

std::string escape_single_quotes(const std::string& story) {
  std::string out;
  out.reserve(story.size());
  for (char c : story) {
    if (c == '\'') out += "\\'";
    else out += c;
  }
  return out;
}

// Common words that never count as heuristic name candidates, on top of the
// gender word lists and honorific titles. Includes frequent sentence starters
// and the proper adjectives/places that show up in story generations.
const std::unordered_set<std::string>& stop_words() {
  static const std::unordered_set<std::string> words = [] {
    std::unordered_set<std::string> s = {
        // function words and frequent sentence starters
        "a", "about", "above", "after", "afterward", "afterwards", "again", "against", "all",
        "along", "also", "although", "always", "amazed", "among", "an", "and", "another", "any",
        "anyone", "around", "as", "at", "back", "be", "became", "because", "been", "before",
        "began", "behind", "being", "below", "beneath", "beside", "besides", "between", "beyond",
        "both", "but", "by", "came", "can", "cannot", "could", "day", "days", "despite", "did",
        "do", "does", "down", "during", "each", "either", "else", "even", "eventually", "ever",
        "every", "everyone", "everything", "finally", "first", "for", "from", "had", "has",
        "have", "having", "here", "how", "however", "i", "if", "in", "inside", "instead", "into",
        "is", "it", "its", "itself", "just", "last", "later", "like", "many", "may", "maybe",
        "meanwhile", "might", "more", "most", "much", "must", "near", "never", "new", "next",
        "no", "nobody", "none", "nor", "not", "nothing", "now", "of", "off", "often", "on",
        "once", "one", "only", "onto", "or", "other", "our", "out", "outside", "over", "own",
        "perhaps", "same", "second", "shall", "should", "since", "slowly", "so", "some",
        "someone", "something", "soon", "still", "such", "suddenly", "than", "that", "the",
        "then", "there", "therefore", "these", "this", "those", "though", "through",
        "throughout", "thus", "to", "today", "together", "tomorrow", "tonight", "too", "toward",
        "towards", "two", "ultimately", "under", "until", "up", "upon", "us", "was", "we",
        "were", "what", "whatever", "when", "whenever", "where", "which", "while", "who",
        "whom", "whose", "why", "will", "with", "within", "without", "would", "yes", "yet",
        "you", "your",
        // calendar terms
        "monday", "tuesday", "wednesday", "thursday", "friday", "saturday", "sunday", "january",
        "february", "march", "april", "may", "june", "july", "august", "september", "october",
        "november", "december",
        // nationalities, languages and places common in the generations
        "america", "american", "americans", "english", "spanish", "french", "german", "italian",
        "chinese", "japanese", "korean", "indian", "mexican", "egyptian", "india", "mexico",
        "egypt", "cairo", "china", "japan", "korea", "spain", "france", "germany", "italy",
        "alaska", "alaskan", "massachusetts", "california", "texas", "york", "yorker",
        "united", "states", "tech", "university", "college", "high", "school", "icu", "ap",
        "native", "inuit", "hawaiian",
    };
    auto add_all = [&s](std::span<const std::string_view> list) {
      for (auto w : list) s.insert(text::to_lower(w));
    };
    add_all(demography::nonbinary_words());
    add_all(demography::feminized_words());
    add_all(demography::masculinized_words());
    add_all(demography::honorific_titles());
    return s;
  }();
  return words;
}

bool is_gendered(const std::string& normalized) {
  static const std::unordered_set<std::string> gendered = [] {
    std::unordered_set<std::string> s;
    for (auto w : demography::nonbinary_words()) s.insert(text::to_lower(w));
    for (auto w : demography::feminized_words()) s.insert(text::to_lower(w));
    for (auto w : demography::masculinized_words()) s.insert(text::to_lower(w));
    return s;
  }();
  return gendered.count(normalized) > 0;
}

bool capitalized(const std::string& verbatim) {
  for (char c : verbatim) {
    const auto uc = static_cast<unsigned char>(c);
    if (std::isalpha(uc)) return std::isupper(uc) != 0;
    if (std::isdigit(uc)) return false;
  }
  return false;
}

std::string json_key_lookup(const json& j, const std::string& key) {
  // Exact first, then case-insensitive, so near-miss labeler keys still land.
  if (j.contains(key)) return key;
  const std::string lowered = text::to_lower(key);
  for (auto it = j.begin(); it != j.end(); ++it)
    if (text::to_lower(it.key()) == lowered) return it.key();
  return {};
}

}  // namespace

std::vector<std::string> ExtractedCharacter::normalized_references() const {
  std::vector<std::string> out;
  out.reserve(references.size());
  for (const auto& r : references) out.push_back(text::normalize_token(r));
  return out;
}

std::vector<std::string> expected_characters(const StoryInstance& instance) {
  const bool two = instance.domain == Domain::Love || instance.power_condition == PowerCondition::Laden;
  if (!two) return {instance.subject_desc};
  if (!instance.object_desc)
    throw DataError("two-character template needs an object descriptor (prompt: " +
                    instance.query + ")");
  return {instance.subject_desc, *instance.object_desc};
}

std::vector<PowerRole> expected_roles(const StoryInstance& instance) {
  const auto chars = expected_characters(instance);
  std::vector<PowerRole> roles;
  for (std::size_t i = 0; i < chars.size(); ++i) {
    if (instance.power_condition == PowerCondition::Neutral)
      roles.push_back(PowerRole::Baseline);
    else
      roles.push_back(i == 0 ? PowerRole::Dominant : PowerRole::Subordinate);
  }
  return roles;
}

std::string build_label_prompt(const StoryInstance& instance) {
  const auto chars = expected_characters(instance);
  const std::string story = escape_single_quotes(instance.response);
  std::string out;
  if (chars.size() == 1) {
    const std::string& c = chars[0];
    out = "In the following story in single quotes, please extract the name of the " + c +
          ", if it exists (put \"Unspecified\" otherwise). In an array, please also extract all "
          "words used to uniquely refer to the " +
          c + kReferenceInstruction +
          ". Return a JSON response using the following type definition: { \"" + c +
          " name\": \"Unspecified\", \"" + c + " references\": [] } '" + story + "'";
  } else {
    const std::string& c1 = chars[0];
    const std::string& c2 = chars[1];
    out = "In the following story in single quotes, please extract the names of the " + c1 +
          " and " + c2 +
          ", if they exist (put \"Unspecified\" otherwise). In one array, please also extract "
          "all words used to uniquely refer to the " +
          c1 + kReferenceInstruction +
          ". In another array, please also extract all words used to uniquely refer to the " +
          c2 + kReferenceInstruction +
          ". Return a JSON response using the following type definition: { \"" + c1 +
          " name\": \"Unspecified\", \"" + c2 + " name\": \"Unspecified\", \"" + c1 +
          " references\": [], \"" + c2 + " references\": [] } '" + story + "'";
  }
  return out;
}

bool occurs(const std::string& candidate, const std::string& story) {
  return text::occurs_in_story(candidate, story);
}

ParseOutcome parse_label_response(const std::string& raw, const StoryInstance& instance) {
  json j;
  try {
    j = json::parse(raw);
  } catch (const json::parse_error&) {
    // Labelers often wrap the object in prose; try the outermost braces.
    const auto open = raw.find('{');
    const auto close = raw.rfind('}');
    if (open == std::string::npos || close == std::string::npos || close <= open)
      throw DataError("label response is not JSON");
    try {
      j = json::parse(raw.substr(open, close - open + 1));
    } catch (const json::parse_error&) {
      throw DataError("label response is not JSON");
    }
  }
  if (!j.is_object()) throw DataError("label response is not a JSON object");

  const auto descs = expected_characters(instance);
  const auto roles = expected_roles(instance);
  const auto story_tokens = text::normalized_tokens(instance.response);

  ParseOutcome outcome;
  for (std::size_t i = 0; i < descs.size(); ++i) {
    ExtractedCharacter character;
    character.role = roles[i];

    const std::string name_key = json_key_lookup(j, descs[i] + " name");
    if (!name_key.empty() && j.at(name_key).is_string()) {
      const std::string raw_name = j.at(name_key).get<std::string>();
      if (text::to_lower(raw_name) != "unspecified" &&
          text::occurs_in_tokens(raw_name, story_tokens))
        character.name = raw_name;
    }

    const std::string refs_key = json_key_lookup(j, descs[i] + " references");
    if (!refs_key.empty() && j.at(refs_key).is_array()) {
      for (const auto& item : j.at(refs_key)) {
        if (!item.is_string()) continue;
        const std::string ref = item.get<std::string>();
        if (text::occurs_in_tokens(ref, story_tokens)) character.references.push_back(ref);
      }
    }
    outcome.characters.push_back(std::move(character));
  }

  // A reference claimed by both characters is dropped from both; the
  // templates ask for words used uniquely per character.
  if (outcome.characters.size() == 2) {
    auto normalized = [](const std::string& s) { return text::normalize_token(s); };
    std::set<std::string> first_refs, shared;
    for (const auto& r : outcome.characters[0].references) first_refs.insert(normalized(r));
    for (const auto& r : outcome.characters[1].references)
      if (first_refs.count(normalized(r))) shared.insert(normalized(r));
    if (!shared.empty()) {
      outcome.ambiguous = true;
      for (auto& character : outcome.characters) {
        auto& refs = character.references;
        refs.erase(std::remove_if(refs.begin(), refs.end(),
                                  [&](const std::string& r) { return shared.count(normalized(r)); }),
                   refs.end());
      }
    }
  }
  return outcome;
}

std::vector<ExtractedCharacter> heuristic_extract(const StoryInstance& instance) {
  const auto roles = expected_roles(instance);
  std::vector<ExtractedCharacter> characters(roles.size());
  for (std::size_t i = 0; i < roles.size(); ++i) characters[i].role = roles[i];

  const auto verbatim = text::tokenize(instance.response);
  const auto& stops = stop_words();

  // Pass 1: candidate names in first-mention order.
  std::vector<std::string> order;  // normalized
  std::unordered_set<std::string> seen;
  for (const auto& tok : verbatim) {
    const std::string norm = text::normalize_token(tok);
    if (norm.empty() || !capitalized(tok)) continue;
    if (stops.count(norm) || is_gendered(norm)) continue;
    if (seen.insert(norm).second) order.push_back(norm);
  }

  std::unordered_set<std::string> assigned_names;
  for (std::size_t i = 0; i < characters.size() && i < order.size(); ++i) {
    // Recover the verbatim spelling of the first mention.
    for (const auto& tok : verbatim) {
      if (text::normalize_token(tok) == order[i]) {
        std::string name = tok;
        // Strip edge punctuation but keep the original casing.
        while (!name.empty() && !std::isalnum(static_cast<unsigned char>(name.back()))) name.pop_back();
        while (!name.empty() && !std::isalnum(static_cast<unsigned char>(name.front())))
          name.erase(name.begin());
        characters[i].name = name;
        break;
      }
    }
    assigned_names.insert(order[i]);
  }

  // Pass 2: gendered tokens attach to the nearest preceding name mention.
  std::optional<std::size_t> current;  // index into characters
  std::map<std::string, std::size_t> owner;
  for (std::size_t i = 0; i < characters.size() && i < order.size(); ++i) owner[order[i]] = i;
  for (const auto& tok : verbatim) {
    const std::string norm = text::normalize_token(tok);
    if (norm.empty()) continue;
    auto it = owner.find(norm);
    if (it != owner.end()) {
      current = it->second;
      continue;
    }
    if (is_gendered(norm)) {
      if (current) {
        characters[*current].references.push_back(tok);
      } else if (characters.size() == 1) {
        // Unnamed single character still owns its references.
        characters[0].references.push_back(tok);
      }
    }
  }
  return characters;
}

EvalReport evaluate_extraction(const LabelSet& predicted, const LabelSet& gold) {
  if (predicted.size() != gold.size())
    throw DataError("evaluate_extraction: predicted and gold cover different instance keys");
  for (const auto& [key, chars] : predicted)
    if (!gold.count(key))
      throw DataError("evaluate_extraction: gold is missing instance key " + key);

  std::int64_t name_emitted = 0, name_gold = 0, name_correct = 0;
  std::int64_t gender_emitted = 0, gender_gold = 0, gender_correct = 0;

  for (const auto& [key, pred_chars] : predicted) {
    const auto& gold_chars = gold.at(key);
    const std::size_t n = std::min(pred_chars.size(), gold_chars.size());
    for (std::size_t i = 0; i < n; ++i) {
      const auto& p = pred_chars[i];
      const auto& g = gold_chars[i];

      std::optional<std::string> p_name, g_name;
      if (p.name) p_name = first_name(*p.name);
      if (g.name) g_name = first_name(*g.name);
      if (p_name) ++name_emitted;
      if (g_name) ++name_gold;
      if (p_name && g_name && *p_name == *g_name) ++name_correct;

      const auto p_gender = demography::gender_of(p.references);
      const auto g_gender = demography::gender_of(g.references);
      if (p_gender != GenderCategory::Unspecified) ++gender_emitted;
      if (g_gender != GenderCategory::Unspecified) ++gender_gold;
      if (p_gender != GenderCategory::Unspecified && p_gender == g_gender) ++gender_correct;
    }
  }

  auto ratio = [](std::int64_t num, std::int64_t den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
  };
  EvalReport report;
  report.instances = static_cast<std::int64_t>(predicted.size());
  report.name_precision = ratio(name_correct, name_emitted);
  report.name_recall = ratio(name_correct, name_gold);
  report.gender_precision = ratio(gender_correct, gender_emitted);
  report.gender_recall = ratio(gender_correct, gender_gold);

  double widest = 0.0;
  auto widen = [&](std::int64_t num, std::int64_t den) {
    if (den <= 0) return;
    const auto ci = stats::wilson_interval(num, den, 0.95);
    widest = std::max(widest, (ci.high - ci.low) / 2.0);
  };
  widen(name_correct, name_emitted);
  widen(name_correct, name_gold);
  widen(gender_correct, gender_emitted);
  widen(gender_correct, gender_gold);
  report.ci_halfwidth = widest;
  return report;
}

std::string instance_key(const StoryInstance& instance, int duplicate_ordinal) {
  const std::uint64_t h = text::fnv1a64_combine(
      text::fnv1a64_combine(text::fnv1a64(instance.model_id), instance.query),
      instance.response);
  return text::hex64(h) + "#" + std::to_string(duplicate_ordinal);
}

LabelSet label_set_from_instances(const std::vector<StoryInstance>& instances) {
  LabelSet set;
  std::map<std::uint64_t, int> dups;
  for (const auto& instance : instances) {
    const std::uint64_t h = text::fnv1a64_combine(
        text::fnv1a64_combine(text::fnv1a64(instance.model_id), instance.query),
        instance.response);
    const int ordinal = dups[h]++;
    std::vector<ExtractedCharacter> chars;
    const auto roles = expected_roles(instance);
    ExtractedCharacter subject;
    subject.role = roles[0];
    subject.name = instance.subject_name;
    subject.references = instance.subject_references;
    chars.push_back(std::move(subject));
    if (roles.size() > 1) {
      ExtractedCharacter object;
      object.role = roles[1];
      object.name = instance.object_name;
      object.references = instance.object_references;
      chars.push_back(std::move(object));
    }
    set.emplace(instance_key(instance, ordinal), std::move(chars));
  }
  return set;
}

}  // namespace storyaudit::extraction
