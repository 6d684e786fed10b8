#include "storyaudit/types.hpp"

namespace storyaudit {

std::string_view to_string(Domain d) {
  switch (d) {
    case Domain::Learning: return "learning";
    case Domain::Labor: return "labor";
    case Domain::Love: return "love";
  }
  return "?";
}

std::string_view to_string(LoveSubtype s) {
  switch (s) {
    case LoveSubtype::Partners: return "partners";
    case LoveSubtype::Friends: return "friends";
    case LoveSubtype::Siblings: return "siblings";
  }
  return "?";
}

std::string_view to_string(PowerCondition c) {
  return c == PowerCondition::Neutral ? "neutral" : "laden";
}

std::string_view to_string(PowerRole r) {
  switch (r) {
    case PowerRole::Baseline: return "baseline";
    case PowerRole::Dominant: return "dominant";
    case PowerRole::Subordinate: return "subordinate";
  }
  return "?";
}

std::string_view to_string(GenderCategory g) {
  switch (g) {
    case GenderCategory::NonBinary: return "non-binary";
    case GenderCategory::Feminized: return "feminized";
    case GenderCategory::Masculinized: return "masculinized";
    case GenderCategory::Unspecified: return "unspecified";
    case GenderCategory::Unsure: return "unsure";
  }
  return "?";
}

std::string_view to_string(PairCategory p) {
  switch (p) {
    case PairCategory::NbNb: return "NB-NB";
    case PairCategory::NbF: return "NB-F";
    case PairCategory::NbM: return "NB-M";
    case PairCategory::FF: return "F-F";
    case PairCategory::MM: return "M-M";
    case PairCategory::FM: return "F-M";
  }
  return "?";
}

std::string_view to_string(RaceCategory r) {
  switch (r) {
    case RaceCategory::Aian: return "aian";
    case RaceCategory::Asian: return "asian";
    case RaceCategory::Black: return "black";
    case RaceCategory::Latine: return "latine";
    case RaceCategory::Nhpi: return "nhpi";
    case RaceCategory::Mena: return "mena";
    case RaceCategory::White: return "white";
  }
  return "?";
}

std::optional<Domain> domain_from_string(std::string_view s) {
  if (s == "learning") return Domain::Learning;
  if (s == "labor") return Domain::Labor;
  if (s == "love") return Domain::Love;
  return std::nullopt;
}

std::optional<PowerCondition> condition_from_string(std::string_view s) {
  if (s == "neutral") return PowerCondition::Neutral;
  if (s == "laden") return PowerCondition::Laden;
  return std::nullopt;
}

std::optional<RaceCategory> race_from_string(std::string_view s) {
  if (s == "aian") return RaceCategory::Aian;
  if (s == "asian") return RaceCategory::Asian;
  if (s == "black") return RaceCategory::Black;
  if (s == "latine") return RaceCategory::Latine;
  if (s == "nhpi") return RaceCategory::Nhpi;
  if (s == "mena") return RaceCategory::Mena;
  if (s == "white") return RaceCategory::White;
  return std::nullopt;
}

std::optional<GenderCategory> gender_from_string(std::string_view s) {
  if (s == "non-binary") return GenderCategory::NonBinary;
  if (s == "feminized") return GenderCategory::Feminized;
  if (s == "masculinized") return GenderCategory::Masculinized;
  if (s == "unspecified") return GenderCategory::Unspecified;
  if (s == "unsure") return GenderCategory::Unsure;
  return std::nullopt;
}

}  // namespace storyaudit
