#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace storyaudit {

enum class Domain { Learning, Labor, Love };

// Only meaningful for Domain::Love.
enum class LoveSubtype { Partners, Friends, Siblings };

enum class PowerCondition { Neutral, Laden };

// Role a character slot plays under the prompt's power condition.
enum class PowerRole { Baseline, Dominant, Subordinate };

enum class GenderCategory { NonBinary, Feminized, Masculinized, Unspecified, Unsure };

// Unordered gender pair for two-character relationship prompts.
enum class PairCategory { NbNb, NbF, NbM, FF, MM, FM };

enum class RaceCategory { Aian, Asian, Black, Latine, Nhpi, Mena, White };

std::string_view to_string(Domain d);
std::string_view to_string(LoveSubtype s);
std::string_view to_string(PowerCondition c);
std::string_view to_string(PowerRole r);
std::string_view to_string(GenderCategory g);
std::string_view to_string(PairCategory p);
std::string_view to_string(RaceCategory r);

std::optional<Domain> domain_from_string(std::string_view s);
std::optional<PowerCondition> condition_from_string(std::string_view s);
std::optional<RaceCategory> race_from_string(std::string_view s);
std::optional<GenderCategory> gender_from_string(std::string_view s);

// Error carrying a file/line diagnostic for malformed data inputs.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace storyaudit
