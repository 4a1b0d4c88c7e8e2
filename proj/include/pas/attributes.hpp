#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace pas {

enum class AttributeKind {
  kAge,
  kGender,
  kLocationUrbanization,
  kIncomeLevel,
  kEducationLevel,
};

inline constexpr std::array<AttributeKind, 5> kAllAttributes = {
    AttributeKind::kAge, AttributeKind::kGender,
    AttributeKind::kLocationUrbanization, AttributeKind::kIncomeLevel,
    AttributeKind::kEducationLevel};

inline constexpr std::size_t kLevelsPerAttribute = 3;

// Low end of the alignment axis is level 0, high end is level 2.
struct PrivacyAttribute {
  AttributeKind kind;
  std::array<std::string_view, kLevelsPerAttribute> levels;

  std::string_view low_end() const { return levels.front(); }
  std::string_view high_end() const { return levels.back(); }
  std::optional<std::size_t> level_index(std::string_view level) const;
  bool has_level(std::string_view level) const {
    return level_index(level).has_value();
  }
};

const PrivacyAttribute& attribute(AttributeKind kind);

// Stable machine key ("age", "gender", "location", "income", "education").
std::string_view key(AttributeKind kind);
// Human label used in prompts ("age", "gender", "urbanization of home
// location", "income level", "education level").
std::string_view display_name(AttributeKind kind);

// Accepts the machine key, the enum-style name and a few aliases
// ("urbanization", "edu"); case-insensitive.
std::optional<AttributeKind> parse_attribute(std::string_view text);
// Phrase substituted for the variant-generation prompt's attribute slot
// ("high-income", "young", "suburban", ...).
std::string level_phrase(AttributeKind kind, std::string_view level);
AttributeKind parse_attribute_or_throw(std::string_view text);

// Alignment anchors by level index: 10 / 50 / 90.
inline constexpr std::array<double, kLevelsPerAttribute> kLevelAnchors = {
    10.0, 50.0, 90.0};

// --- level classification of concrete demographic values -------------------

// young < 35 <= mid-aged < 60 <= old
std::string_view age_level(int age_years);
// Maps free-text gender labels ("woman", "Female", "non binary", ...) onto
// the Gender levels; nullopt when unrecognized.
std::optional<std::string_view> gender_level(std::string_view label);
// low < 40k <= medium < 110k <= high
std::string_view income_level(double annual_income);
// Inclusive income band of an IncomeLevel level.
std::pair<double, double> income_band(std::string_view level);
std::optional<std::string_view> education_level(std::string_view label);

void to_json(nlohmann::json& j, AttributeKind kind);
void from_json(const nlohmann::json& j, AttributeKind& kind);

}  // namespace pas
