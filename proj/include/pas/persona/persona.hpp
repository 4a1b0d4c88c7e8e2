#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pas/attributes.hpp"
#include "pas/profile/browser_profile.hpp"

namespace pas::persona {

// Demographic keys compared when checking a variant against its base.
inline constexpr std::array<std::string_view, 10> kDemographicFields = {
    "name",      "age",        "gender",        "ethnicity", "address",
    "occupation", "annual_income", "education", "interests", "marital_status"};

struct BasePersona {
  std::string id;
  std::string name;
  int age = 0;
  std::string gender;
  std::string ethnicity;
  std::string address;
  std::string occupation;
  double annual_income = 0.0;
  std::string education;
  std::vector<std::string> interests;
  std::string marital_status;
  std::string description;
  std::string guidance;

  // Demographic fields as a JSON object (keys of kDemographicFields).
  nlohmann::json fields() const;
  static BasePersona from_fields(const nlohmann::json& fields);
  // Throws kConsistency: age > 0, income >= 0, demographic strings non-empty.
  void validate() const;
  // Content-derived id ("bp-" + 12 hex digits).
  std::string compute_id() const;

  bool operator==(const BasePersona&) const = default;
};

struct PersonaVariant {
  std::string id;
  std::string base_ref;
  AttributeKind attribute = AttributeKind::kAge;
  std::string level;
  std::string description;
  nlohmann::json derived_fields = nlohmann::json::object();
  std::optional<profile::BrowserProfile> profile;

  bool operator==(const PersonaVariant&) const = default;
};

struct PersonaSet {
  std::string id;
  AttributeKind attribute = AttributeKind::kAge;
  std::uint64_t seed = 0;
  BasePersona base;
  std::vector<PersonaVariant> variants;  // one per level, in level order

  // Throws kConsistency unless there is exactly one variant per level.
  void validate() const;
  const PersonaVariant& variant(std::string_view level) const;

  bool operator==(const PersonaSet&) const = default;
};

std::string persona_set_id(const BasePersona& base, AttributeKind attribute, std::uint64_t seed);

void to_json(nlohmann::json& j, const BasePersona& p);
void from_json(const nlohmann::json& j, BasePersona& p);
void to_json(nlohmann::json& j, const PersonaVariant& v);
void from_json(const nlohmann::json& j, PersonaVariant& v);
void to_json(nlohmann::json& j, const PersonaSet& s);
void from_json(const nlohmann::json& j, PersonaSet& s);

}  // namespace pas::persona
