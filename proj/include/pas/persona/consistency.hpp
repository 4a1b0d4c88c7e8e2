#pragma once

#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pas/persona/persona.hpp"
#include "pas/profile/geocoder.hpp"

namespace pas::persona {

// Fields that carry the attribute itself (age -> {"age"}, ...).
std::set<std::string> attribute_fields(AttributeKind kind);

// Fields that may change alongside the attribute:
//   income    -> occupation, annual_income
//   age       -> age, occupation, annual_income, education
//   gender    -> gender
//   location  -> address
//   education -> education
std::set<std::string> coherence_set(AttributeKind kind);

struct FieldChange {
  enum class Role { kAttribute, kCoherence, kOutside };
  std::string field;
  nlohmann::json before;
  nlohmann::json after;
  Role role = Role::kOutside;
};

std::string_view to_string(FieldChange::Role r);

struct ConsistencyReport {
  std::vector<FieldChange> changes;
  // The variant's fields classify into its declared level.
  bool level_matches = true;
  std::vector<std::string> guardrail_violations;
  bool pass = true;

  std::vector<std::string> offending_fields() const;
};

// Optional plausibility checks. Income must sit inside the declared level's
// band for income variants; a changed address must resolve in the geocoder
// table (and match the level's urbanization when the table records it).
struct Guardrails {
  const profile::Geocoder* geocoder = nullptr;
  bool check_income_band = true;
};

ConsistencyReport validate_variant_consistency(const BasePersona& base,
                                               const PersonaVariant& variant,
                                               AttributeKind attribute,
                                               const Guardrails& guardrails = {});

nlohmann::json to_json(const ConsistencyReport& report);

}  // namespace pas::persona
