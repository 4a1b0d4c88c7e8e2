#include "pas/persona/consistency.hpp"

namespace pas::persona {

using nlohmann::json;

std::set<std::string> attribute_fields(AttributeKind kind) {
  switch (kind) {
    case AttributeKind::kAge: return {"age"};
    case AttributeKind::kGender: return {"gender"};
    case AttributeKind::kLocationUrbanization: return {"address"};
    case AttributeKind::kIncomeLevel: return {"annual_income"};
    case AttributeKind::kEducationLevel: return {"education"};
  }
  return {};
}

std::set<std::string> coherence_set(AttributeKind kind) {
  auto fields = attribute_fields(kind);
  if (kind == AttributeKind::kIncomeLevel) {
    fields.insert("occupation");
  } else if (kind == AttributeKind::kAge) {
    fields.insert({"occupation", "annual_income", "education"});
  }
  return fields;
}

std::string_view to_string(FieldChange::Role r) {
  switch (r) {
    case FieldChange::Role::kAttribute: return "attribute";
    case FieldChange::Role::kCoherence: return "coherence";
    case FieldChange::Role::kOutside: return "outside";
  }
  return "outside";
}

std::vector<std::string> ConsistencyReport::offending_fields() const {
  std::vector<std::string> out;
  for (const auto& c : changes) {
    if (c.role == FieldChange::Role::kOutside) out.push_back(c.field);
  }
  return out;
}

namespace {

bool same_value(const json& a, const json& b) {
  if (a.is_number() && b.is_number()) return a.get<double>() == b.get<double>();
  return a == b;
}

std::optional<std::string> observed_level(AttributeKind kind, const json& f,
                                          const profile::Geocoder* geocoder) {
  switch (kind) {
    case AttributeKind::kAge:
      if (f.contains("age") && f["age"].is_number()) {
        return std::string(age_level(f["age"].get<int>()));
      }
      break;
    case AttributeKind::kGender:
      if (f.contains("gender") && f["gender"].is_string()) {
        if (auto g = gender_level(f["gender"].get<std::string>())) return std::string(*g);
      }
      break;
    case AttributeKind::kLocationUrbanization:
      if (geocoder && f.contains("address") && f["address"].is_string()) {
        const auto addr = f["address"].get<std::string>();
        if (!addr.empty()) {
          if (auto hit = geocoder->lookup(addr); hit && hit->urbanization) return hit->urbanization;
        }
      }
      break;
    case AttributeKind::kIncomeLevel:
      if (f.contains("annual_income") && f["annual_income"].is_number()) {
        return std::string(income_level(f["annual_income"].get<double>()));
      }
      break;
    case AttributeKind::kEducationLevel:
      if (f.contains("education") && f["education"].is_string()) {
        if (auto e = education_level(f["education"].get<std::string>())) return std::string(*e);
      }
      break;
  }
  return std::nullopt;
}

}  // namespace

ConsistencyReport validate_variant_consistency(const BasePersona& base,
                                               const PersonaVariant& variant,
                                               AttributeKind attribute,
                                               const Guardrails& guardrails) {
  ConsistencyReport report;
  const json before = base.fields();
  const json& after = variant.derived_fields;
  const auto own = attribute_fields(attribute);
  const auto coherent = coherence_set(attribute);

  for (auto field : kDemographicFields) {
    const std::string k(field);
    const json b = before.contains(k) ? before[k] : json(nullptr);
    const json a = after.contains(k) ? after[k] : json(nullptr);
    // An empty optional field and a missing one are the same thing.
    auto blank = [](const json& v) { return v.is_null() || (v.is_string() && v.get<std::string>().empty()); };
    if (same_value(a, b) || (blank(a) && blank(b))) continue;
    FieldChange c{k, b, a, FieldChange::Role::kOutside};
    if (own.count(k)) {
      c.role = FieldChange::Role::kAttribute;
    } else if (coherent.count(k)) {
      c.role = FieldChange::Role::kCoherence;
    }
    report.changes.push_back(std::move(c));
  }

  if (variant.attribute != attribute || !pas::attribute(attribute).has_level(variant.level)) {
    report.level_matches = false;
  } else if (auto seen = observed_level(attribute, after, guardrails.geocoder)) {
    report.level_matches = *seen == variant.level;
  }

  if (guardrails.check_income_band && attribute == AttributeKind::kIncomeLevel &&
      after.contains("annual_income") && after["annual_income"].is_number()) {
    const auto [lo, hi] = income_band(variant.level);
    const double v = after["annual_income"].get<double>();
    if (v < lo || v > hi) report.guardrail_violations.push_back("annual_income outside level band");
  }
  if (after.contains("annual_income") && after["annual_income"].is_number() &&
      after["annual_income"].get<double>() < 0) {
    report.guardrail_violations.push_back("annual_income negative");
  }
  if (guardrails.geocoder && after.contains("address") && after["address"].is_string()) {
    const auto addr = after["address"].get<std::string>();
    const bool changed = !before.contains("address") || before["address"] != after["address"];
    if (changed && (addr.empty() || !guardrails.geocoder->lookup(addr))) {
      report.guardrail_violations.push_back("address not in geocoder table");
    }
  }

  report.pass = report.offending_fields().empty() && report.level_matches &&
                report.guardrail_violations.empty();
  return report;
}

json to_json(const ConsistencyReport& r) {
  json changes = json::array();
  for (const auto& c : r.changes) {
    changes.push_back({{"field", c.field},
                       {"before", c.before},
                       {"after", c.after},
                       {"role", std::string(to_string(c.role))}});
  }
  return {{"changes", changes},
          {"level_matches", r.level_matches},
          {"guardrail_violations", r.guardrail_violations},
          {"offending_fields", r.offending_fields()},
          {"pass", r.pass}};
}

}  // namespace pas::persona
