#include "pas/persona/persona.hpp"

#include <set>

#include "pas/error.hpp"
#include "pas/util/hash.hpp"

namespace pas::persona {

using nlohmann::json;

json BasePersona::fields() const {
  return {{"name", name},
          {"age", age},
          {"gender", gender},
          {"ethnicity", ethnicity},
          {"address", address},
          {"occupation", occupation},
          {"annual_income", annual_income},
          {"education", education},
          {"interests", interests},
          {"marital_status", marital_status}};
}

BasePersona BasePersona::from_fields(const json& f) {
  BasePersona p;
  try {
    p.name = f.at("name").get<std::string>();
    p.age = f.at("age").get<int>();
    p.gender = f.at("gender").get<std::string>();
    p.ethnicity = f.at("ethnicity").get<std::string>();
    p.address = f.at("address").get<std::string>();
    p.occupation = f.at("occupation").get<std::string>();
    p.annual_income = f.at("annual_income").get<double>();
    p.education = f.at("education").get<std::string>();
    p.interests = f.at("interests").get<std::vector<std::string>>();
    p.marital_status = f.value("marital_status", std::string());
    p.description = f.value("description", std::string());
    p.guidance = f.value("guidance", std::string());
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kStructuredOutput, std::string("persona fields: ") + e.what(),
                {{"raw", f.dump()}});
  }
  return p;
}

void BasePersona::validate() const {
  std::vector<std::string> empty;
  const auto f = fields();
  for (const auto& [k, v] : f.items()) {
    if (v.is_string() && v.get<std::string>().empty() && k != "marital_status") {
      empty.push_back(k);
    }
  }
  if (interests.empty()) empty.push_back("interests");
  if (age <= 0 || annual_income < 0.0 || !empty.empty()) {
    throw Error(ErrorCode::kConsistency, "base persona is incomplete",
                {{"age", age}, {"annual_income", annual_income}, {"empty_fields", empty}});
  }
}

std::string BasePersona::compute_id() const {
  json j = fields();
  j["guidance"] = guidance;
  return "bp-" + util::sha256_hex(j.dump()).substr(0, 12);
}

void PersonaSet::validate() const {
  const auto& attr = pas::attribute(attribute);
  std::set<std::string> seen;
  bool ok = variants.size() == kLevelsPerAttribute;
  for (const auto& v : variants) {
    ok = ok && v.attribute == attribute && attr.has_level(v.level) && seen.insert(v.level).second;
  }
  if (!ok) {
    json levels = json::array();
    for (const auto& v : variants) levels.push_back(v.level);
    throw Error(ErrorCode::kConsistency, "persona set needs one variant per level",
                {{"attribute", attribute}, {"levels", levels}});
  }
}

const PersonaVariant& PersonaSet::variant(std::string_view level) const {
  for (const auto& v : variants) {
    if (v.level == level) return v;
  }
  throw Error(ErrorCode::kNotFound, "persona set has no level '" + std::string(level) + "'");
}

std::string persona_set_id(const BasePersona& base, AttributeKind attr, std::uint64_t seed) {
  const std::string id = base.id.empty() ? base.compute_id() : base.id;
  return "ps-" + util::sha256_hex(id + "|" + std::string(key(attr)) + "|" + std::to_string(seed))
                     .substr(0, 12);
}

void to_json(json& j, const BasePersona& p) {
  j = p.fields();
  j["id"] = p.id;
  j["description"] = p.description;
  j["guidance"] = p.guidance;
}

void from_json(const json& j, BasePersona& p) {
  p = BasePersona::from_fields(j);
  p.id = j.value("id", std::string());
}

void to_json(json& j, const PersonaVariant& v) {
  j = {{"id", v.id},
       {"base_ref", v.base_ref},
       {"attribute", v.attribute},
       {"level", v.level},
       {"description", v.description},
       {"derived_fields", v.derived_fields},
       {"profile", v.profile ? json(*v.profile) : json(nullptr)}};
}

void from_json(const json& j, PersonaVariant& v) {
  v.id = j.at("id").get<std::string>();
  v.base_ref = j.at("base_ref").get<std::string>();
  v.attribute = j.at("attribute").get<AttributeKind>();
  v.level = j.at("level").get<std::string>();
  v.description = j.value("description", std::string());
  v.derived_fields = j.value("derived_fields", json::object());
  if (j.contains("profile") && !j["profile"].is_null()) {
    v.profile = j["profile"].get<profile::BrowserProfile>();
  } else {
    v.profile.reset();
  }
}

void to_json(json& j, const PersonaSet& s) {
  j = {{"id", s.id},
       {"attribute", s.attribute},
       {"seed", s.seed},
       {"base", s.base},
       {"variants", s.variants}};
}

void from_json(const json& j, PersonaSet& s) {
  s.id = j.at("id").get<std::string>();
  s.attribute = j.at("attribute").get<AttributeKind>();
  s.seed = j.value("seed", std::uint64_t{0});
  s.base = j.at("base").get<BasePersona>();
  s.variants = j.at("variants").get<std::vector<PersonaVariant>>();
}

}  // namespace pas::persona
