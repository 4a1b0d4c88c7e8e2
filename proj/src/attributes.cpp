#include "pas/attributes.hpp"

#include <algorithm>
#include <cctype>

#include "pas/error.hpp"
#include "pas/util/text.hpp"

namespace pas {

namespace {

const PrivacyAttribute kAttributes[] = {
    {AttributeKind::kAge, {"young", "mid-aged", "old"}},
    {AttributeKind::kGender, {"male", "non-binary", "female"}},
    {AttributeKind::kLocationUrbanization, {"urban", "suburb", "countryside"}},
    {AttributeKind::kIncomeLevel, {"low", "medium", "high"}},
    {AttributeKind::kEducationLevel, {"low", "medium", "high"}},
};

}  // namespace

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kNotFound: return "NotFound";
    case ErrorCode::kGatewayFailure: return "GatewayFailure";
    case ErrorCode::kRemoteStatus: return "RemoteStatus";
    case ErrorCode::kTimeout: return "Timeout";
    case ErrorCode::kStructuredOutput: return "StructuredOutput";
    case ErrorCode::kUnsupported: return "Unsupported";
    case ErrorCode::kConsistency: return "Consistency";
    case ErrorCode::kIo: return "Io";
    case ErrorCode::kSchemaVersion: return "SchemaVersion";
    case ErrorCode::kTargetUnreachable: return "TargetUnreachable";
    case ErrorCode::kConflict: return "Conflict";
    case ErrorCode::kInternal: return "Internal";
  }
  return "Internal";
}

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kSchemaVersion: return 400;
    case ErrorCode::kNotFound: return 404;
    case ErrorCode::kConflict: return 409;
    case ErrorCode::kConsistency:
    case ErrorCode::kStructuredOutput: return 422;
    case ErrorCode::kUnsupported: return 501;
    case ErrorCode::kGatewayFailure:
    case ErrorCode::kRemoteStatus:
    case ErrorCode::kTargetUnreachable: return 502;
    case ErrorCode::kTimeout: return 504;
    case ErrorCode::kIo:
    case ErrorCode::kInternal: return 500;
  }
  return 500;
}

std::optional<std::size_t> PrivacyAttribute::level_index(
    std::string_view level) const {
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (levels[i] == level) return i;
  }
  return std::nullopt;
}

const PrivacyAttribute& attribute(AttributeKind kind) {
  return kAttributes[static_cast<std::size_t>(kind)];
}

std::string_view key(AttributeKind kind) {
  switch (kind) {
    case AttributeKind::kAge: return "age";
    case AttributeKind::kGender: return "gender";
    case AttributeKind::kLocationUrbanization: return "location";
    case AttributeKind::kIncomeLevel: return "income";
    case AttributeKind::kEducationLevel: return "education";
  }
  return "age";
}

std::string_view display_name(AttributeKind kind) {
  switch (kind) {
    case AttributeKind::kAge: return "age";
    case AttributeKind::kGender: return "gender";
    case AttributeKind::kLocationUrbanization:
      return "urbanization of home location";
    case AttributeKind::kIncomeLevel: return "income level";
    case AttributeKind::kEducationLevel: return "education level";
  }
  return "age";
}

std::optional<AttributeKind> parse_attribute(std::string_view text) {
  const std::string t = util::to_lower(util::trim(text));
  if (t == "age") return AttributeKind::kAge;
  if (t == "gender") return AttributeKind::kGender;
  if (t == "location" || t == "urbanization" || t == "locationurbanization" ||
      t == "location_urbanization" || t == "urbanization of home location")
    return AttributeKind::kLocationUrbanization;
  if (t == "income" || t == "incomelevel" || t == "income_level" ||
      t == "income level")
    return AttributeKind::kIncomeLevel;
  if (t == "education" || t == "edu" || t == "educationlevel" ||
      t == "education_level" || t == "education level")
    return AttributeKind::kEducationLevel;
  return std::nullopt;
}

AttributeKind parse_attribute_or_throw(std::string_view text) {
  if (auto k = parse_attribute(text)) return *k;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown privacy attribute '" + std::string(text) + "'");
}

std::string level_phrase(AttributeKind kind, std::string_view level) {
  switch (kind) {
    case AttributeKind::kAge:
    case AttributeKind::kGender:
      return std::string(level);
    case AttributeKind::kLocationUrbanization:
      return level == "suburb" ? "suburban" : std::string(level);
    case AttributeKind::kIncomeLevel:
      return std::string(level) + "-income";
    case AttributeKind::kEducationLevel:
      return std::string(level) + "-education";
  }
  return std::string(level);
}

std::string_view age_level(int age_years) {
  if (age_years < 35) return "young";
  if (age_years < 60) return "mid-aged";
  return "old";
}

std::optional<std::string_view> gender_level(std::string_view label) {
  const std::string t = util::to_lower(util::trim(label));
  if (t == "male" || t == "man" || t == "m") return "male";
  if (t == "female" || t == "woman" || t == "f") return "female";
  if (t == "non-binary" || t == "nonbinary" || t == "non binary" ||
      t == "enby")
    return "non-binary";
  return std::nullopt;
}

std::string_view income_level(double annual_income) {
  if (annual_income < 40000.0) return "low";
  if (annual_income < 110000.0) return "medium";
  return "high";
}

std::pair<double, double> income_band(std::string_view level) {
  if (level == "low") return {0.0, 39999.99};
  if (level == "medium") return {40000.0, 109999.99};
  if (level == "high") return {110000.0, 1.0e7};
  throw Error(ErrorCode::kInvalidArgument,
              "unknown income level '" + std::string(level) + "'");
}

std::optional<std::string_view> education_level(std::string_view label) {
  const std::string t = util::to_lower(label);
  auto has = [&](std::string_view needle) {
    return t.find(needle) != std::string::npos;
  };
  if (has("ph.d") || has("phd") || has("doctor") || has("master") ||
      has("mba") || has("graduate degree") || has("j.d") || has("m.d."))
    return "high";
  if (has("bachelor") || has("associate") || has("college degree") ||
      has("undergraduate"))
    return "medium";
  if (has("high school") || has("ged") || has("diploma") ||
      has("some college") || has("certificat") || has("no degree") ||
      has("trade school"))
    return "low";
  return std::nullopt;
}

void to_json(nlohmann::json& j, AttributeKind kind) { j = std::string(key(kind)); }

void from_json(const nlohmann::json& j, AttributeKind& kind) {
  kind = parse_attribute_or_throw(j.get<std::string>());
}

}  // namespace pas
