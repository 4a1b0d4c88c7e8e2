#include "pas/profile/builder.hpp"

#include <cmath>
#include <numbers>

#include "pas/attributes.hpp"
#include "pas/error.hpp"
#include "pas/util/hash.hpp"

namespace pas::profile {

using nlohmann::json;

namespace {

constexpr const char* kDemographicKeys[] = {"name",       "age",           "gender",
                                            "ethnicity",  "address",       "occupation",
                                            "annual_income", "education", "marital_status"};

// Places other than home sit a few kilometres away on a bearing fixed by the
// place label, so the same label always lands on the same spot.
GeoPoint place_point(const GeoPoint& home, const std::string& place) {
  if (place == "home") return home;
  const auto h = util::fnv1a64(place);
  const double bearing = static_cast<double>(h % 360) * std::numbers::pi / 180.0;
  const double km = 2.0 + static_cast<double>((h >> 16) % 600) / 100.0;
  const double dlat = km / 111.32 * std::cos(bearing);
  const double dlon =
      km / (111.32 * std::max(0.01, std::cos(home.latitude * std::numbers::pi / 180.0))) *
      std::sin(bearing);
  GeoPoint p{home.latitude + dlat, home.longitude + dlon};
  p.latitude = std::clamp(p.latitude, -90.0, 90.0);
  if (p.longitude > 180.0) p.longitude -= 360.0;
  if (p.longitude < -180.0) p.longitude += 360.0;
  return p;
}

}  // namespace

json account_attributes(const json& fields, const std::optional<std::string>& urbanization) {
  json out = json::object();
  for (const char* k : kDemographicKeys) {
    if (fields.contains(k)) out[k] = fields[k];
  }
  if (fields.contains("age") && fields["age"].is_number()) {
    out["age_level"] = std::string(age_level(fields["age"].get<int>()));
  }
  if (fields.contains("gender") && fields["gender"].is_string()) {
    const auto g = gender_level(fields["gender"].get<std::string>());
    out["gender_level"] = g ? json(std::string(*g)) : json(nullptr);
  }
  out["urbanization"] = urbanization ? json(*urbanization) : json(nullptr);
  if (fields.contains("annual_income") && fields["annual_income"].is_number()) {
    out["income_level"] = std::string(income_level(fields["annual_income"].get<double>()));
  }
  if (fields.contains("education") && fields["education"].is_string()) {
    const auto e = education_level(fields["education"].get<std::string>());
    out["education_level"] = e ? json(std::string(*e)) : json(nullptr);
  }
  return out;
}

BrowserProfile build_browser_profile(const json& fields, const LongitudinalData& data,
                                     const Geocoder& geocoder, const RegionTable& regions,
                                     const BuildOptions& options) {
  if (data.history.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "longitudinal data missing");
  }
  BrowserProfile p;
  const std::string address = fields.value("address", std::string());
  std::optional<Geocoder::Entry> hit;
  if (!address.empty()) hit = geocoder.lookup(address);
  if (hit) {
    p.geolocation = hit->point;
  } else {
    p.geolocation = options.default_location;
    p.warnings.push_back("geocode_fallback");
  }
  p.account_attributes =
      account_attributes(fields, hit ? hit->urbanization : std::optional<std::string>());
  p.ip_region = regions.nearest(p.geolocation).code;
  p.user_agent = data.user_agent;
  p.device_class = data.device_class;
  p.history = normalize_history(data.history);
  if (p.history.empty()) throw Error(ErrorCode::kInvalidArgument, "longitudinal data missing");
  p.schedule = data.schedule;
  for (auto& e : p.schedule) e.coordinates = place_point(p.geolocation, e.place);
  p.validate();
  return p;
}

}  // namespace pas::profile
