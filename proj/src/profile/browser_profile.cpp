#include "pas/profile/browser_profile.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <regex>

#include "pas/error.hpp"

namespace pas::profile {

using nlohmann::json;

bool GeoPoint::in_bounds() const {
  return std::isfinite(latitude) && std::isfinite(longitude) && latitude >= -90.0 &&
         latitude <= 90.0 && longitude >= -180.0 && longitude <= 180.0;
}

double haversine_km(const GeoPoint& a, const GeoPoint& b) {
  constexpr double kEarthRadiusKm = 6371.0088;
  constexpr double kRad = std::numbers::pi / 180.0;
  const double dlat = (b.latitude - a.latitude) * kRad;
  const double dlon = (b.longitude - a.longitude) * kRad;
  const double h = std::sin(dlat / 2) * std::sin(dlat / 2) +
                   std::cos(a.latitude * kRad) * std::cos(b.latitude * kRad) *
                       std::sin(dlon / 2) * std::sin(dlon / 2);
  return 2.0 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(h)));
}

bool valid_url(std::string_view url) {
  static const std::regex kUrl(R"(^https?://[A-Za-z0-9.-]+(:\d+)?(/[^\s]*)?$)");
  return std::regex_match(url.begin(), url.end(), kUrl);
}

std::vector<HistoryRecord> normalize_history(std::vector<HistoryRecord> history) {
  std::vector<HistoryRecord> out;
  out.reserve(history.size());
  for (auto& r : history) {
    std::sort(r.visit_timestamps.begin(), r.visit_timestamps.end());
    r.visit_timestamps.erase(std::unique(r.visit_timestamps.begin(), r.visit_timestamps.end()),
                             r.visit_timestamps.end());
    if (!r.visit_timestamps.empty()) out.push_back(std::move(r));
  }
  std::stable_sort(out.begin(), out.end(), [](const HistoryRecord& a, const HistoryRecord& b) {
    return a.visit_timestamps.front() < b.visit_timestamps.front();
  });
  return out;
}

bool BrowserProfile::has_warning(std::string_view w) const {
  return std::find(warnings.begin(), warnings.end(), w) != warnings.end();
}

void BrowserProfile::validate() const {
  auto fail = [](const std::string& what, json detail = nullptr) {
    throw Error(ErrorCode::kConsistency, "profile: " + what, std::move(detail));
  };
  if (!geolocation.in_bounds()) {
    fail("geolocation out of range", {{"latitude", geolocation.latitude},
                                      {"longitude", geolocation.longitude}});
  }
  if (user_agent.empty()) fail("user_agent is empty");
  for (std::size_t i = 0; i < history.size(); ++i) {
    const auto& r = history[i];
    if (!valid_url(r.url)) fail("history record has invalid url", {{"index", i}, {"url", r.url}});
    if (r.visit_timestamps.empty()) fail("history record has no visits", {{"index", i}});
    for (std::size_t k = 1; k < r.visit_timestamps.size(); ++k) {
      if (r.visit_timestamps[k] <= r.visit_timestamps[k - 1]) {
        fail("visit timestamps not strictly increasing", {{"index", i}});
      }
    }
  }
  for (const auto& e : schedule) {
    if (e.weekday < 0 || e.weekday > 6) fail("schedule weekday out of range");
    if (!e.coordinates.in_bounds()) fail("schedule coordinates out of range");
  }
}

void to_json(json& j, const GeoPoint& p) {
  j = {{"latitude", p.latitude}, {"longitude", p.longitude}};
}

void from_json(const json& j, GeoPoint& p) {
  p.latitude = j.at("latitude").get<double>();
  p.longitude = j.at("longitude").get<double>();
}

void to_json(json& j, const HistoryRecord& r) {
  j = {{"url", r.url}, {"title", r.title}, {"visit_timestamps", r.visit_timestamps}};
}

void from_json(const json& j, HistoryRecord& r) {
  r.url = j.at("url").get<std::string>();
  r.title = j.value("title", std::string());
  r.visit_timestamps = j.at("visit_timestamps").get<std::vector<std::int64_t>>();
}

void to_json(json& j, const ScheduleEntry& e) {
  j = {{"weekday", e.weekday},
       {"start", e.start},
       {"end", e.end},
       {"place", e.place},
       {"coordinates", e.coordinates}};
}

void from_json(const json& j, ScheduleEntry& e) {
  e.weekday = j.at("weekday").get<int>();
  e.start = j.at("start").get<std::string>();
  e.end = j.at("end").get<std::string>();
  e.place = j.at("place").get<std::string>();
  if (j.contains("coordinates")) e.coordinates = j.at("coordinates").get<GeoPoint>();
}

void to_json(json& j, const BrowserProfile& p) {
  j = {{"account_attributes", p.account_attributes},
       {"geolocation", p.geolocation},
       {"ip_region", p.ip_region},
       {"user_agent", p.user_agent},
       {"device_class", p.device_class},
       {"history", p.history},
       {"schedule", p.schedule},
       {"warnings", p.warnings}};
}

void from_json(const json& j, BrowserProfile& p) {
  p.account_attributes = j.value("account_attributes", json::object());
  p.geolocation = j.at("geolocation").get<GeoPoint>();
  p.ip_region = j.value("ip_region", std::string());
  p.user_agent = j.at("user_agent").get<std::string>();
  p.device_class = j.value("device_class", std::string());
  p.history = j.value("history", std::vector<HistoryRecord>{});
  p.schedule = j.value("schedule", std::vector<ScheduleEntry>{});
  p.warnings = j.value("warnings", std::vector<std::string>{});
}

}  // namespace pas::profile
