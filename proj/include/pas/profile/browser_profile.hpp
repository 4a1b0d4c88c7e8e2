#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace pas::profile {

struct GeoPoint {
  double latitude = 0.0;   // degrees
  double longitude = 0.0;  // degrees

  bool in_bounds() const;
  bool operator==(const GeoPoint&) const = default;
};

// Great-circle distance on a spherical Earth (R = 6371.0088 km).
double haversine_km(const GeoPoint& a, const GeoPoint& b);

struct HistoryRecord {
  std::string url;
  std::string title;
  std::vector<std::int64_t> visit_timestamps;  // epoch milliseconds, ascending

  bool operator==(const HistoryRecord&) const = default;
};

struct ScheduleEntry {
  int weekday = 0;  // 0 = Monday
  std::string start;  // "HH:MM"
  std::string end;
  std::string place;
  GeoPoint coordinates;

  bool operator==(const ScheduleEntry&) const = default;
};

struct BrowserProfile {
  // Demographic keys plus derived level labels (age_level, income_level, ...).
  nlohmann::json account_attributes = nlohmann::json::object();
  GeoPoint geolocation;
  std::string ip_region;
  std::string user_agent;
  std::string device_class;
  std::vector<HistoryRecord> history;
  std::vector<ScheduleEntry> schedule;
  // Non-fatal conditions met while building, e.g. "geocode_fallback".
  std::vector<std::string> warnings;

  bool has_warning(std::string_view w) const;
  // Throws kConsistency naming the first broken invariant.
  void validate() const;
  bool operator==(const BrowserProfile&) const = default;
};

// Raw generator output before it is anchored to coordinates and regions.
struct LongitudinalData {
  std::string user_agent;
  std::string device_class;
  std::vector<HistoryRecord> history;
  std::vector<ScheduleEntry> schedule;  // coordinates ignored
};

bool valid_url(std::string_view url);

// Sorts each record's visits, drops duplicate timestamps and orders the
// records by first visit. Records without visits are dropped.
std::vector<HistoryRecord> normalize_history(std::vector<HistoryRecord> history);

void to_json(nlohmann::json& j, const GeoPoint& p);
void from_json(const nlohmann::json& j, GeoPoint& p);
void to_json(nlohmann::json& j, const HistoryRecord& r);
void from_json(const nlohmann::json& j, HistoryRecord& r);
void to_json(nlohmann::json& j, const ScheduleEntry& e);
void from_json(const nlohmann::json& j, ScheduleEntry& e);
void to_json(nlohmann::json& j, const BrowserProfile& p);
void from_json(const nlohmann::json& j, BrowserProfile& p);

}  // namespace pas::profile
