#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pas/profile/browser_profile.hpp"

namespace pas::profile {

// Offline city table. CSV columns: city,lat,lon[,urbanization]; the city
// field is a locality such as "Atlanta, GA". Lines starting with '#' are
// comments.
class Geocoder {
 public:
  struct Entry {
    std::string locality;
    GeoPoint point;
    std::optional<std::string> urbanization;
  };

  static Geocoder load(const std::string& path);
  static Geocoder load_default();
  explicit Geocoder(std::vector<Entry> entries);

  // Longest table locality contained in the address; nullopt on a miss.
  // Empty address throws kInvalidArgument.
  std::optional<Entry> lookup(std::string_view address) const;
  // Throws kNotFound on a miss.
  GeoPoint geocode(std::string_view address) const;

  const std::vector<Entry>& entries() const { return entries_; }

 private:
  std::vector<Entry> entries_;
};

// IP region table. CSV columns: region,lat,lon.
class RegionTable {
 public:
  struct Region {
    std::string code;
    GeoPoint point;
  };

  static RegionTable load(const std::string& path);
  static RegionTable load_default();
  explicit RegionTable(std::vector<Region> regions);

  // Nearest region by great-circle distance; ties go to the earlier row.
  const Region& nearest(const GeoPoint& p) const;
  std::optional<GeoPoint> find(std::string_view code) const;
  const std::vector<Region>& regions() const { return regions_; }

 private:
  std::vector<Region> regions_;
};

// Quote-aware split of a single CSV line (RFC 4180 quoting, no embedded
// newlines).
std::vector<std::string> split_csv_line(std::string_view line);

}  // namespace pas::profile
