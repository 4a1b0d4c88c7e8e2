#include "pas/profile/geocoder.hpp"

#include <limits>
#include <sstream>

#include "pas/error.hpp"
#include "pas/util/config_paths.hpp"
#include "pas/util/text.hpp"

namespace pas::profile {

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else if (c != '\r') {
      fields.back() += c;
    }
  }
  if (quoted) throw Error(ErrorCode::kInvalidArgument, "csv: unterminated quote");
  for (auto& f : fields) f = std::string(util::trim(f));
  return fields;
}

namespace {

// Data rows of a table file; the first non-comment line is the header and
// must start with `first_column`.
std::vector<std::vector<std::string>> read_table(const std::string& path,
                                                 std::string_view first_column,
                                                 std::size_t min_columns) {
  std::istringstream in(util::read_file(path));
  std::vector<std::vector<std::string>> rows;
  std::string line;
  bool header = false;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = util::trim(line);
    if (t.empty() || t.front() == '#') continue;
    auto fields = split_csv_line(t);
    if (!header) {
      if (fields.empty() || util::to_lower(fields[0]) != first_column) {
        throw Error(ErrorCode::kInvalidArgument,
                    path + ": header must start with '" + std::string(first_column) + "'");
      }
      header = true;
      continue;
    }
    if (fields.size() < min_columns) {
      throw Error(ErrorCode::kInvalidArgument,
                  path + ":" + std::to_string(line_no) + ": too few columns");
    }
    rows.push_back(std::move(fields));
  }
  return rows;
}

GeoPoint parse_point(const std::vector<std::string>& row, const std::string& where) {
  try {
    GeoPoint p{std::stod(row[1]), std::stod(row[2])};
    if (!p.in_bounds()) throw std::out_of_range("bounds");
    return p;
  } catch (const std::exception&) {
    throw Error(ErrorCode::kInvalidArgument, where + ": bad coordinates for '" + row[0] + "'");
  }
}

}  // namespace

Geocoder::Geocoder(std::vector<Entry> entries) : entries_(std::move(entries)) {}

Geocoder Geocoder::load(const std::string& path) {
  std::vector<Entry> entries;
  for (const auto& row : read_table(path, "city", 3)) {
    Entry e{row[0], parse_point(row, path), std::nullopt};
    if (row.size() > 3 && !row[3].empty()) e.urbanization = row[3];
    entries.push_back(std::move(e));
  }
  return Geocoder(std::move(entries));
}

Geocoder Geocoder::load_default() {
  return load(util::join_path(util::default_config_dir(), "geocoder.csv"));
}

std::optional<Geocoder::Entry> Geocoder::lookup(std::string_view address) const {
  if (util::trim(address).empty()) {
    throw Error(ErrorCode::kInvalidArgument, "geocode: address is empty");
  }
  const Entry* best = nullptr;
  for (const auto& e : entries_) {
    // "Atlanta, GA" also matches "Atlanta GA".
    std::string bare = e.locality;
    if (auto comma = bare.find(','); comma != std::string::npos) bare.erase(comma, 1);
    const bool hit = util::contains_phrase(address, e.locality) ||
                     util::contains_phrase(address, bare);
    if (hit && (!best || e.locality.size() > best->locality.size())) best = &e;
  }
  if (!best) return std::nullopt;
  return *best;
}

GeoPoint Geocoder::geocode(std::string_view address) const {
  auto hit = lookup(address);
  if (!hit) {
    throw Error(ErrorCode::kNotFound, "geocode: unknown locality",
                {{"address", std::string(address)}});
  }
  return hit->point;
}

RegionTable::RegionTable(std::vector<Region> regions) : regions_(std::move(regions)) {
  if (regions_.empty()) throw Error(ErrorCode::kInvalidArgument, "region table is empty");
}

RegionTable RegionTable::load(const std::string& path) {
  std::vector<Region> regions;
  for (const auto& row : read_table(path, "region", 3)) {
    regions.push_back({row[0], parse_point(row, path)});
  }
  return RegionTable(std::move(regions));
}

RegionTable RegionTable::load_default() {
  return load(util::join_path(util::default_config_dir(), "regions.csv"));
}

const RegionTable::Region& RegionTable::nearest(const GeoPoint& p) const {
  const Region* best = &regions_.front();
  double best_km = std::numeric_limits<double>::infinity();
  for (const auto& r : regions_) {
    const double d = haversine_km(p, r.point);
    if (d < best_km) {
      best_km = d;
      best = &r;
    }
  }
  return *best;
}

std::optional<GeoPoint> RegionTable::find(std::string_view code) const {
  for (const auto& r : regions_) {
    if (r.code == code) return r.point;
  }
  return std::nullopt;
}

}  // namespace pas::profile
