#pragma once

#include <nlohmann/json.hpp>

#include "pas/profile/browser_profile.hpp"
#include "pas/profile/geocoder.hpp"

namespace pas::profile {

struct BuildOptions {
  // Used when the address is not in the geocoder table; the profile then
  // carries the "geocode_fallback" warning.
  GeoPoint default_location{39.8283, -98.5795};
};

// Materializes demographic fields plus generator output into a complete
// profile. Pure: same inputs, same profile. Throws kInvalidArgument
// ("longitudinal data missing") when the history is empty.
BrowserProfile build_browser_profile(const nlohmann::json& fields,
                                     const LongitudinalData& data,
                                     const Geocoder& geocoder,
                                     const RegionTable& regions,
                                     const BuildOptions& options = {});

// Account attributes carried to the target: the raw demographic fields and
// the level each falls into.
nlohmann::json account_attributes(const nlohmann::json& fields,
                                  const std::optional<std::string>& urbanization);

}  // namespace pas::profile
