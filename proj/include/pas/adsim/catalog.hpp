#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "pas/attributes.hpp"

namespace pas::adsim {

inline constexpr int kCatalogVersion = 1;

struct AdCreative {
  std::string id;
  std::string caption;
  std::string markup;  // carries aria-label="Advertisement"
  std::map<AttributeKind, double> affinity;  // ground-truth anchors in [0, 100]
  std::string price_tier;
  std::vector<std::string> topics;
};

struct SiteProfile {
  std::string id;
  std::string title;
  // Per-attribute multiplier on the selection logit; missing means 1.
  std::map<AttributeKind, double> topic_weights;

  double weight(AttributeKind kind) const;
};

class Catalog {
 public:
  static Catalog load(const std::string& path);
  static std::shared_ptr<const Catalog> load_default();

  // Throws kInvalidArgument: duplicate ids, markup without the label,
  // affinity outside [0, 100] or missing for an attribute.
  void validate() const;

  const std::vector<AdCreative>& creatives() const { return creatives_; }
  const std::map<std::string, SiteProfile>& sites() const { return sites_; }
  const AdCreative& creative(std::string_view id) const;  // kNotFound
  const SiteProfile& site(std::string_view id) const;     // kNotFound

  Catalog(std::vector<AdCreative> creatives, std::map<std::string, SiteProfile> sites);

 private:
  std::vector<AdCreative> creatives_;
  std::map<std::string, SiteProfile> sites_;
};

}  // namespace pas::adsim
