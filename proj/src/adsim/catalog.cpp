#include "pas/adsim/catalog.hpp"

#include <set>

#include <nlohmann/json.hpp>

#include "pas/error.hpp"
#include "pas/util/config_paths.hpp"
#include "pas/util/text.hpp"

namespace pas::adsim {

using nlohmann::json;

double SiteProfile::weight(AttributeKind kind) const {
  auto it = topic_weights.find(kind);
  return it == topic_weights.end() ? 1.0 : it->second;
}

Catalog::Catalog(std::vector<AdCreative> creatives, std::map<std::string, SiteProfile> sites)
    : creatives_(std::move(creatives)), sites_(std::move(sites)) {}

Catalog Catalog::load(const std::string& path) {
  const auto doc = json::parse(util::read_file(path), nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    throw Error(ErrorCode::kInvalidArgument, "catalog: malformed JSON in " + path);
  }
  const int version = doc.value("version", 0);
  if (version != kCatalogVersion) {
    throw Error(ErrorCode::kSchemaVersion, "catalog version not supported",
                {{"found", version}, {"expected", kCatalogVersion}});
  }
  std::vector<AdCreative> creatives;
  try {
    for (const auto& c : doc.at("creatives")) {
      AdCreative a;
      a.id = c.at("id").get<std::string>();
      a.caption = c.at("caption").get<std::string>();
      a.markup = c.at("markup").get<std::string>();
      for (const auto& [k, v] : c.at("affinity").items()) {
        a.affinity[parse_attribute_or_throw(k)] = v.get<double>();
      }
      a.price_tier = c.value("price_tier", std::string());
      a.topics = c.value("topics", std::vector<std::string>{});
      creatives.push_back(std::move(a));
    }
    std::map<std::string, SiteProfile> sites;
    for (const auto& [id, s] : doc.at("sites").items()) {
      SiteProfile site{id, s.value("title", id), {}};
      const json topics = s.value("topics", json::object());
      for (const auto& [k, v] : topics.items()) {
        site.topic_weights[parse_attribute_or_throw(k)] = v.get<double>();
      }
      sites.emplace(id, std::move(site));
    }
    Catalog cat(std::move(creatives), std::move(sites));
    cat.validate();
    return cat;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, std::string("catalog: ") + e.what());
  }
}

std::shared_ptr<const Catalog> Catalog::load_default() {
  return std::make_shared<const Catalog>(
      load(util::join_path(util::default_config_dir(), "creatives.json")));
}

void Catalog::validate() const {
  if (creatives_.empty()) throw Error(ErrorCode::kInvalidArgument, "catalog has no creatives");
  if (sites_.empty()) throw Error(ErrorCode::kInvalidArgument, "catalog has no sites");
  std::set<std::string> ids;
  for (const auto& c : creatives_) {
    if (!ids.insert(c.id).second) {
      throw Error(ErrorCode::kInvalidArgument, "catalog: duplicate creative id", {{"id", c.id}});
    }
    if (c.markup.find("aria-label=\"Advertisement\"") == std::string::npos) {
      throw Error(ErrorCode::kInvalidArgument, "catalog: creative markup lacks the ad label",
                  {{"id", c.id}});
    }
    for (auto kind : kAllAttributes) {
      auto it = c.affinity.find(kind);
      if (it == c.affinity.end() || !(it->second >= 0.0 && it->second <= 100.0)) {
        throw Error(ErrorCode::kInvalidArgument, "catalog: affinity missing or out of range",
                    {{"id", c.id}, {"attribute", kind}});
      }
    }
  }
  for (const auto& [id, s] : sites_) {
    for (const auto& [k, w] : s.topic_weights) {
      if (!(w >= 0.0)) {
        throw Error(ErrorCode::kInvalidArgument, "catalog: negative topic weight",
                    {{"site", id}});
      }
    }
  }
}

const AdCreative& Catalog::creative(std::string_view id) const {
  for (const auto& c : creatives_) {
    if (c.id == id) return c;
  }
  throw Error(ErrorCode::kNotFound, "unknown creative '" + std::string(id) + "'");
}

const SiteProfile& Catalog::site(std::string_view id) const {
  auto it = sites_.find(std::string(id));
  if (it == sites_.end()) throw Error(ErrorCode::kNotFound, "unknown site '" + std::string(id) + "'");
  return it->second;
}

}  // namespace pas::adsim
