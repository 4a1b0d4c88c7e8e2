#include "pas/adid/identifier.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <set>

#include "pas/util/hash.hpp"
#include "pas/util/text.hpp"

namespace pas::adid {

using nlohmann::json;

namespace {

// "width: 300px; height:250px" -> value of `prop` in px, if given in px or
// as a bare number.
std::optional<double> style_px(std::string_view style, std::string_view prop) {
  for (const auto& decl : util::split(style, ';')) {
    const auto colon = decl.find(':');
    if (colon == std::string::npos) continue;
    if (util::to_lower(util::trim(std::string_view(decl).substr(0, colon))) != prop) continue;
    std::string value(util::trim(std::string_view(decl).substr(colon + 1)));
    if (value.size() > 2 && value.compare(value.size() - 2, 2, "px") == 0) {
      value.resize(value.size() - 2);
    }
    try {
      std::size_t used = 0;
      const double v = std::stod(value, &used);
      if (used == value.size()) return v;
    } catch (const std::exception&) {
    }
  }
  return std::nullopt;
}

std::optional<double> dimension(const html::Node& n, std::string_view prop) {
  if (const auto* style = n.attribute("style")) {
    if (auto v = style_px(*style, prop)) return v;
  }
  if (const auto* attr = n.attribute(prop)) {
    try {
      return std::stod(*attr);
    } catch (const std::exception&) {
    }
  }
  return std::nullopt;
}

// Offsets come from inline left/top declarations on the element and its
// ancestors; there is no layout engine.
double offset(const html::Node& n, std::string_view prop) {
  double total = 0.0;
  for (const html::Node* p = &n; p; p = p->parent()) {
    if (!p->is_element()) continue;
    if (const auto* style = p->attribute("style")) {
      if (auto v = style_px(*style, prop)) total += *v;
    }
  }
  return total;
}

bool label_matches(const std::string& value, const IdentifyOptions& o) {
  if (o.case_sensitive) return value == o.label;
  return util::to_lower(value) == util::to_lower(o.label);
}

}  // namespace

std::vector<AdRegion> identify_ads(const html::Document& doc, std::string_view page_url,
                                   const IdentifyOptions& options) {
  std::vector<AdRegion> out;
  if (!doc.root) return out;
  html::for_each_element(*doc.root, [&](const html::Node& n) {
    const auto* label = n.attribute(options.attribute);
    if (!label || !label_matches(*label, options)) return;
    AdRegion r;
    r.page_url = std::string(page_url);
    r.element_path = n.path();
    r.slot_key = slot_key(page_url, r.element_path);
    r.markup = n.outer_html();
    const auto w = dimension(n, "width");
    const auto h = dimension(n, "height");
    r.bounding_box = {offset(n, "left"), offset(n, "top"),
                      w && *w > 0 ? *w : options.default_width,
                      h && *h > 0 ? *h : options.default_height};
    if (!w || !h || *w <= 0 || *h <= 0) r.warnings.push_back("bbox_default");
    out.push_back(std::move(r));
  });
  return out;
}

std::string normalize_page_url(std::string_view url) {
  const auto cut = url.find_first_of("?#");
  return std::string(url.substr(0, cut));
}

std::string slot_key(std::string_view page_url, std::string_view element_path) {
  return util::sha256_hex(normalize_page_url(page_url) + "|" + std::string(element_path))
      .substr(0, 16);
}

std::vector<Slot> dedupe_slots(const std::vector<AdRegion>& regions) {
  std::map<std::string, Slot> by_key;
  std::map<std::string, std::set<SlotPayload>> payloads;
  for (const auto& r : regions) {
    const auto key = r.slot_key.empty() ? slot_key(r.page_url, r.element_path) : r.slot_key;
    auto [it, inserted] = by_key.try_emplace(key);
    if (inserted) {
      it->second.slot_key = key;
      it->second.page_url = normalize_page_url(r.page_url);
      it->second.element_path = r.element_path;
    }
    payloads[key].insert({r.round, r.markup});
  }
  std::vector<Slot> out;
  out.reserve(by_key.size());
  for (auto& [key, slot] : by_key) {
    const auto& p = payloads[key];
    slot.payloads.assign(p.begin(), p.end());
    out.push_back(std::move(slot));
  }
  return out;
}

std::vector<AdRegion> flatten_slots(const std::vector<Slot>& slots) {
  std::vector<AdRegion> out;
  for (const auto& s : slots) {
    for (const auto& p : s.payloads) {
      AdRegion r;
      r.page_url = s.page_url;
      r.element_path = s.element_path;
      r.slot_key = s.slot_key;
      r.markup = p.markup;
      r.round = p.round;
      out.push_back(std::move(r));
    }
  }
  return out;
}

void to_json(json& j, const BoundingBox& b) {
  j = {{"x", b.x}, {"y", b.y}, {"width", b.width}, {"height", b.height}};
}

void from_json(const json& j, BoundingBox& b) {
  b.x = j.at("x").get<double>();
  b.y = j.at("y").get<double>();
  b.width = j.at("width").get<double>();
  b.height = j.at("height").get<double>();
}

void to_json(json& j, const AdRegion& r) {
  j = {{"page_url", r.page_url}, {"element_path", r.element_path},
       {"bounding_box", r.bounding_box}, {"slot_key", r.slot_key},
       {"markup", r.markup}, {"round", r.round}, {"warnings", r.warnings}};
}

void from_json(const json& j, AdRegion& r) {
  r.page_url = j.at("page_url").get<std::string>();
  r.element_path = j.at("element_path").get<std::string>();
  r.bounding_box = j.at("bounding_box").get<BoundingBox>();
  r.slot_key = j.at("slot_key").get<std::string>();
  r.markup = j.value("markup", std::string());
  r.round = j.value("round", 0);
  r.warnings = j.value("warnings", std::vector<std::string>{});
}

void to_json(json& j, const Slot& s) {
  json payloads = json::array();
  for (const auto& p : s.payloads) payloads.push_back({{"round", p.round}, {"markup", p.markup}});
  j = {{"slot_key", s.slot_key}, {"page_url", s.page_url},
       {"element_path", s.element_path}, {"payloads", payloads}};
}

}  // namespace pas::adid
