#pragma once

#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "pas/html/dom.hpp"

namespace pas::adid {

struct BoundingBox {
  double x = 0.0;
  double y = 0.0;
  double width = 0.0;
  double height = 0.0;

  bool operator==(const BoundingBox&) const = default;
};

struct AdRegion {
  std::string page_url;
  std::string element_path;
  BoundingBox bounding_box;
  std::string slot_key;
  std::string markup;  // outer markup of the labeled element
  int round = 0;
  // "bbox_default" when no size could be read from the markup.
  std::vector<std::string> warnings;

  bool operator==(const AdRegion&) const = default;
};

struct IdentifyOptions {
  std::string attribute = "aria-label";
  std::string label = "Advertisement";
  bool case_sensitive = true;
  // Width/height assumed when neither inline style nor attributes give one.
  double default_width = 300.0;
  double default_height = 250.0;
};

// Every element whose accessibility label equals the configured label,
// including elements inside inline frame documents, in document order.
std::vector<AdRegion> identify_ads(const html::Document& doc, std::string_view page_url,
                                   const IdentifyOptions& options = {});

// Page URL without query string or fragment; rounds of the same page share
// slot keys.
std::string normalize_page_url(std::string_view url);

// First 16 hex digits of SHA-256("<normalized url>|<element path>").
std::string slot_key(std::string_view page_url, std::string_view element_path);

struct SlotPayload {
  int round = 0;
  std::string markup;

  auto operator<=>(const SlotPayload&) const = default;
};

struct Slot {
  std::string slot_key;
  std::string page_url;  // normalized
  std::string element_path;
  std::vector<SlotPayload> payloads;  // sorted by (round, markup)

  bool operator==(const Slot&) const = default;
};

// One entry per slot_key, ordered by key; the result does not depend on the
// input order. Identical (round, markup) payloads collapse.
std::vector<Slot> dedupe_slots(const std::vector<AdRegion>& regions);
std::vector<AdRegion> flatten_slots(const std::vector<Slot>& slots);

void to_json(nlohmann::json& j, const BoundingBox& b);
void from_json(const nlohmann::json& j, BoundingBox& b);
void to_json(nlohmann::json& j, const AdRegion& r);
void from_json(const nlohmann::json& j, AdRegion& r);
void to_json(nlohmann::json& j, const Slot& s);

}  // namespace pas::adid
