#include "pas/adsim/simulator.hpp"

#include <algorithm>
#include <cmath>

#include "pas/error.hpp"
#include "pas/html/dom.hpp"
#include "pas/profile/profile_document.hpp"
#include "pas/util/hash.hpp"

namespace pas::adsim {

using nlohmann::json;

void SimPolicy::validate() const {
  if (!(bias_strength >= 0.0) || !std::isfinite(bias_strength)) {
    throw Error(ErrorCode::kInvalidArgument, "bias_strength must be >= 0");
  }
  if (slots_per_page < 1) throw Error(ErrorCode::kInvalidArgument, "slots_per_page must be >= 1");
}

void to_json(json& j, const SimPolicy& p) {
  j = {{"bias_strength", p.bias_strength},
       {"slots_per_page", p.slots_per_page},
       {"rng_seed", p.rng_seed}};
}

void from_json(const json& j, SimPolicy& p) {
  p.bias_strength = j.value("bias_strength", 3.0);
  p.slots_per_page = j.value("slots_per_page", 4);
  p.rng_seed = j.value("rng_seed", std::uint64_t{0});
}

namespace {

// Account-attribute key holding each attribute's level label.
const char* level_key(AttributeKind kind) {
  switch (kind) {
    case AttributeKind::kAge: return "age_level";
    case AttributeKind::kGender: return "gender_level";
    case AttributeKind::kLocationUrbanization: return "urbanization";
    case AttributeKind::kIncomeLevel: return "income_level";
    case AttributeKind::kEducationLevel: return "education_level";
  }
  return "";
}

double unit_interval(std::uint64_t seed) {
  return static_cast<double>(util::splitmix64(seed) >> 11) * 0x1p-53;
}

constexpr const char* kHeadlines[] = {
    "City council approves new transit budget",
    "Local bakery wins regional award",
    "Weekend forecast: clear skies and mild temperatures",
    "High school robotics team heads to nationals",
    "Library extends evening hours for the summer",
    "Farmers market returns with record vendor count",
    "Five quick dinners for busy weeknights",
    "How to plan a road trip on a budget",
    "Museum unveils restored mural downtown",
    "Volunteers clean up the riverside trail",
};

}  // namespace

std::map<AttributeKind, double> profile_targets(const profile::BrowserProfile& profile) {
  std::map<AttributeKind, double> out;
  for (auto kind : kAllAttributes) {
    double t = 50.0;
    const auto& attrs = profile.account_attributes;
    if (attrs.contains(level_key(kind)) && attrs[level_key(kind)].is_string()) {
      if (auto idx = attribute(kind).level_index(attrs[level_key(kind)].get<std::string>())) {
        t = kLevelAnchors[*idx];
      }
    }
    out[kind] = t;
  }
  return out;
}

Simulator::Simulator(std::shared_ptr<const Catalog> catalog, SimPolicy policy)
    : catalog_(std::move(catalog)), policy_(policy) {
  if (!catalog_) throw Error(ErrorCode::kInvalidArgument, "simulator needs a catalog");
  policy_.validate();
}

std::vector<double> Simulator::selection_probabilities(
    const std::string& site_id, const std::optional<profile::BrowserProfile>& profile) const {
  const auto& site = catalog_->site(site_id);
  const auto& creatives = catalog_->creatives();
  std::vector<double> logits(creatives.size(), 0.0);
  if (profile && policy_.bias_strength > 0.0) {
    const auto targets = profile_targets(*profile);
    for (std::size_t i = 0; i < creatives.size(); ++i) {
      double match = 0.0;
      for (auto kind : kAllAttributes) {
        const double t = (targets.at(kind) - 50.0) / 40.0;
        const double a = (creatives[i].affinity.at(kind) - 50.0) / 40.0;
        match += site.weight(kind) * t * a;
      }
      logits[i] = policy_.bias_strength * match;
    }
  }
  const double top = *std::max_element(logits.begin(), logits.end());
  std::vector<double> p(logits.size());
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) total += (p[i] = std::exp(logits[i] - top));
  for (auto& v : p) v /= total;
  return p;
}

std::string Simulator::slot_path(int index) {
  return "/html[1]/body[1]/main[1]/div[" + std::to_string(index) + "]/div[1]";
}

ServedPage Simulator::serve_page(const std::string& site_id,
                                 const std::optional<profile::BrowserProfile>& profile,
                                 const std::string& profile_hash, int round) const {
  const auto& site = catalog_->site(site_id);
  const auto probs = selection_probabilities(site_id, profile);
  const auto& creatives = catalog_->creatives();

  ServedPage page;
  page.site_id = site_id;
  page.round = round;
  page.context_id = profile ? profile_hash : std::string(kAnonymousContext);
  const auto context_seed = util::fnv1a64(page.context_id);

  for (int slot = 1; slot <= policy_.slots_per_page; ++slot) {
    const double u = unit_interval(
        util::mix_seed(policy_.rng_seed, context_seed, static_cast<std::uint64_t>(round),
                       static_cast<std::uint64_t>(slot)));
    std::size_t pick = creatives.size() - 1;
    double acc = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
      acc += probs[i];
      if (u < acc) {
        pick = i;
        break;
      }
    }
    page.slots.push_back({slot, creatives[pick].id, slot_path(slot)});
  }

  const std::string title = html::escape_text(site.title);
  std::string out;
  out += "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n<title>";
  out += title + "</title>\n<meta name=\"sandbox-profile-hash\" content=\"";
  out += profile ? html::escape_attribute(profile_hash) : std::string();
  out += "\">\n</head>\n<body>\n<header class=\"site-header\"><h1>" + title +
         "</h1><nav><a href=\"/site/" + html::escape_attribute(site_id) +
         "\">Home</a> <a href=\"/site/" + html::escape_attribute(site_id) +
         "?section=latest\">Latest</a></nav></header>\n<main>\n";
  const auto headline_seed = util::mix_seed(util::fnv1a64(site_id), static_cast<std::uint64_t>(round));
  constexpr std::size_t kHeadlineCount = std::size(kHeadlines);
  for (int slot = 0; slot <= policy_.slots_per_page; ++slot) {
    const auto h = kHeadlines[(headline_seed + static_cast<std::uint64_t>(slot)) % kHeadlineCount];
    out += "<article class=\"story\"><h2>" + std::string(h) +
           "</h2><p>Read the full story from our newsroom.</p></article>\n";
    if (slot < policy_.slots_per_page) {
      const auto& c = catalog_->creative(page.slots[static_cast<std::size_t>(slot)].creative_id);
      out += "<div class=\"ad-slot\" id=\"slot-" + std::to_string(slot + 1) + "\" data-slot=\"" +
             std::to_string(slot + 1) + "\">" + c.markup + "</div>\n";
    }
  }
  out +=
      "</main>\n<footer class=\"site-footer\"><a href=\"/ads/settings\" "
      "aria-label=\"Advertisement settings\">Ad choices</a><p>Simulated site for privacy "
      "audits.</p></footer>\n</body>\n</html>\n";
  page.html = std::move(out);
  return page;
}

const std::map<AttributeKind, double>& Simulator::ground_truth(std::string_view id) const {
  return catalog_->creative(id).affinity;
}

ServedPage handle_page_request(const Simulator& sim, const std::string& site_id, int round,
                               const std::optional<std::string>& document,
                               const std::optional<std::string>& expected_hash) {
  if (round < 0) throw Error(ErrorCode::kInvalidArgument, "round must be >= 0");
  if (!document) return sim.serve_page(site_id, std::nullopt, std::string(), round);
  const auto hash = profile::document_hash(*document);
  auto profile = profile::parse_document(*document, expected_hash.value_or(std::string()));
  return sim.serve_page(site_id, profile, hash, round);
}

}  // namespace pas::adsim
