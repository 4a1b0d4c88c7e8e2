#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pas/adsim/catalog.hpp"
#include "pas/profile/browser_profile.hpp"

namespace pas::adsim {

struct SimPolicy {
  double bias_strength = 3.0;  // 0 = uniform serving
  int slots_per_page = 4;
  std::uint64_t rng_seed = 0;

  void validate() const;
};

void to_json(nlohmann::json& j, const SimPolicy& p);
void from_json(const nlohmann::json& j, SimPolicy& p);

// Context id used when no profile is applied.
inline constexpr std::string_view kAnonymousContext = "anonymous";

struct ServedSlot {
  int index = 0;  // 1-based
  std::string creative_id;
  std::string element_path;  // of the labeled creative element
};

struct ServedPage {
  std::string site_id;
  int round = 0;
  std::string context_id;
  std::string html;
  std::vector<ServedSlot> slots;
};

// Per-attribute target on the alignment axis: the anchor of the level the
// profile's account attributes declare, 50 when unknown.
std::map<AttributeKind, double> profile_targets(const profile::BrowserProfile& profile);

class Simulator {
 public:
  Simulator(std::shared_ptr<const Catalog> catalog, SimPolicy policy);

  // `profile_hash` doubles as the context id; it must be the hash of
  // `profile` (callers that decoded a document pass the document hash).
  ServedPage serve_page(const std::string& site_id,
                        const std::optional<profile::BrowserProfile>& profile,
                        const std::string& profile_hash, int round) const;

  // Selection probabilities per catalog creative (catalog order):
  // softmax(bias * sum_a site_w[a] * ((target_a - 50) / 40) * ((affinity_a - 50) / 40)).
  std::vector<double> selection_probabilities(
      const std::string& site_id, const std::optional<profile::BrowserProfile>& profile) const;

  const std::map<AttributeKind, double>& ground_truth(std::string_view creative_id) const;

  const Catalog& catalog() const { return *catalog_; }
  const SimPolicy& policy() const { return policy_; }

  // Path of slot `index` (1-based) in every served page.
  static std::string slot_path(int index);

 private:
  std::shared_ptr<const Catalog> catalog_;
  SimPolicy policy_;
};

// Server-side handling shared by the HTTP server and the in-process adapter:
// decodes an optional profile document, checks its hash when one is
// expected, and serves the page.
ServedPage handle_page_request(const Simulator& sim, const std::string& site_id, int round,
                               const std::optional<std::string>& document,
                               const std::optional<std::string>& expected_hash);

}  // namespace pas::adsim
