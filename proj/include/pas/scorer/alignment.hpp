#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pas/attributes.hpp"
#include "pas/llm/gateway.hpp"

namespace pas::scorer {

struct AdDescription {
  std::string ad_ref;
  std::string text;
};

struct AlignmentSample {
  std::string ad_ref;
  AttributeKind attribute = AttributeKind::kAge;
  double score = 0.0;  // [0, 100] unless failed
  int repetition_index = 0;
  std::uint64_t rater_seed = 0;
  bool failed = false;
  // Gateway error or "rating anomaly: ..." for out-of-range output.
  std::string failure;

  bool operator==(const AlignmentSample&) const = default;
};

struct ScoreOptions {
  int repetitions = 5;
  std::uint64_t seed = 0;
  double temperature = 0.0;
  // Empty: the default template from the config directory.
  std::string prompt_template;
};

// The rater sees the attribute axis and the ad description, nothing about
// the persona the ad was served to.
std::string build_rating_prompt(const std::string& tmpl, const AdDescription& ad,
                                AttributeKind attribute);

// Seed for one repetition. Depends on the description text rather than the
// capture id so the same creative gets the same draws wherever it appears.
std::uint64_t rater_seed(std::uint64_t base_seed, std::string_view text, int repetition);

// `repetitions` samples issued sequentially. A failing repetition is marked
// and the rest proceed; if every repetition fails the last error is thrown.
std::vector<AlignmentSample> score_ad(const AdDescription& ad, AttributeKind attribute,
                                      llm::Gateway& gateway, const ScoreOptions& options = {});

// Distinct ads scored concurrently (bounded by the gateway's limit).
std::vector<AlignmentSample> score_ads(const std::vector<AdDescription>& ads,
                                       AttributeKind attribute, llm::Gateway& gateway,
                                       const ScoreOptions& options = {});

AdDescription describe_ad(std::string ad_ref, const llm::ImagePayload& payload,
                          llm::Gateway& gateway, std::optional<std::uint64_t> seed = {});

void to_json(nlohmann::json& j, const AdDescription& d);
void from_json(const nlohmann::json& j, AdDescription& d);
void to_json(nlohmann::json& j, const AlignmentSample& s);
void from_json(const nlohmann::json& j, AlignmentSample& s);

}  // namespace pas::scorer
