#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pas/scorer/alignment.hpp"

namespace pas::scorer {

struct AdStability {
  std::string ad_ref;
  std::size_t samples = 0;
  double mean = 0.0;
  double std = 0.0;            // population
  std::optional<double> cov;   // percent; nullopt when mean is 0
};

struct StabilityReport {
  std::vector<AdStability> per_ad;  // ordered by first appearance
  double avg_std = 0.0;
  std::optional<double> avg_cov;    // over ads with a defined cov
  std::vector<std::string> notes;
};

// Groups non-failed samples by ad_ref. Every ad needs at least 2 samples.
StabilityReport stability_metrics(const std::vector<AlignmentSample>& samples);

nlohmann::json to_json(const StabilityReport& r);
// Header: ad_ref,samples,mean,std,cov_percent
std::string to_csv(const StabilityReport& r);

}  // namespace pas::scorer
