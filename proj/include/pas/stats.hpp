#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace pas::stats {

struct Group {
  std::string label;
  std::vector<double> values;
};

// At least two non-empty groups.
using GroupedSamples = std::vector<Group>;

struct KWResult {
  double h_statistic = 0.0;
  int degrees_of_freedom = 0;
  double p_value = 1.0;
  bool tie_corrected = false;
  // Every observation identical: H is reported as 0 and p as 1.
  bool degenerate = false;

  bool operator==(const KWResult&) const = default;
};

enum class Correction { kNone, kBonferroni, kHolm };

struct PairComparison {
  std::string label_a;
  std::string label_b;
  double z = 0.0;
  double raw_p = 1.0;
  double adjusted_p = 1.0;

  bool operator==(const PairComparison&) const = default;
};

struct PosthocResult {
  std::vector<PairComparison> pairs;
  Correction correction = Correction::kHolm;

  bool operator==(const PosthocResult&) const = default;
};

// Mid-ranks (1-based), ties share the average of the ranks they span.
std::vector<double> midranks(std::span<const double> values);

KWResult kruskal_wallis(const GroupedSamples& samples);

// Dunn's pairwise procedure on the pooled mid-ranks. Pairs are emitted in
// (i, j) order with i < j over the input group order.
PosthocResult dunn_posthoc(const GroupedSamples& samples,
                           Correction correction = Correction::kHolm);

// Cohen's kappa. nullopt when chance agreement is 1 (single shared category).
std::optional<double> cohen_kappa(std::span<const std::string> ratings_a,
                                  std::span<const std::string> ratings_b);

struct NormalFit {
  double mean = 0.0;
  double std = 0.0;  // population

  bool operator==(const NormalFit&) const = default;
};

NormalFit fit_normal(std::span<const double> samples);
double normal_pdf(double x, double mean, double std);

double mean(std::span<const double> samples);
double population_std(std::span<const double> samples);

// 100 * std / mean. nullopt when the mean is not strictly positive.
std::optional<double> coefficient_of_variation(std::span<const double> samples);

// Upper tail of the chi-square distribution.
double chi_square_sf(double x, int degrees_of_freedom);
// Two-sided standard-normal tail probability for |z|.
double two_sided_normal_p(double z);

// "**" for p < 0.05, "*" for p < 0.1, "" otherwise.
std::string_view significance_mark(double p);

std::string_view to_string(Correction c);
Correction parse_correction(std::string_view text);

void to_json(nlohmann::json& j, const KWResult& r);
void from_json(const nlohmann::json& j, KWResult& r);
void to_json(nlohmann::json& j, const PairComparison& r);
void from_json(const nlohmann::json& j, PairComparison& r);
void to_json(nlohmann::json& j, const PosthocResult& r);
void from_json(const nlohmann::json& j, PosthocResult& r);

}  // namespace pas::stats
