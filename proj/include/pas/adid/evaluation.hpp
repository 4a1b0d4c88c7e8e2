#pragma once

#include <optional>
#include <set>
#include <string>

#include <nlohmann/json.hpp>

namespace pas::adid {

struct ConfusionMatrix {
  long long tp = 0;
  long long fn = 0;
  long long tn = 0;
  long long fp = 0;

  void validate() const;  // all counts >= 0
  bool operator==(const ConfusionMatrix&) const = default;
};

// A metric is nullopt when its denominator is zero.
struct IdentificationMetrics {
  std::optional<double> accuracy;
  std::optional<double> precision;
  std::optional<double> recall;
};

IdentificationMetrics metrics(const ConfusionMatrix& cm);

// Slot-set comparison: tp = |P ∩ L|, fp = |P \ L|, fn = |L \ P|. Slot sets
// carry no negatives, so tn is whatever the caller passes (0 by default).
ConfusionMatrix evaluate_identification(const std::set<std::string>& predicted,
                                        const std::set<std::string>& labeled,
                                        long long tn = 0);

// Aligned two-column table; undefined metrics print as "undefined".
std::string format_table(const ConfusionMatrix& cm, const IdentificationMetrics& m);

nlohmann::json to_json(const ConfusionMatrix& cm, const IdentificationMetrics& m);

}  // namespace pas::adid
