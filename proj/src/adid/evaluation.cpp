#include "pas/adid/evaluation.hpp"

#include <algorithm>
#include <iomanip>
#include <sstream>

#include "pas/error.hpp"
#include "pas/util/text.hpp"

namespace pas::adid {

void ConfusionMatrix::validate() const {
  if (tp < 0 || fn < 0 || tn < 0 || fp < 0) {
    throw Error(ErrorCode::kInvalidArgument, "confusion matrix counts must be non-negative",
                {{"tp", tp}, {"fn", fn}, {"tn", tn}, {"fp", fp}});
  }
}

IdentificationMetrics metrics(const ConfusionMatrix& cm) {
  cm.validate();
  auto ratio = [](long long num, long long den) -> std::optional<double> {
    if (den == 0) return std::nullopt;
    return static_cast<double>(num) / static_cast<double>(den);
  };
  return {ratio(cm.tp + cm.tn, cm.tp + cm.tn + cm.fp + cm.fn), ratio(cm.tp, cm.tp + cm.fp),
          ratio(cm.tp, cm.tp + cm.fn)};
}

ConfusionMatrix evaluate_identification(const std::set<std::string>& predicted,
                                        const std::set<std::string>& labeled, long long tn) {
  ConfusionMatrix cm;
  for (const auto& p : predicted) labeled.count(p) ? ++cm.tp : ++cm.fp;
  for (const auto& l : labeled) {
    if (!predicted.count(l)) ++cm.fn;
  }
  cm.tn = tn;
  cm.validate();
  return cm;
}

std::string format_table(const ConfusionMatrix& cm, const IdentificationMetrics& m) {
  auto pct = [](const std::optional<double>& v) {
    return v ? util::format_fixed(*v * 100.0, 2) + "%" : std::string("undefined");
  };
  const std::pair<std::string, std::string> rows[] = {
      {"TP", std::to_string(cm.tp)},  {"FN", std::to_string(cm.fn)},
      {"TN", std::to_string(cm.tn)},  {"FP", std::to_string(cm.fp)},
      {"Accuracy", pct(m.accuracy)},  {"Precision", pct(m.precision)},
      {"Recall", pct(m.recall)}};
  std::size_t width = 10;
  for (const auto& r : rows) width = std::max(width, r.second.size());
  std::ostringstream out;
  for (const auto& [name, value] : rows) {
    out << std::left << std::setw(10) << name << std::right << std::setw(static_cast<int>(width))
        << value << '\n';
  }
  return out.str();
}

nlohmann::json to_json(const ConfusionMatrix& cm, const IdentificationMetrics& m) {
  auto opt = [](const std::optional<double>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
  };
  return {{"tp", cm.tp},
          {"fn", cm.fn},
          {"tn", cm.tn},
          {"fp", cm.fp},
          {"accuracy", opt(m.accuracy)},
          {"precision", opt(m.precision)},
          {"recall", opt(m.recall)}};
}

}  // namespace pas::adid
