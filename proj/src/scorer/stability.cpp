#include "pas/scorer/stability.hpp"

#include <map>
#include <sstream>

#include "pas/error.hpp"
#include "pas/stats.hpp"

namespace pas::scorer {

using nlohmann::json;

StabilityReport stability_metrics(const std::vector<AlignmentSample>& samples) {
  std::vector<std::string> order;
  std::map<std::string, std::vector<double>> by_ad;
  for (const auto& s : samples) {
    if (s.failed) continue;
    auto [it, inserted] = by_ad.try_emplace(s.ad_ref);
    if (inserted) order.push_back(s.ad_ref);
    it->second.push_back(s.score);
  }
  if (order.empty()) throw Error(ErrorCode::kInvalidArgument, "stability: no samples");

  StabilityReport r;
  double std_sum = 0.0;
  double cov_sum = 0.0;
  std::size_t cov_n = 0;
  for (const auto& ref : order) {
    const auto& v = by_ad[ref];
    if (v.size() < 2) {
      throw Error(ErrorCode::kInvalidArgument, "stability: each ad needs at least 2 samples",
                  {{"ad_ref", ref}, {"samples", v.size()}});
    }
    AdStability a{ref, v.size(), stats::mean(v), stats::population_std(v),
                  stats::coefficient_of_variation(v)};
    std_sum += a.std;
    if (a.cov) {
      cov_sum += *a.cov;
      ++cov_n;
    } else {
      r.notes.push_back("cov undefined for " + ref + " (mean is not positive); excluded from avg_cov");
    }
    r.per_ad.push_back(std::move(a));
  }
  r.avg_std = std_sum / static_cast<double>(r.per_ad.size());
  if (cov_n > 0) r.avg_cov = cov_sum / static_cast<double>(cov_n);
  return r;
}

json to_json(const StabilityReport& r) {
  json per_ad = json::array();
  for (const auto& a : r.per_ad) {
    per_ad.push_back({{"ad_ref", a.ad_ref},
                      {"samples", a.samples},
                      {"mean", a.mean},
                      {"std", a.std},
                      {"cov", a.cov ? json(*a.cov) : json(nullptr)}});
  }
  return {{"per_ad", per_ad},
          {"avg_std", r.avg_std},
          {"avg_cov", r.avg_cov ? json(*r.avg_cov) : json(nullptr)},
          {"notes", r.notes}};
}

std::string to_csv(const StabilityReport& r) {
  std::ostringstream out;
  out.precision(17);
  out << "ad_ref,samples,mean,std,cov_percent\n";
  for (const auto& a : r.per_ad) {
    out << a.ad_ref << ',' << a.samples << ',' << a.mean << ',' << a.std << ',';
    if (a.cov) out << *a.cov;
    out << '\n';
  }
  return out.str();
}

}  // namespace pas::scorer
