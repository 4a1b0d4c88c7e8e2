#include "pas/stats.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include <boost/math/special_functions/gamma.hpp>

#include "pas/error.hpp"

namespace pas::stats {

namespace {

void require_groups(const GroupedSamples& samples) {
  if (samples.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument,
                "at least two groups are required");
  }
  for (const auto& g : samples) {
    if (g.values.empty()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "group '" + g.label + "' is empty");
    }
  }
}

struct PooledRanks {
  std::vector<double> rank_means;
  std::vector<std::size_t> sizes;
  std::size_t total = 0;
  double tie_sum = 0.0;  // sum over tie blocks of (t^3 - t)
  bool all_equal = false;
};

PooledRanks pool_ranks(const GroupedSamples& samples) {
  std::vector<double> pooled;
  for (const auto& g : samples) {
    pooled.insert(pooled.end(), g.values.begin(), g.values.end());
  }
  const auto ranks = midranks(pooled);

  PooledRanks out;
  out.total = pooled.size();
  std::size_t offset = 0;
  for (const auto& g : samples) {
    double sum = 0.0;
    for (std::size_t i = 0; i < g.values.size(); ++i) sum += ranks[offset + i];
    out.rank_means.push_back(sum / static_cast<double>(g.values.size()));
    out.sizes.push_back(g.values.size());
    offset += g.values.size();
  }

  std::map<double, std::size_t> counts;
  for (double v : pooled) ++counts[v];
  for (const auto& [value, t] : counts) {
    const auto td = static_cast<double>(t);
    out.tie_sum += td * td * td - td;
  }
  out.all_equal = counts.size() == 1;
  return out;
}

}  // namespace

std::vector<double> midranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return values[a] < values[b];
  });
  std::vector<double> ranks(values.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    // positions i..j (0-based) share rank mean of (i+1)..(j+1)
    const double shared = (static_cast<double>(i + j) + 2.0) / 2.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = shared;
    i = j + 1;
  }
  return ranks;
}

KWResult kruskal_wallis(const GroupedSamples& samples) {
  require_groups(samples);
  const PooledRanks pr = pool_ranks(samples);
  if (pr.total < 3) {
    throw Error(ErrorCode::kInvalidArgument,
                "Kruskal-Wallis needs at least 3 observations");
  }

  KWResult r;
  r.degrees_of_freedom = static_cast<int>(samples.size()) - 1;
  if (pr.all_equal) {
    r.degenerate = true;
    r.tie_corrected = true;
    return r;
  }

  const auto n = static_cast<double>(pr.total);
  double weighted = 0.0;
  for (std::size_t i = 0; i < pr.rank_means.size(); ++i) {
    const auto ni = static_cast<double>(pr.sizes[i]);
    const double rank_sum = pr.rank_means[i] * ni;
    weighted += rank_sum * rank_sum / ni;
  }
  double h = 12.0 / (n * (n + 1.0)) * weighted - 3.0 * (n + 1.0);
  const double correction = 1.0 - pr.tie_sum / (n * n * n - n);
  if (pr.tie_sum > 0.0) {
    h /= correction;
    r.tie_corrected = true;
  }
  // Rounding can leave a tiny negative value for perfectly balanced ranks.
  r.h_statistic = std::max(0.0, h);
  r.p_value = chi_square_sf(r.h_statistic, r.degrees_of_freedom);
  return r;
}

PosthocResult dunn_posthoc(const GroupedSamples& samples, Correction correction) {
  require_groups(samples);
  const PooledRanks pr = pool_ranks(samples);
  const auto n = static_cast<double>(pr.total);

  PosthocResult out;
  out.correction = correction;
  const double base_var =
      n * (n + 1.0) / 12.0 - (n > 1.0 ? pr.tie_sum / (12.0 * (n - 1.0)) : 0.0);

  for (std::size_t i = 0; i < samples.size(); ++i) {
    for (std::size_t j = i + 1; j < samples.size(); ++j) {
      PairComparison pc;
      pc.label_a = samples[i].label;
      pc.label_b = samples[j].label;
      const double se =
          std::sqrt(base_var * (1.0 / static_cast<double>(pr.sizes[i]) +
                                1.0 / static_cast<double>(pr.sizes[j])));
      if (pr.all_equal || !(se > 0.0)) {
        pc.z = 0.0;
        pc.raw_p = 1.0;
      } else {
        pc.z = (pr.rank_means[i] - pr.rank_means[j]) / se;
        pc.raw_p = two_sided_normal_p(pc.z);
      }
      out.pairs.push_back(pc);
    }
  }

  const std::size_t m = out.pairs.size();
  switch (correction) {
    case Correction::kNone:
      for (auto& pc : out.pairs) pc.adjusted_p = pc.raw_p;
      break;
    case Correction::kBonferroni:
      for (auto& pc : out.pairs) {
        pc.adjusted_p = std::min(1.0, pc.raw_p * static_cast<double>(m));
      }
      break;
    case Correction::kHolm: {
      std::vector<std::size_t> order(m);
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) {
        return out.pairs[a].raw_p < out.pairs[b].raw_p;
      });
      double running = 0.0;
      for (std::size_t rank = 0; rank < m; ++rank) {
        auto& pc = out.pairs[order[rank]];
        const double scaled = pc.raw_p * static_cast<double>(m - rank);
        running = std::max(running, std::min(1.0, scaled));
        pc.adjusted_p = running;
      }
      break;
    }
  }
  return out;
}

std::optional<double> cohen_kappa(std::span<const std::string> ratings_a,
                                  std::span<const std::string> ratings_b) {
  if (ratings_a.size() != ratings_b.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "rating vectors differ in length",
                {{"a", ratings_a.size()}, {"b", ratings_b.size()}});
  }
  if (ratings_a.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "rating vectors are empty");
  }
  const auto n = static_cast<double>(ratings_a.size());
  std::map<std::string, double> marginal_a;
  std::map<std::string, double> marginal_b;
  double agree = 0.0;
  for (std::size_t i = 0; i < ratings_a.size(); ++i) {
    marginal_a[ratings_a[i]] += 1.0;
    marginal_b[ratings_b[i]] += 1.0;
    if (ratings_a[i] == ratings_b[i]) agree += 1.0;
  }
  const double p_o = agree / n;
  double p_e = 0.0;
  for (const auto& [category, count] : marginal_a) {
    auto it = marginal_b.find(category);
    if (it != marginal_b.end()) p_e += (count / n) * (it->second / n);
  }
  if (std::abs(1.0 - p_e) < 1e-15) return std::nullopt;
  return (p_o - p_e) / (1.0 - p_e);
}

double mean(std::span<const double> samples) {
  if (samples.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "mean of an empty sample");
  }
  return std::accumulate(samples.begin(), samples.end(), 0.0) /
         static_cast<double>(samples.size());
}

double population_std(std::span<const double> samples) {
  const double m = mean(samples);
  double ss = 0.0;
  for (double v : samples) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(samples.size()));
}

NormalFit fit_normal(std::span<const double> samples) {
  if (samples.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument,
                "fitting a normal curve needs at least 2 samples");
  }
  return {mean(samples), population_std(samples)};
}

double normal_pdf(double x, double mean, double std) {
  if (!(std > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "normal density needs a positive standard deviation");
  }
  constexpr double kInvSqrt2Pi = 0.398942280401432677939946059934;
  const double z = (x - mean) / std;
  return kInvSqrt2Pi / std * std::exp(-0.5 * z * z);
}

std::optional<double> coefficient_of_variation(std::span<const double> samples) {
  if (samples.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument,
                "coefficient of variation needs at least 2 samples");
  }
  const double m = mean(samples);
  if (!(m > 0.0)) return std::nullopt;
  return 100.0 * population_std(samples) / m;
}

double chi_square_sf(double x, int degrees_of_freedom) {
  if (degrees_of_freedom < 1) {
    throw Error(ErrorCode::kInvalidArgument, "degrees of freedom must be >= 1");
  }
  if (x <= 0.0) return 1.0;
  return boost::math::gamma_q(0.5 * degrees_of_freedom, 0.5 * x);
}

double two_sided_normal_p(double z) {
  return std::min(1.0, std::erfc(std::abs(z) / std::sqrt(2.0)));
}

std::string_view significance_mark(double p) {
  if (p < 0.05) return "**";
  if (p < 0.1) return "*";
  return "";
}

std::string_view to_string(Correction c) {
  switch (c) {
    case Correction::kNone: return "none";
    case Correction::kBonferroni: return "bonferroni";
    case Correction::kHolm: return "holm";
  }
  return "holm";
}

Correction parse_correction(std::string_view text) {
  if (text == "none") return Correction::kNone;
  if (text == "bonferroni") return Correction::kBonferroni;
  if (text == "holm") return Correction::kHolm;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown correction '" + std::string(text) + "'");
}

void to_json(nlohmann::json& j, const KWResult& r) {
  j = {{"h_statistic", r.h_statistic},
       {"degrees_of_freedom", r.degrees_of_freedom},
       {"p_value", r.p_value},
       {"tie_corrected", r.tie_corrected},
       {"degenerate", r.degenerate}};
}

void from_json(const nlohmann::json& j, KWResult& r) {
  r.h_statistic = j.at("h_statistic").get<double>();
  r.degrees_of_freedom = j.at("degrees_of_freedom").get<int>();
  r.p_value = j.at("p_value").get<double>();
  r.tie_corrected = j.at("tie_corrected").get<bool>();
  r.degenerate = j.value("degenerate", false);
}

void to_json(nlohmann::json& j, const PairComparison& r) {
  j = {{"label_a", r.label_a}, {"label_b", r.label_b}, {"z", r.z},
       {"raw_p", r.raw_p},     {"adjusted_p", r.adjusted_p}};
}

void from_json(const nlohmann::json& j, PairComparison& r) {
  r.label_a = j.at("label_a").get<std::string>();
  r.label_b = j.at("label_b").get<std::string>();
  r.z = j.at("z").get<double>();
  r.raw_p = j.at("raw_p").get<double>();
  r.adjusted_p = j.at("adjusted_p").get<double>();
}

void to_json(nlohmann::json& j, const PosthocResult& r) {
  j = {{"pairs", r.pairs}, {"correction", std::string(to_string(r.correction))}};
}

void from_json(const nlohmann::json& j, PosthocResult& r) {
  r.pairs = j.at("pairs").get<std::vector<PairComparison>>();
  r.correction = parse_correction(j.at("correction").get<std::string>());
}

}  // namespace pas::stats
