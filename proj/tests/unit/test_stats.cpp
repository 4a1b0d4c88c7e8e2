#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "pas/error.hpp"
#include "pas/stats.hpp"

namespace {

using pas::stats::Correction;
using pas::stats::GroupedSamples;

GroupedSamples groups_of(const std::vector<std::vector<double>>& v) {
  GroupedSamples g;
  for (std::size_t i = 0; i < v.size(); ++i) g.push_back({"g" + std::to_string(i + 1), v[i]});
  return g;
}

TEST(KruskalWallis, ThreeSeparatedGroups) {
  const std::vector<std::vector<double>> data = {{1, 2, 3}, {4, 5, 6}, {7, 8, 9}};
  const auto r = pas::stats::kruskal_wallis(groups_of(data));
  EXPECT_NEAR(r.h_statistic, 7.2, 1e-12);
  EXPECT_EQ(r.degrees_of_freedom, 2);
  EXPECT_NEAR(r.p_value, 0.027323722447292555, 1e-12);
  EXPECT_FALSE(r.tie_corrected);
  EXPECT_NEAR(r.h_statistic, pas::oracle::kw_h(data), 1e-12);
  EXPECT_NEAR(r.p_value, pas::oracle::chi2_sf_even(r.h_statistic, 2), 1e-12);
}

TEST(KruskalWallis, ExactPermutationOfSeparatedGroups) {
  // Only the 3! labelings that keep the blocks intact reach H = 7.2.
  const auto [ge, total] = pas::oracle::kw_exact({{1, 2, 3}, {4, 5, 6}, {7, 8, 9}});
  EXPECT_EQ(total, 1680);
  EXPECT_EQ(ge, 6);
  // Asymptotic p overstates the exact one here; both are below 0.05.
  EXPECT_LT(6.0 / 1680, pas::stats::kruskal_wallis(groups_of({{1, 2, 3}, {4, 5, 6}, {7, 8, 9}})).p_value);
}

TEST(KruskalWallis, TieCorrection) {
  const std::vector<std::vector<double>> data = {{1, 1, 2}, {2, 3, 3}};
  const auto r = pas::stats::kruskal_wallis(groups_of(data));
  EXPECT_TRUE(r.tie_corrected);
  EXPECT_NEAR(r.h_statistic, 3.3333333333333, 1e-9);
  EXPECT_NEAR(r.h_statistic, pas::oracle::kw_h(data), 1e-12);
  EXPECT_NEAR(r.p_value, 0.06788915486182946, 1e-12);
  EXPECT_EQ(r.degrees_of_freedom, 1);
}

TEST(KruskalWallis, AllIdenticalIsDegenerate) {
  const auto r = pas::stats::kruskal_wallis(groups_of({{5, 5}, {5, 5, 5}, {5}}));
  EXPECT_TRUE(r.degenerate);
  EXPECT_EQ(r.h_statistic, 0.0);
  EXPECT_EQ(r.p_value, 1.0);
}

TEST(KruskalWallis, RejectsBadInput) {
  EXPECT_THROW(pas::stats::kruskal_wallis(groups_of({{1, 2}})), pas::Error);
  EXPECT_THROW(pas::stats::kruskal_wallis(groups_of({{1, 2}, {}})), pas::Error);
}

TEST(KruskalWallis, MatchesOracleOnRandomGroups) {
  for (int seed = 0; seed < 100; ++seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> k_dist(2, 5), n_dist(1, 9), v_dist(0, 12);
    std::vector<std::vector<double>> data(k_dist(rng));
    for (auto& g : data) {
      g.resize(n_dist(rng));
      for (auto& v : g) v = v_dist(rng);
    }
    const auto r = pas::stats::kruskal_wallis(groups_of(data));
    if (r.degenerate) continue;
    EXPECT_NEAR(r.h_statistic, pas::oracle::kw_h(data), 1e-9) << "seed " << seed;
    if (r.degrees_of_freedom % 2 == 0) {
      EXPECT_NEAR(r.p_value, pas::oracle::chi2_sf_even(r.h_statistic, r.degrees_of_freedom), 1e-9)
          << "seed " << seed;
    }
  }
}

TEST(KruskalWallis, InvariantUnderMonotoneTransform) {
  for (int seed = 0; seed < 100; ++seed) {
    std::mt19937_64 rng(1000 + seed);
    std::normal_distribution<double> nd(50, 20);
    std::vector<std::vector<double>> data(3), moved(3);
    for (std::size_t k = 0; k < 3; ++k) {
      for (int i = 0; i < 6; ++i) {
        const double v = std::round(nd(rng) + 5.0 * k);
        data[k].push_back(v);
        moved[k].push_back(std::exp(v / 25.0) + 3 * v);
      }
    }
    const auto a = pas::stats::kruskal_wallis(groups_of(data));
    const auto b = pas::stats::kruskal_wallis(groups_of(moved));
    EXPECT_NEAR(a.h_statistic, b.h_statistic, 1e-9) << "seed " << seed;
    EXPECT_NEAR(a.p_value, b.p_value, 1e-12) << "seed " << seed;
  }
}

TEST(KruskalWallis, GroupOrderDoesNotMatter) {
  const std::vector<std::vector<double>> a = {{3, 1, 4}, {1, 5, 9, 2}, {6, 5}};
  const std::vector<std::vector<double>> b = {{6, 5}, {3, 1, 4}, {1, 5, 9, 2}};
  EXPECT_NEAR(pas::stats::kruskal_wallis(groups_of(a)).h_statistic,
              pas::stats::kruskal_wallis(groups_of(b)).h_statistic, 1e-12);
}

TEST(Midranks, TiesShareTheAverage) {
  const std::vector<double> v = {10, 20, 20, 5, 20};
  const auto r = pas::stats::midranks(v);
  EXPECT_EQ(r, (std::vector<double>{2, 4, 4, 1, 4}));
}

TEST(Dunn, SeparatedGroupsFrozen) {
  const std::vector<std::vector<double>> data = {{1, 2, 3}, {4, 5, 6}, {7, 8, 9}};
  const auto none = pas::stats::dunn_posthoc(groups_of(data), Correction::kNone);
  ASSERT_EQ(none.pairs.size(), 3u);
  EXPECT_EQ(none.pairs[0].label_a, "g1");
  EXPECT_EQ(none.pairs[0].label_b, "g2");
  EXPECT_EQ(none.pairs[1].label_b, "g3");
  EXPECT_EQ(none.pairs[2].label_a, "g2");
  EXPECT_NEAR(std::fabs(none.pairs[0].z), 1.3416407864998738, 1e-12);
  EXPECT_NEAR(std::fabs(none.pairs[1].z), 2.6832815729997477, 1e-12);
  EXPECT_NEAR(std::fabs(none.pairs[2].z), 1.3416407864998738, 1e-12);
  EXPECT_NEAR(none.pairs[1].raw_p, 0.007290358091535638, 1e-12);
  EXPECT_NEAR(none.pairs[0].raw_p, 0.17971249487899976, 1e-12);
  for (const auto& p : none.pairs) EXPECT_EQ(p.adjusted_p, p.raw_p);

  const auto bonf = pas::stats::dunn_posthoc(groups_of(data), Correction::kBonferroni);
  EXPECT_NEAR(bonf.pairs[1].adjusted_p, 0.021871074274606914, 1e-12);
  EXPECT_NEAR(bonf.pairs[0].adjusted_p, 0.5391374846369993, 1e-12);

  const auto holm = pas::stats::dunn_posthoc(groups_of(data), Correction::kHolm);
  EXPECT_NEAR(holm.pairs[1].adjusted_p, 0.021871074274606914, 1e-12);
  EXPECT_NEAR(holm.pairs[0].adjusted_p, 0.3594249897579995, 1e-12);
  EXPECT_NEAR(holm.pairs[2].adjusted_p, 0.3594249897579995, 1e-12);
}

TEST(Dunn, MatchesOracleWithTies) {
  const std::vector<std::vector<double>> data = {{1, 1, 2, 7}, {2, 3, 3}, {3, 8, 8, 9, 1}};
  const auto r = pas::stats::dunn_posthoc(groups_of(data), Correction::kNone);
  const std::pair<int, int> order[] = {{0, 1}, {0, 2}, {1, 2}};
  for (std::size_t k = 0; k < 3; ++k) {
    const double z = pas::oracle::dunn_z(data, order[k].first, order[k].second);
    EXPECT_NEAR(std::fabs(r.pairs[k].z), std::fabs(z), 1e-12);
    EXPECT_NEAR(r.pairs[k].raw_p, pas::oracle::two_sided_p(z), 1e-12);
  }
}

TEST(Dunn, HolmNeverExceedsBonferroniAndIsMonotone) {
  for (int seed = 0; seed < 50; ++seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0, 10);
    std::vector<std::vector<double>> data(4);
    for (std::size_t k = 0; k < 4; ++k)
      for (int i = 0; i < 5; ++i) data[k].push_back(u(rng) + static_cast<double>(k));
    const auto b = pas::stats::dunn_posthoc(groups_of(data), Correction::kBonferroni);
    const auto h = pas::stats::dunn_posthoc(groups_of(data), Correction::kHolm);
    for (std::size_t i = 0; i < b.pairs.size(); ++i) {
      EXPECT_LE(h.pairs[i].adjusted_p, b.pairs[i].adjusted_p + 1e-15);
      EXPECT_GE(h.pairs[i].adjusted_p, h.pairs[i].raw_p - 1e-15);
      EXPECT_LE(h.pairs[i].adjusted_p, 1.0);
      for (std::size_t j = 0; j < h.pairs.size(); ++j) {
        if (h.pairs[i].raw_p < h.pairs[j].raw_p) {
          EXPECT_LE(h.pairs[i].adjusted_p, h.pairs[j].adjusted_p + 1e-15);
        }
      }
    }
  }
}

TEST(CohenKappa, HandExample) {
  // 20 yes/yes, 5 yes/no, 10 no/yes, 15 no/no: po = 0.7, pe = 0.5, kappa = 0.4.
  std::vector<std::string> a, b;
  auto add = [&](int n, const char* x, const char* y) {
    for (int i = 0; i < n; ++i) {
      a.push_back(x);
      b.push_back(y);
    }
  };
  add(20, "yes", "yes");
  add(5, "yes", "no");
  add(10, "no", "yes");
  add(15, "no", "no");
  EXPECT_NEAR(*pas::stats::cohen_kappa(a, b), 0.4, 1e-12);
}

TEST(CohenKappa, SelfAgreementIsOne) {
  const std::vector<std::string> a = {"low", "mid", "high", "mid", "low"};
  EXPECT_NEAR(*pas::stats::cohen_kappa(a, a), 1.0, 1e-12);
}

TEST(CohenKappa, SingleSharedCategoryIsUndefined) {
  const std::vector<std::string> a = {"x", "x", "x"};
  EXPECT_FALSE(pas::stats::cohen_kappa(a, a).has_value());
}

TEST(CohenKappa, LengthMismatchThrows) {
  const std::vector<std::string> a = {"x", "y"}, b = {"x"};
  EXPECT_THROW(pas::stats::cohen_kappa(a, b), pas::Error);
}

TEST(NormalPdf, FrozenValues) {
  EXPECT_NEAR(pas::stats::normal_pdf(0, 0, 1), 0.3989422804014327, 1e-15);
  EXPECT_NEAR(pas::stats::normal_pdf(1.5, 0, 1), 0.1295175956658917, 1e-15);
  EXPECT_NEAR(pas::stats::normal_pdf(-2.25, 0.5, 2), 0.07750613272914660, 1e-15);
  EXPECT_NEAR(pas::stats::normal_pdf(37.2, 50, 12.5), 0.01889316282771774, 1e-15);
  const double tiny = pas::stats::normal_pdf(99, 10, 3);
  EXPECT_NEAR(tiny / 1.0235034300707406e-192, 1.0, 1e-9);
  for (double x : {-3.0, 0.1, 2.7}) {
    EXPECT_NEAR(pas::stats::normal_pdf(x, 0.4, 1.7), pas::oracle::normal_pdf(x, 0.4, 1.7), 1e-15);
  }
  EXPECT_THROW(pas::stats::normal_pdf(0, 0, 0), pas::Error);
}

TEST(Descriptive, PopulationStdAndCov) {
  const std::vector<double> a = {10, 12, 11, 9, 13};
  EXPECT_NEAR(pas::stats::population_std(a), 1.4142135623730951, 1e-12);
  EXPECT_NEAR(*pas::stats::coefficient_of_variation(a), 12.856486930664502, 1e-9);
  const std::vector<double> b = {28, 29, 30};
  EXPECT_NEAR(pas::stats::population_std(b), 0.816496580927726, 1e-12);
  EXPECT_NEAR(*pas::stats::coefficient_of_variation(b), 2.8155054514749174, 1e-9);
  const auto fit = pas::stats::fit_normal(b);
  EXPECT_NEAR(fit.mean, 29.0, 1e-12);
  EXPECT_NEAR(fit.std, 0.816496580927726, 1e-12);
}

TEST(Descriptive, CovUndefinedForNonPositiveMean) {
  const std::vector<double> z = {0, 0, 0};
  EXPECT_FALSE(pas::stats::coefficient_of_variation(z).has_value());
  const std::vector<double> one = {4};
  EXPECT_THROW(pas::stats::coefficient_of_variation(one), pas::Error);
  EXPECT_THROW(pas::stats::fit_normal(one), pas::Error);
}

TEST(Descriptive, MatchesOracleOnRandomSamples) {
  for (int seed = 0; seed < 100; ++seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(1, 100);
    std::vector<double> v(2 + seed % 9);
    for (auto& x : v) x = u(rng);
    EXPECT_NEAR(pas::stats::population_std(v), pas::oracle::pop_std(v), 1e-9);
    EXPECT_NEAR(*pas::stats::coefficient_of_variation(v), pas::oracle::cov_percent(v), 1e-9);
  }
}

TEST(Significance, Marks) {
  EXPECT_EQ(pas::stats::significance_mark(0.01), "**");
  EXPECT_EQ(pas::stats::significance_mark(0.05), "*");
  EXPECT_EQ(pas::stats::significance_mark(0.099), "*");
  EXPECT_EQ(pas::stats::significance_mark(0.1), "");
}

TEST(Serialization, KWRoundTrip) {
  const auto r = pas::stats::kruskal_wallis(groups_of({{1, 1, 2}, {2, 3, 3}}));
  nlohmann::json j = r;
  EXPECT_EQ(j.get<pas::stats::KWResult>(), r);
  const auto p = pas::stats::dunn_posthoc(groups_of({{1, 2, 3}, {4, 5, 6}, {7, 8, 9}}));
  nlohmann::json jp = p;
  EXPECT_EQ(jp.get<pas::stats::PosthocResult>(), p);
  EXPECT_EQ(pas::stats::parse_correction("bonferroni"), Correction::kBonferroni);
  EXPECT_THROW(pas::stats::parse_correction("sidak"), pas::Error);
}

}  // namespace
