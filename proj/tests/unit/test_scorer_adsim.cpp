#include <gtest/gtest.h>

#include <boost/math/distributions/chi_squared.hpp>

#include <cmath>
#include <fstream>
#include <map>

#include "oracles.hpp"
#include "pas/adid/identifier.hpp"
#include "pas/adsim/adapter.hpp"
#include "pas/adsim/catalog.hpp"
#include "pas/adsim/simulator.hpp"
#include "pas/error.hpp"
#include "pas/html/parser.hpp"
#include "pas/profile/profile_document.hpp"
#include "pas/scorer/alignment.hpp"
#include "pas/scorer/stability.hpp"
#include "pas/util/config_paths.hpp"
#include "support.hpp"

namespace {

using nlohmann::json;
using pas::AttributeKind;
using pas::scorer::AlignmentSample;

// ---- catalog oracle -------------------------------------------------------

// Reads the bundled catalog with plain JSON access, bypassing pas_adsim.
struct RawCatalog {
  json doc;
  RawCatalog() {
    std::ifstream in(pas::util::join_path(pas::util::default_config_dir(), "creatives.json"));
    doc = json::parse(in);
  }
  std::vector<double> probabilities(const std::string& site, const std::map<std::string, double>& targets,
                                    double bias) const {
    const auto& weights = doc["sites"][site]["topics"];
    std::vector<double> logit;
    for (const auto& c : doc["creatives"]) {
      double m = 0;
      for (const auto& [attr, target] : targets) {
        const double w = weights.contains(attr) ? weights[attr].get<double>() : 1.0;
        m += w * ((target - 50) / 40) * ((c["affinity"][attr].get<double>() - 50) / 40);
      }
      logit.push_back(bias * m);
    }
    double z = 0;
    for (double l : logit) z += std::exp(l);
    for (double& l : logit) l = std::exp(l) / z;
    return logit;
  }
  double expected_affinity(const std::string& site, const std::map<std::string, double>& targets,
                           double bias, const std::string& attr) const {
    const auto p = probabilities(site, targets, bias);
    double e = 0;
    for (std::size_t i = 0; i < p.size(); ++i) e += p[i] * doc["creatives"][i]["affinity"][attr].get<double>();
    return e;
  }
};

pas::profile::BrowserProfile level_profile(const json& levels) {
  pas::profile::BrowserProfile p;
  p.account_attributes = levels;
  p.geolocation = {40.0, -75.0};
  p.user_agent = "Mozilla/5.0 (test)";
  p.history = {{"https://example.test/", "x", {pas::testing::kAnchorMs - 1000}}};
  return p;
}

std::shared_ptr<const pas::adsim::Simulator> simulator(double bias, int slots = 4, std::uint64_t seed = 1) {
  pas::adsim::SimPolicy p;
  p.bias_strength = bias;
  p.slots_per_page = slots;
  p.rng_seed = seed;
  return std::make_shared<pas::adsim::Simulator>(pas::adsim::Catalog::load_default(), p);
}

// ---- simulator ----------------------------------------------------------

TEST(Catalog, BundledIsValid) {
  const auto cat = pas::adsim::Catalog::load_default();
  EXPECT_NO_THROW(cat->validate());
  EXPECT_GE(cat->creatives().size(), 30u);
  EXPECT_EQ(cat->creative("c045").affinity.at(AttributeKind::kIncomeLevel), 90.0);
  EXPECT_THROW(cat->creative("nope"), pas::Error);
  EXPECT_THROW(cat->site("nope"), pas::Error);
}

TEST(Catalog, ValidationRejectsBadCreatives) {
  auto cat = pas::adsim::Catalog::load_default();
  auto creatives = cat->creatives();
  creatives[1].id = creatives[0].id;
  EXPECT_THROW(pas::adsim::Catalog(creatives, cat->sites()).validate(), pas::Error);
  creatives = cat->creatives();
  creatives[0].markup = "<div>no label</div>";
  EXPECT_THROW(pas::adsim::Catalog(creatives, cat->sites()).validate(), pas::Error);
  creatives = cat->creatives();
  creatives[0].affinity[AttributeKind::kAge] = 101;
  EXPECT_THROW(pas::adsim::Catalog(creatives, cat->sites()).validate(), pas::Error);
}

TEST(Simulator, ProbabilitiesMatchIndependentSoftmax) {
  const RawCatalog raw;
  const auto sim = simulator(3.0);
  const auto p = sim->selection_probabilities(
      "shopping-mall", level_profile({{"income_level", "high"}, {"age_level", "young"}}));
  const auto q = raw.probabilities("shopping-mall",
                                   {{"age", 10}, {"gender", 50}, {"location", 50}, {"income", 90}, {"education", 50}}, 3.0);
  ASSERT_EQ(p.size(), q.size());
  for (std::size_t i = 0; i < p.size(); ++i) EXPECT_NEAR(p[i], q[i], 1e-12) << i;
}

TEST(Simulator, UniformWithoutBias) {
  const auto sim = simulator(0.0, 4, 7);
  const auto profile = level_profile({{"income_level", "high"}});
  const auto hash = pas::profile::profile_hash(profile);
  const std::size_t n = sim->catalog().creatives().size();
  std::map<std::string, int> counts;
  int draws = 0;
  for (int round = 1; round <= 1500; ++round) {
    for (const auto& s : sim->serve_page("news-portal", profile, hash, round).slots) {
      ++counts[s.creative_id];
      ++draws;
    }
  }
  const double expect = static_cast<double>(draws) / n;
  const double sigma = std::sqrt(draws * (1.0 / n) * (1 - 1.0 / n));
  double chi2 = 0;
  for (const auto& c : sim->catalog().creatives()) {
    const double k = counts[c.id];
    EXPECT_LT(std::fabs(k - expect), 4 * sigma) << c.id;
    chi2 += (k - expect) * (k - expect) / expect;
  }
  const boost::math::chi_squared dist(static_cast<double>(n - 1));
  EXPECT_GT(boost::math::cdf(boost::math::complement(dist, chi2)), 0.001);
  for (double p : sim->selection_probabilities("news-portal", profile)) EXPECT_NEAR(p, 1.0 / n, 1e-15);
}

TEST(Simulator, HighIncomeProfileGetsHighIncomeAds) {
  const RawCatalog raw;
  const auto sim = simulator(5.0, 4, 3);
  const auto profile = level_profile({{"income_level", "high"}});
  const auto hash = pas::profile::profile_hash(profile);
  double sum = 0;
  int draws = 0;
  for (int round = 1; round <= 500; ++round) {
    for (const auto& s : sim->serve_page("news-portal", profile, hash, round).slots) {
      sum += sim->ground_truth(s.creative_id).at(AttributeKind::kIncomeLevel);
      ++draws;
    }
  }
  const double expected = raw.expected_affinity(
      "news-portal", {{"age", 50}, {"gender", 50}, {"location", 50}, {"income", 90}, {"education", 50}}, 5.0, "income");
  EXPECT_GE(expected, 70.0);
  EXPECT_GE(sum / draws, 70.0);
  EXPECT_NEAR(sum / draws, expected, 2.0);
}

TEST(Simulator, ExpectedAffinityIncreasesWithLevel) {
  const RawCatalog raw;
  for (const char* site : {"news-portal", "shopping-mall"}) {
    double prev = -1;
    for (double target : {10.0, 50.0, 90.0}) {
      const double e = raw.expected_affinity(
          site, {{"age", 50}, {"gender", 50}, {"location", 50}, {"income", target}, {"education", 50}}, 3.0, "income");
      EXPECT_GT(e, prev) << site << " " << target;
      prev = e;
    }
  }
  // And stronger bias pushes further toward the anchor.
  auto at = [&](double bias) {
    return raw.expected_affinity("news-portal",
                                 {{"age", 50}, {"gender", 50}, {"location", 50}, {"income", 90}, {"education", 50}},
                                 bias, "income");
  };
  EXPECT_LT(at(1.0), at(3.0));
  EXPECT_LT(at(3.0), at(5.0));
}

TEST(Simulator, DeterministicPerContextAndRound) {
  const auto a = simulator(3.0, 4, 11);
  const auto b = simulator(3.0, 4, 11);
  const auto profile = level_profile({{"income_level", "low"}});
  const auto hash = pas::profile::profile_hash(profile);
  const auto p1 = a->serve_page("recipe-blog", profile, hash, 2);
  EXPECT_EQ(p1.html, b->serve_page("recipe-blog", profile, hash, 2).html);
  EXPECT_EQ(p1.context_id, hash);
  EXPECT_NE(p1.html, a->serve_page("recipe-blog", profile, hash, 3).html);
  const auto anon = a->serve_page("recipe-blog", std::nullopt, "", 2);
  EXPECT_EQ(anon.context_id, pas::adsim::kAnonymousContext);
}

TEST(Simulator, IdentifierFindsExactlyTheServedSlots) {
  const auto sim = simulator(3.0, 6, 5);
  const auto profile = level_profile({{"gender_level", "female"}});
  const auto hash = pas::profile::profile_hash(profile);
  for (const auto& site : {"news-portal", "shopping-mall", "auto-forum", "campus-life", "recipe-blog"}) {
    const auto page = sim->serve_page(site, profile, hash, 1);
    ASSERT_EQ(page.slots.size(), 6u);
    const auto ads = pas::adid::identify_ads(pas::html::parse(page.html), "sim://local/site/x");
    ASSERT_EQ(ads.size(), page.slots.size()) << site;
    for (std::size_t i = 0; i < ads.size(); ++i) {
      EXPECT_EQ(ads[i].element_path, page.slots[i].element_path);
      EXPECT_EQ(ads[i].element_path, pas::adsim::Simulator::slot_path(static_cast<int>(i + 1)));
      EXPECT_NE(ads[i].markup.find(page.slots[i].creative_id), std::string::npos);
    }
  }
}

TEST(Simulator, GroundTruthAndErrors) {
  const auto sim = simulator(3.0);
  EXPECT_EQ(sim->ground_truth("c045").at(AttributeKind::kIncomeLevel), 90.0);
  try {
    sim->ground_truth("c999");
    FAIL();
  } catch (const pas::Error& e) {
    EXPECT_EQ(e.code(), pas::ErrorCode::kNotFound);
  }
  EXPECT_THROW(sim->serve_page("no-such-site", std::nullopt, "", 1), pas::Error);
  pas::adsim::SimPolicy bad;
  bad.slots_per_page = 0;
  EXPECT_THROW(pas::adsim::Simulator(pas::adsim::Catalog::load_default(), bad), pas::Error);
}

TEST(SimulatorAdapter, DocumentTransportAndHashCheck) {
  const auto sim = simulator(3.0);
  pas::adsim::SimulatorAdapter target(sim);
  auto engine = pas::testing::stub_engine();
  const auto base = engine->generate_base_persona("a nurse", 13);
  const auto set = engine->generate_variants(base, AttributeKind::kIncomeLevel, 13);
  const auto& profile = *set.variants[2].profile;
  const auto ctx = pas::profile::apply_profile(profile, target);
  EXPECT_FALSE(ctx.partial());
  const auto page = target.fetch("shopping-mall", 1);
  EXPECT_EQ(page.echoed_hash, std::optional<std::string>(pas::profile::profile_hash(profile)));
  ASSERT_TRUE(target.last_page());
  EXPECT_EQ(target.last_page()->context_id, ctx.context_id);
  EXPECT_EQ(page.html, sim->serve_page("shopping-mall", profile, pas::profile::profile_hash(profile), 1).html);
  target.clear();
  EXPECT_EQ(target.fetch("shopping-mall", 1).html, sim->serve_page("shopping-mall", std::nullopt, "", 1).html);

  try {
    pas::adsim::handle_page_request(*sim, "news-portal", 1, pas::profile::canonical_document(profile),
                                    std::string(64, 'f'));
    FAIL();
  } catch (const pas::Error& e) {
    EXPECT_EQ(e.code(), pas::ErrorCode::kConsistency);
  }
}

// ---- rater --------------------------------------------------------------

// Fails selected calls (by order) and otherwise forwards to the stub.
class FlakyGateway final : public pas::llm::Gateway {
 public:
  explicit FlakyGateway(std::set<int> fail, std::string bad_reply = {})
      : Gateway(1), inner_(pas::testing::stub_gateway()), fail_(std::move(fail)), bad_(std::move(bad_reply)) {}
  int calls = 0;

 private:
  std::string do_complete(const pas::llm::CompletionRequest& req) override {
    const int n = calls++;
    if (fail_.count(n) || fail_.count(-1)) {
      if (!bad_.empty()) return bad_;
      throw pas::Error(pas::ErrorCode::kGatewayFailure, "connection reset");
    }
    return inner_->complete_text(req);
  }
  std::string do_describe(const pas::llm::ImagePayload& p, std::optional<std::uint64_t> s) override {
    return inner_->describe_image(p, s);
  }
  std::shared_ptr<pas::llm::Gateway> inner_;
  std::set<int> fail_;
  std::string bad_;
};

const pas::scorer::AdDescription kWatch{"ad-1", "A luxury timepiece with a gold band."};

TEST(Rater, PromptCarriesAxisAndAdOnly) {
  const auto prompt = pas::scorer::build_rating_prompt(
      pas::llm::PromptTemplates::defaults().alignment_rating, kWatch, AttributeKind::kIncomeLevel);
  EXPECT_NE(prompt.find("income level"), std::string::npos);
  EXPECT_NE(prompt.find(kWatch.text), std::string::npos);
  for (const char* slot : {"{attribute}", "{low-end label}", "{high-end label}", "{ad description}"}) {
    EXPECT_EQ(prompt.find(slot), std::string::npos) << slot;
  }
}

TEST(Rater, LuxuryWatchScoresHighOnIncome) {
  auto gw = pas::testing::stub_gateway();
  pas::scorer::ScoreOptions o;
  o.repetitions = 5;
  const auto s = pas::scorer::score_ad(kWatch, AttributeKind::kIncomeLevel, *gw, o);
  ASSERT_EQ(s.size(), 5u);
  for (const auto& x : s) {
    EXPECT_FALSE(x.failed);
    EXPECT_EQ(x.score, 90.0);
  }
}

TEST(Rater, SeedDependsOnTextNotReference) {
  EXPECT_EQ(pas::scorer::rater_seed(4, "same text", 2), pas::scorer::rater_seed(4, "same text", 2));
  EXPECT_NE(pas::scorer::rater_seed(4, "same text", 2), pas::scorer::rater_seed(4, "same text", 3));
  auto gw = pas::testing::stub_gateway(2.0);
  pas::scorer::ScoreOptions o;
  o.seed = 9;
  auto a = pas::scorer::score_ad({"x", kWatch.text}, AttributeKind::kIncomeLevel, *gw, o);
  auto b = pas::scorer::score_ad({"y", kWatch.text}, AttributeKind::kIncomeLevel, *gw, o);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].score, b[i].score);
}

TEST(Rater, FailedRepetitionIsMarkedAndOthersProceed) {
  FlakyGateway gw({1, 3});
  const auto s = pas::scorer::score_ad(kWatch, AttributeKind::kIncomeLevel, gw);
  ASSERT_EQ(s.size(), 5u);
  EXPECT_TRUE(s[1].failed);
  EXPECT_TRUE(s[3].failed);
  EXPECT_EQ(s[1].score, 0.0);
  EXPECT_NE(s[1].failure.find("connection reset"), std::string::npos);
  EXPECT_FALSE(s[0].failed);
  EXPECT_EQ(s[4].score, 90.0);
}

TEST(Rater, OutOfRangeIsAnAnomaly) {
  FlakyGateway gw({0}, R"({"score": 140})");
  const auto s = pas::scorer::score_ad(kWatch, AttributeKind::kIncomeLevel, gw);
  EXPECT_TRUE(s[0].failed);
  EXPECT_EQ(s[0].failure.rfind("rating anomaly", 0), 0u);
}

TEST(Rater, AllRepetitionsFailingThrows) {
  FlakyGateway gw({-1});
  try {
    pas::scorer::score_ad(kWatch, AttributeKind::kIncomeLevel, gw);
    FAIL();
  } catch (const pas::Error& e) {
    EXPECT_EQ(e.code(), pas::ErrorCode::kGatewayFailure);
  }
  FlakyGateway bad({-1}, R"({"score": -5})");
  EXPECT_THROW(pas::scorer::score_ad(kWatch, AttributeKind::kIncomeLevel, bad), pas::Error);
  auto gw2 = pas::testing::stub_gateway();
  EXPECT_THROW(pas::scorer::score_ad({"e", "  "}, AttributeKind::kAge, *gw2), pas::Error);
}

TEST(Rater, DescribeUsesCaptionAndAlt) {
  auto gw = pas::testing::stub_gateway();
  const auto cat = pas::adsim::Catalog::load_default();
  const auto& c = cat->creative("c045");
  const auto d = pas::scorer::describe_ad("c045", pas::llm::ImagePayload::markup(c.markup), *gw, 1);
  EXPECT_NE(d.text.find("Luxury watch"), std::string::npos);
  EXPECT_EQ(d.text, pas::scorer::describe_ad("other", pas::llm::ImagePayload::markup(c.markup), *gw, 1).text);
}

// ---- stability ----------------------------------------------------------

AlignmentSample sample(const std::string& ref, double score, int rep, bool failed = false) {
  AlignmentSample s;
  s.ad_ref = ref;
  s.attribute = AttributeKind::kIncomeLevel;
  s.score = score;
  s.repetition_index = rep;
  s.failed = failed;
  return s;
}

TEST(Stability, MatchesBruteForce) {
  std::vector<AlignmentSample> s;
  const std::vector<std::vector<double>> per_ad = {{10, 12, 11, 9, 13}, {28, 29, 30}, {50, 50}, {0, 0, 0}};
  for (std::size_t a = 0; a < per_ad.size(); ++a)
    for (std::size_t r = 0; r < per_ad[a].size(); ++r) s.push_back(sample("ad" + std::to_string(a), per_ad[a][r], r));
  s.push_back(sample("ad1", 99, 9, true));  // failed rows do not count
  const auto rep = pas::scorer::stability_metrics(s);
  ASSERT_EQ(rep.per_ad.size(), 4u);
  double sum_std = 0, sum_cov = 0;
  int n_cov = 0;
  for (std::size_t a = 0; a < per_ad.size(); ++a) {
    EXPECT_EQ(rep.per_ad[a].ad_ref, "ad" + std::to_string(a));
    EXPECT_EQ(rep.per_ad[a].samples, per_ad[a].size());
    EXPECT_NEAR(rep.per_ad[a].std, pas::oracle::pop_std(per_ad[a]), 1e-9);
    sum_std += pas::oracle::pop_std(per_ad[a]);
    if (a < 3) {
      EXPECT_NEAR(*rep.per_ad[a].cov, pas::oracle::cov_percent(per_ad[a]), 1e-9);
      sum_cov += pas::oracle::cov_percent(per_ad[a]);
      ++n_cov;
    }
  }
  EXPECT_FALSE(rep.per_ad[3].cov);
  EXPECT_NEAR(rep.avg_std, sum_std / 4, 1e-9);
  EXPECT_NEAR(*rep.avg_cov, sum_cov / n_cov, 1e-9);
  EXPECT_EQ(rep.notes.size(), 1u);
  const auto csv = pas::scorer::to_csv(rep);
  EXPECT_EQ(csv.rfind("ad_ref,samples,mean,std,cov_percent\n", 0), 0u);
}

TEST(Stability, NeedsTwoSamplesPerAd) {
  EXPECT_THROW(pas::scorer::stability_metrics({sample("a", 1, 0), sample("a", 2, 1), sample("b", 3, 0)}), pas::Error);
  EXPECT_THROW(pas::scorer::stability_metrics({}), pas::Error);
}

TEST(Stability, NoiselessRaterIsPerfectlyStable) {
  auto gw = pas::testing::stub_gateway(0.0);
  std::vector<pas::scorer::AdDescription> ads;
  const auto cat = pas::adsim::Catalog::load_default();
  for (const auto& c : cat->creatives()) {
    ads.push_back(pas::scorer::describe_ad(c.id, pas::llm::ImagePayload::markup(c.markup), *gw));
    if (ads.size() == 10) break;
  }
  const auto rep = pas::scorer::stability_metrics(pas::scorer::score_ads(ads, AttributeKind::kAge, *gw));
  EXPECT_EQ(rep.avg_std, 0.0);
  EXPECT_EQ(rep.per_ad.size(), 10u);
}

}  // namespace
