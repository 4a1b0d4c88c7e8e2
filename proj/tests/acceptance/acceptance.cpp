// Acceptance gate. Prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "pas/adid/corpus.hpp"
#include "pas/adid/evaluation.hpp"
#include "pas/adsim/catalog.hpp"
#include "pas/audit/orchestrator.hpp"
#include "pas/audit/store.hpp"
#include "pas/persona/consistency.hpp"
#include "pas/profile/history_store.hpp"
#include "pas/scorer/alignment.hpp"
#include "pas/scorer/stability.hpp"
#include "pas/stats.hpp"
#include "pas/util/hash.hpp"
#include "support.hpp"

namespace {

using pas::AttributeKind;
using Clock = std::chrono::steady_clock;

const std::string kGuidance = "an adult living in the United States";

struct Outcome {
  bool pass = false;
  std::string detail;
};

// Collects failed sub-checks so one line can say what went wrong.
struct Checks {
  std::vector<std::string> failures;
  void require(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
  Outcome outcome(const std::string& summary) const {
    if (failures.empty()) return {true, summary};
    std::string d = summary;
    for (const auto& f : failures) d += "; " + f;
    return {false, d};
  }
};

std::string fmt(double v, int digits = 4) {
  std::ostringstream o;
  o << std::fixed << std::setprecision(digits) << v;
  return o.str();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

double round2(double percent) { return std::round(percent * 100.0) / 100.0; }

// ---- identification -----------------------------------------------------

Outcome confusion_arithmetic() {
  Checks c;
  const auto m = pas::adid::metrics({777, 28, 0, 0});
  c.require(m.accuracy && round2(*m.accuracy * 100) == 96.52, "accuracy");
  c.require(m.precision && round2(*m.precision * 100) == 100.00, "precision");
  c.require(m.recall && round2(*m.recall * 100) == 96.52, "recall");
  // Independent arithmetic.
  c.require(std::fabs(*m.recall - 777.0 / 805.0) < 1e-15, "recall oracle");
  return c.outcome("accuracy " + fmt(*m.accuracy * 100, 2) + "% precision " + fmt(*m.precision * 100, 2) +
                   "% recall " + fmt(*m.recall * 100, 2) + "%");
}

Outcome corpus_identification() {
  Checks c;
  const auto corpus = pas::adid::Corpus::load(std::string(PAS_FIXTURE_DIR) + "/ad_corpus");
  std::size_t slots = 0;
  for (const auto& [page, labels] : corpus.labels) slots += labels.size();
  c.require(corpus.pages.size() >= 25, "fewer than 25 pages");
  c.require(slots >= 80, "fewer than 80 labeled slots");
  const auto r = pas::adid::evaluate_corpus(corpus);
  const double p = r.metrics.precision.value_or(0), rc = r.metrics.recall.value_or(0);
  c.require(p == 1.0, "precision below 1");
  c.require(rc >= 0.95, "recall below 0.95");
  c.require(r.matrix.fn > 0, "the floating-window misses are not counted");
  return c.outcome(std::to_string(corpus.pages.size()) + " pages, " + std::to_string(slots) +
                   " slots, precision " + fmt(p) + " recall " + fmt(rc));
}

// ---- rating stability ---------------------------------------------------

pas::scorer::StabilityReport stability_run(double sigma, AttributeKind kind,
                                           std::vector<pas::scorer::AlignmentSample>* out = nullptr) {
  auto gw = pas::testing::stub_gateway(sigma);
  const auto catalog = pas::adsim::Catalog::load_default();
  const auto& pool = catalog->creatives();
  std::vector<pas::scorer::AdDescription> ads;
  for (std::size_t i = 0; i < 20; ++i) {
    const auto& cr = pool[i * pool.size() / 20];
    ads.push_back(pas::scorer::describe_ad(cr.id, pas::llm::ImagePayload::markup(cr.markup), *gw));
  }
  pas::scorer::ScoreOptions so;
  so.repetitions = 5;
  so.seed = 11;
  auto samples = pas::scorer::score_ads(ads, kind, *gw, so);
  if (out) *out = samples;
  return pas::scorer::stability_metrics(samples);
}

Outcome stability() {
  Checks c;
  std::string summary;
  for (auto kind : pas::kAllAttributes) {
    std::vector<pas::scorer::AlignmentSample> samples;
    const auto noisy = stability_run(1.0, kind, &samples);
    const auto flat = stability_run(0.0, kind);
    const std::string k(pas::key(kind));
    c.require(noisy.avg_std >= 0.5 && noisy.avg_std <= 1.5, k + " avg_std " + fmt(noisy.avg_std));
    c.require(noisy.avg_cov && *noisy.avg_cov < 10.0, k + " avg_cov");
    c.require(flat.avg_std == 0.0, k + " sigma-0 avg_std " + fmt(flat.avg_std, 6));

    // Brute-force recomputation from the raw samples.
    std::map<std::string, std::vector<double>> by_ad;
    std::vector<std::string> order;
    for (const auto& s : samples) {
      if (s.failed) continue;
      if (!by_ad.count(s.ad_ref)) order.push_back(s.ad_ref);
      by_ad[s.ad_ref].push_back(s.score);
    }
    double sum_std = 0, sum_cov = 0;
    int n_cov = 0;
    c.require(noisy.per_ad.size() == order.size(), k + " ad count");
    for (std::size_t i = 0; i < order.size() && i < noisy.per_ad.size(); ++i) {
      const auto& v = by_ad[order[i]];
      const double sd = pas::oracle::pop_std(v);
      c.require(std::fabs(noisy.per_ad[i].std - sd) < 1e-9, k + " std of " + order[i]);
      sum_std += sd;
      const double mu = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
      if (mu > 0) {
        const double cv = pas::oracle::cov_percent(v);
        c.require(noisy.per_ad[i].cov && std::fabs(*noisy.per_ad[i].cov - cv) < 1e-9, k + " cov of " + order[i]);
        sum_cov += cv;
        ++n_cov;
      }
    }
    c.require(std::fabs(noisy.avg_std - sum_std / order.size()) < 1e-9, k + " avg_std oracle");
    c.require(n_cov > 0 && noisy.avg_cov && std::fabs(*noisy.avg_cov - sum_cov / n_cov) < 1e-9,
              k + " avg_cov oracle");
    summary += (summary.empty() ? "" : ", ") + k + " std " + fmt(noisy.avg_std, 3) + " cov " +
               fmt(noisy.avg_cov.value_or(-1), 2) + "%";
  }
  return c.outcome(summary);
}

// ---- statistics ---------------------------------------------------------

pas::stats::GroupedSamples grouped(const std::vector<std::vector<double>>& g) {
  pas::stats::GroupedSamples out;
  for (std::size_t i = 0; i < g.size(); ++i) out.push_back({"g" + std::to_string(i), g[i]});
  return out;
}

Outcome statistics() {
  Checks c;
  const std::vector<std::vector<double>> g = {{1, 2, 3}, {4, 5, 6}, {7, 8, 9}};
  const auto kw = pas::stats::kruskal_wallis(grouped(g));
  c.require(std::fabs(kw.h_statistic - 7.2) < 1e-12, "H " + fmt(kw.h_statistic, 12));
  c.require(std::fabs(pas::oracle::kw_h(g) - 7.2) < 1e-12, "oracle H");
  c.require(std::fabs(kw.p_value - 0.027) <= 0.002, "p " + fmt(kw.p_value));
  c.require(std::fabs(kw.p_value - pas::oracle::chi2_sf_even(7.2, 2)) < 1e-12, "p vs closed form");

  const auto same = pas::stats::kruskal_wallis(grouped({{5, 5, 5}, {5, 5, 5}, {5, 5}}));
  c.require(same.h_statistic == 0.0 && same.p_value == 1.0, "identical groups");

  std::mt19937_64 rng(2024);
  int invariant = 0;
  for (int seed = 0; seed < 100; ++seed) {
    std::uniform_int_distribution<int> sizes(2, 8), ticks(0, 30);
    std::vector<std::vector<double>> raw(3), moved(3);
    for (int k = 0; k < 3; ++k) {
      const int n = sizes(rng);
      for (int i = 0; i < n; ++i) {
        const double x = ticks(rng) / 3.0;
        raw[k].push_back(x);
        moved[k].push_back(std::exp(x / 4.0) * 7.0 - 2.0);
      }
    }
    const auto a = pas::stats::kruskal_wallis(grouped(raw));
    const auto b = pas::stats::kruskal_wallis(grouped(moved));
    if (std::fabs(a.h_statistic - b.h_statistic) < 1e-9 && std::fabs(a.p_value - b.p_value) < 1e-9 &&
        std::fabs(a.h_statistic - pas::oracle::kw_h(raw)) < 1e-9) {
      ++invariant;
    }
  }
  c.require(invariant == 100, "monotone invariance " + std::to_string(invariant) + "/100");

  // 20 yes/yes, 5 yes/no, 10 no/yes, 15 no/no: po 0.7, pe 0.5.
  std::vector<std::string> ra, rb;
  auto add = [&](int n, const char* x, const char* y) {
    for (int i = 0; i < n; ++i) {
      ra.push_back(x);
      rb.push_back(y);
    }
  };
  add(20, "yes", "yes");
  add(5, "yes", "no");
  add(10, "no", "yes");
  add(15, "no", "no");
  const auto kappa = pas::stats::cohen_kappa(ra, rb);
  c.require(kappa && std::fabs(*kappa - 0.4) < 1e-12, "kappa hand example");
  // Three categories: po = 7/9, pe = (3*3 + 3*2 + 3*4) / 81 = 27/81.
  const std::vector<std::string> x = {"a", "a", "a", "b", "b", "b", "c", "c", "c"};
  const std::vector<std::string> y = {"a", "a", "b", "b", "b", "c", "c", "c", "c"};
  const auto k3 = pas::stats::cohen_kappa(x, y);
  c.require(k3 && std::fabs(*k3 - (7.0 / 9 - 27.0 / 81) / (1 - 27.0 / 81)) < 1e-12, "kappa three categories");
  const auto self = pas::stats::cohen_kappa(x, x);
  c.require(self && std::fabs(*self - 1.0) < 1e-15, "kappa(a,a)");
  return c.outcome("H " + fmt(kw.h_statistic, 4) + " p " + fmt(kw.p_value) + ", invariance " +
                   std::to_string(invariant) + "/100, kappa " + fmt(kappa.value_or(-1), 4));
}

// ---- simulator audits ---------------------------------------------------

struct AuditBench {
  pas::testing::TempDir dir{"acceptance"};
  std::shared_ptr<pas::llm::Gateway> gateway = pas::testing::stub_gateway(1.0);
  std::shared_ptr<pas::persona::PersonaEngine> engine = pas::testing::stub_engine(gateway);
  pas::persona::PersonaStore personas{dir.sub("personas")};
  pas::audit::SessionStore sessions{dir.str()};

  pas::audit::Orchestrator orchestrator() const {
    pas::audit::OrchestratorOptions o;
    o.sleep = [](double) {};
    return pas::audit::Orchestrator(gateway, personas, sessions, o);
  }

  std::vector<std::string> sets(AttributeKind kind, std::uint64_t seed, int count) {
    std::vector<std::string> ids;
    for (int i = 0; i < count; ++i) {
      ids.push_back(pas::testing::make_set(*engine, personas, kind,
                                           pas::util::mix_seed(seed, static_cast<std::uint64_t>(i)), kGuidance));
    }
    return ids;
  }

  static pas::audit::AuditConfig config(std::vector<std::string> sets, std::uint64_t seed) {
    pas::audit::AuditConfig c;
    c.persona_sets = std::move(sets);
    c.attribute = AttributeKind::kIncomeLevel;
    c.sites = {"shopping-mall"};
    c.rounds = 3;
    c.repetitions_per_ad = 5;
    c.seed = seed;
    c.sim.bias_strength = 3.0;
    c.sim.slots_per_page = 4;
    c.sim.rng_seed = seed;
    return c;
  }
};

Outcome contrasting_levels() {
  AuditBench bench;
  const auto orch = bench.orchestrator();
  int significant = 0;
  std::string ps;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto s = orch.run_audit(AuditBench::config(bench.sets(AttributeKind::kIncomeLevel, seed, 1), seed));
    const double p = s.report && s.report->kw ? s.report->kw->p_value : 1.0;
    if (s.status == pas::audit::SessionStatus::kDone && p < 0.05) ++significant;
    ps += (ps.empty() ? "" : " ") + fmt(p, 5);
  }
  return {significant >= 9, std::to_string(significant) + "/10 seeds p<0.05 [" + ps + "]"};
}

Outcome similar_personas() {
  AuditBench bench;
  const auto orch = bench.orchestrator();
  int consistent = 0;
  std::string ps;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto c = AuditBench::config(bench.sets(AttributeKind::kIncomeLevel, seed, 3), seed);
    c.levels = {"high"};
    const auto s = orch.run_audit(c);
    double p = 0.0;
    if (s.report && s.report->similar_persona.size() == 1 && s.report->similar_persona[0].kw) {
      p = s.report->similar_persona[0].kw->p_value;
    }
    if (s.status == pas::audit::SessionStatus::kDone && p > 0.1) ++consistent;
    ps += (ps.empty() ? "" : " ") + fmt(p, 3);
  }
  return {consistent >= 8, std::to_string(consistent) + "/10 seeds p>0.1 [" + ps + "]"};
}

Outcome determinism_and_resume() {
  Checks c;
  AuditBench a, b;
  const auto cfg_a = AuditBench::config(a.sets(AttributeKind::kIncomeLevel, 42, 1), 42);
  const auto cfg_b = AuditBench::config(b.sets(AttributeKind::kIncomeLevel, 42, 1), 42);
  const auto ra = a.orchestrator().run_audit(cfg_a);
  const auto rb = b.orchestrator().run_audit(cfg_b);
  const auto bytes_a = slurp(a.sessions.directory(ra.id) + "/report.json");
  const auto bytes_b = slurp(b.sessions.directory(rb.id) + "/report.json");
  c.require(!bytes_a.empty() && bytes_a == bytes_b, "report.json differs");

  const auto loaded = a.sessions.load(ra.id);
  c.require(loaded == ra, "save/load round trip");

  const auto orch = a.orchestrator();
  const auto partial = orch.create_session(cfg_a, std::string("au-acceptance-resume"));
  std::atomic<bool> stop{false};
  pas::audit::RunOptions run;
  run.stop = &stop;
  run.on_progress = [&](const pas::audit::AuditSession& s) {
    if (s.cells.size() == 4) stop = true;
  };
  const auto stopped = orch.run_session(partial.id, run);
  c.require(stopped.status == pas::audit::SessionStatus::kPending && stopped.cells.size() == 4, "stop");
  // Progress never drops below the checkpoint, and the first four cell
  // records come back untouched.
  std::size_t fewest = 9;
  pas::audit::RunOptions resume;
  resume.on_progress = [&](const pas::audit::AuditSession& s) { fewest = std::min(fewest, s.cells.size()); };
  const auto done = orch.run_session(partial.id, resume);
  c.require(done.status == pas::audit::SessionStatus::kDone, "resumed status");
  c.require(fewest >= 4 && done.cells.size() == 9, "resume restarted from scratch");
  c.require(std::equal(stopped.cells.begin(), stopped.cells.end(), done.cells.begin()),
            "resume revisited finished cells");
  c.require(done.cells == ra.cells && done.captures == ra.captures && done.samples == ra.samples &&
                done.report == ra.report,
            "resumed result differs");
  const auto again = orch.run_session(partial.id);
  c.require(again.cells == done.cells, "Done session revisited");
  return c.outcome("report.json " + std::to_string(bytes_a.size()) + " bytes identical, resume visited " +
                   std::to_string(done.cells.size() - stopped.cells.size()) + " of 9 cells");
}

Outcome persona_invariants() {
  Checks c;
  pas::testing::TempDir dir("acceptance-history");
  auto engine = pas::testing::stub_engine();
  int sets = 0, variants = 0, stores = 0;
  for (auto kind : pas::kAllAttributes) {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      const auto base = engine->generate_base_persona(kGuidance, seed * 7919);
      const auto set = engine->generate_variants(base, kind, seed);
      ++sets;
      for (const auto& v : set.variants) {
        ++variants;
        const auto r = pas::persona::validate_variant_consistency(set.base, v, kind, engine->guardrails());
        c.require(r.pass, set.id + "/" + v.level + " inconsistent");
        if (!v.profile) {
          c.require(false, set.id + "/" + v.level + " has no profile");
          continue;
        }
        const auto path = dir.sub("History-" + std::to_string(stores++));
        pas::profile::write_history_store(v.profile->history, path);
        c.require(pas::profile::read_history_store(path) == v.profile->history,
                  set.id + "/" + v.level + " history round trip");
      }
    }
  }
  return c.outcome(std::to_string(sets) + " sets, " + std::to_string(variants) + " variants consistent, " +
                   std::to_string(stores) + " history stores round-tripped");
}

struct Criterion {
  std::string name;
  double limit_s;  // 0 = no runtime bound
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {"confusion-matrix-arithmetic", 1.0, confusion_arithmetic},
      {"corpus-identification", 10.0, corpus_identification},
      {"rating-stability", 30.0, stability},
      {"statistics-oracles", 0.0, statistics},
      {"contrasting-levels-differ", 60.0, contrasting_levels},
      {"similar-personas-consistent", 0.0, similar_personas},
      {"determinism-persistence-resume", 0.0, determinism_and_resume},
      {"persona-invariants", 0.0, persona_invariants},
  };
  int failed = 0;
  for (const auto& cr : criteria) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = cr.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    if (cr.limit_s > 0 && secs >= cr.limit_s) {
      o.pass = false;
      o.detail += "; over the " + fmt(cr.limit_s, 0) + " s budget";
    }
    if (!o.pass) ++failed;
    std::cout << (o.pass ? "PASS " : "FAIL ") << cr.name << " (" << fmt(secs, 2) << " s): " << o.detail
              << std::endl;
  }
  std::cout << (failed == 0 ? "ALL PASS" : std::to_string(failed) + " FAILED") << std::endl;
  return failed == 0 ? 0 : 1;
}
