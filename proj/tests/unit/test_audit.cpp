#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <thread>

#include "pas/adsim/adapter.hpp"
#include "pas/audit/orchestrator.hpp"
#include "pas/audit/registry.hpp"
#include "pas/audit/report.hpp"
#include "pas/audit/store.hpp"
#include "pas/error.hpp"
#include "pas/profile/profile_document.hpp"
#include "pas/stats.hpp"
#include "support.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using pas::AttributeKind;
using pas::ErrorCode;
using namespace pas::audit;

template <typename F>
pas::Error error_of(F&& f) {
  try {
    f();
  } catch (const pas::Error& e) {
    return e;
  }
  ADD_FAILURE() << "expected pas::Error";
  return pas::Error(ErrorCode::kInternal, "none");
}

// Simulator target that fails chosen (site, round) fetches a fixed number
// of times, or ignores the applied profile altogether.
class ScriptedTarget final : public pas::profile::TargetAdapter {
 public:
  struct Script {
    std::map<int, int> failures_by_round;  // round -> failing attempts per visit (-1 = always)
    bool ignore_profile = false;
  };
  ScriptedTarget(std::shared_ptr<const pas::adsim::Simulator> sim, Script script)
      : inner_(sim), sim_(std::move(sim)), script_(std::move(script)) {}
  std::string name() const override { return "scripted"; }
  std::set<pas::profile::Surface> capabilities() const override { return pas::profile::kAllSurfaces; }
  pas::profile::AppliedContext apply(const pas::profile::BrowserProfile& p) override {
    if (script_.ignore_profile) return {"fixed", "fixed", pas::profile::kAllSurfaces, {}};
    auto ctx = inner_.apply(p);
    context_ = ctx.context_id;
    return ctx;
  }
  void clear() override { inner_.clear(); }
  pas::profile::PageFetch fetch(const std::string& site, int round) override {
    auto it = script_.failures_by_round.find(round);
    if (it != script_.failures_by_round.end()) {
      auto& used = attempts_[{context_, site, round}];
      if (it->second < 0 || used < it->second) {
        ++used;
        throw pas::Error(ErrorCode::kTargetUnreachable, "scripted outage");
      }
    }
    if (script_.ignore_profile) {
      const auto page = sim_->serve_page(site, std::nullopt, "", round);
      return {"sim://local/site/" + site + "?round=" + std::to_string(round), page.html, 200, std::nullopt};
    }
    return inner_.fetch(site, round);
  }

 private:
  pas::adsim::SimulatorAdapter inner_;
  std::shared_ptr<const pas::adsim::Simulator> sim_;
  Script script_;
  std::map<std::tuple<std::string, std::string, int>, int> attempts_;
  std::string context_;
};

class AuditTest : public ::testing::Test {
 protected:
  pas::testing::TempDir dir{"audit"};
  std::shared_ptr<pas::llm::Gateway> gateway = pas::testing::stub_gateway(1.0);
  std::shared_ptr<pas::persona::PersonaEngine> engine = pas::testing::stub_engine(gateway);
  pas::persona::PersonaStore personas{dir.sub("personas")};
  SessionStore sessions{dir.str()};
  std::vector<double> sleeps;

  Orchestrator orchestrator(TargetFactory factory = {}) {
    OrchestratorOptions o;
    o.target_factory = std::move(factory);
    o.sleep = [this](double s) { sleeps.push_back(s); };
    return Orchestrator(gateway, personas, sessions, o);
  }

  static TargetFactory scripted(ScriptedTarget::Script script) {
    return [script](const AuditConfig& c) {
      auto sim = std::make_shared<pas::adsim::Simulator>(pas::adsim::Catalog::load_default(), c.sim);
      return std::make_unique<ScriptedTarget>(sim, script);
    };
  }

  AuditConfig config(std::vector<std::string> sets, std::uint64_t seed = 3) {
    AuditConfig c;
    c.persona_sets = std::move(sets);
    c.sites = {"shopping-mall"};
    c.rounds = 3;
    c.attribute = AttributeKind::kIncomeLevel;
    c.repetitions_per_ad = 3;
    c.seed = seed;
    c.sim.bias_strength = 3.0;
    c.sim.slots_per_page = 4;
    c.sim.rng_seed = seed;
    return c;
  }

  std::string income_set(std::uint64_t seed) {
    return pas::testing::make_set(*engine, personas, AttributeKind::kIncomeLevel, seed);
  }
};

// ---- configuration ------------------------------------------------------

TEST(AuditConfigParse, StrictWithFieldPaths) {
  const json good = {{"persona_sets", {"ps-1"}}, {"sites", {"news-portal"}}, {"attribute", "income"},
                     {"rounds", 2}, {"request_delay_s", nullptr}};
  const auto c = parse_audit_config(good);
  EXPECT_EQ(c.rounds, 2);
  EXPECT_EQ(c.attribute, AttributeKind::kIncomeLevel);
  EXPECT_EQ(parse_audit_config(to_json(c)), c);

  auto with = [&](const char* key, json value) {
    auto j = good;
    j[key] = std::move(value);
    return error_of([&] { parse_audit_config(j); });
  };
  auto e = with("colour", "blue");
  EXPECT_EQ(e.code(), ErrorCode::kInvalidArgument);
  EXPECT_EQ(e.detail()["field"], "/colour");
  EXPECT_EQ(with("rounds", 0).detail()["field"], "/rounds");
  EXPECT_EQ(with("rounds", "three").detail()["field"], "/rounds");
  EXPECT_EQ(with("sites", json::array()).detail()["field"], "/sites");
  EXPECT_EQ(with("persona_sets", {"ps-1", "ps-1"}).detail()["field"], "/persona_sets/1");
  EXPECT_EQ(with("attribute", "shoe size").detail()["field"], "/attribute");
  EXPECT_EQ(with("repetitions_per_ad", -1).detail()["field"], "/repetitions_per_ad");
  EXPECT_EQ(with("levels", {"enormous"}).detail()["field"], "/levels/0");
}

TEST(AuditConfigParse, DelayDefaults) {
  AuditConfig c;
  EXPECT_EQ(c.effective_delay_s(), 0.0);
  c.target = std::string(kTargetLive);
  EXPECT_EQ(c.effective_delay_s(), 2.0);
  c.request_delay_s = 0.25;
  EXPECT_EQ(c.effective_delay_s(), 0.25);
}

TEST(Plan, VariantSiteRoundOrder) {
  AuditSession s;
  for (int i = 0; i < 15; ++i) s.variants.push_back({"v" + std::to_string(i), "ps", "low", "l"});
  s.config.sites = {"a", "b", "c", "d", "e"};
  s.config.rounds = 3;
  const auto plan = plan_cells(s);
  ASSERT_EQ(plan.size(), 15u * 5 * 3);
  EXPECT_EQ(s.total_cells(), plan.size());
  EXPECT_EQ(std::set<CellKey>(plan.begin(), plan.end()).size(), plan.size());
  EXPECT_EQ(plan[0].variant_id, "v0");
  EXPECT_EQ(plan[0].round, 1);
  EXPECT_EQ(plan[2].round, 3);
  EXPECT_EQ(plan[3].site, "b");
  EXPECT_EQ(plan[15].variant_id, "v1");
}

// ---- orchestration ------------------------------------------------------

TEST_F(AuditTest, FullRunCapturesEverySlot) {
  const auto set = income_set(1);
  auto orch = orchestrator();
  std::vector<double> progress;
  RunOptions run;
  run.on_progress = [&](const AuditSession& s) { progress.push_back(s.progress); };
  const auto s = orch.run_audit(config({set}), run);
  ASSERT_EQ(s.status, SessionStatus::kDone) << s.failure_reason;
  EXPECT_EQ(s.cells.size(), 9u);
  EXPECT_EQ(s.captures.size(), 36u);
  EXPECT_EQ(s.samples.size(), 36u * 3);
  EXPECT_EQ(s.progress, 1.0);
  ASSERT_FALSE(progress.empty());
  EXPECT_TRUE(std::is_sorted(progress.begin(), progress.end()));
  EXPECT_EQ(progress.back(), 1.0);
  for (const auto& c : s.cells) {
    EXPECT_TRUE(c.ok);
    EXPECT_EQ(c.attempts, 1);
    EXPECT_EQ(c.capture_ids.size(), 4u);
  }
  std::set<std::string> ids;
  for (const auto& c : s.captures) {
    ids.insert(c.id);
    EXPECT_FALSE(c.description.empty());
    EXPECT_TRUE(c.error.empty());
    EXPECT_NE(c.payload.find("aria-label=\"Advertisement\""), std::string::npos);
  }
  EXPECT_EQ(ids.size(), 36u);
  EXPECT_EQ(*ids.begin(), "cap-001");
  ASSERT_TRUE(s.report);
  EXPECT_EQ(s.report->per_variant.size(), 3u);
  EXPECT_TRUE(s.report->kw);
  EXPECT_FALSE(s.report->partial);
  EXPECT_EQ(s.report->significance_marks.size(), 3u);
  EXPECT_TRUE(sleeps.empty());
}

TEST_F(AuditTest, PersistedLayoutRoundTrips) {
  const auto set = income_set(2);
  auto orch = orchestrator();
  const auto s = orch.run_audit(config({set}));
  const fs::path d = sessions.directory(s.id);
  for (const char* f : {"session.json", "samples.json", "report.json"}) EXPECT_TRUE(fs::exists(d / f)) << f;
  std::size_t json_files = 0, html_files = 0;
  for (const auto& e : fs::directory_iterator(d / "captures")) {
    json_files += e.path().extension() == ".json";
    html_files += e.path().extension() == ".html";
  }
  EXPECT_EQ(json_files, 36u);
  EXPECT_EQ(html_files, 36u);
  EXPECT_EQ(sessions.load(s.id), s);

  // Another directory, same content.
  const auto copy = dir.sub("copy");
  persist_session(s, copy);
  EXPECT_EQ(load_session(copy), s);

  std::ifstream in(d / "captures" / "001.json");
  const auto cap = json::parse(in);
  EXPECT_EQ(cap["payload_file"], "001.html");
  EXPECT_FALSE(cap.contains("payload"));
}

TEST_F(AuditTest, OtherSchemaVersionsAreRejected) {
  const auto set = income_set(2);
  auto orch = orchestrator();
  const auto s = orch.create_session(config({set}), std::string("au-schema"));
  const auto path = fs::path(sessions.directory(s.id)) / "session.json";
  json j;
  {
    std::ifstream in(path);
    j = json::parse(in);
  }
  j["schema_version"] = kSessionSchemaVersion + 1;
  std::ofstream(path) << j.dump();
  EXPECT_EQ(error_of([&] { sessions.load(s.id); }).code(), ErrorCode::kSchemaVersion);
  EXPECT_EQ(error_of([&] { sessions.load("au-nothing"); }).code(), ErrorCode::kNotFound);
  EXPECT_THROW(check_session_id("../etc"), pas::Error);
}

TEST_F(AuditTest, CreateSessionChecksPersonaSets) {
  auto orch = orchestrator();
  auto e = error_of([&] { orch.create_session(config({"ps-missing"})); });
  EXPECT_EQ(e.code(), ErrorCode::kNotFound);
  EXPECT_EQ(e.detail()["field"], "/persona_sets/0");
  const auto age = pas::testing::make_set(*engine, personas, AttributeKind::kAge, 4);
  EXPECT_EQ(error_of([&] { orch.create_session(config({age})); }).code(), ErrorCode::kInvalidArgument);
  auto live = config({income_set(4)});
  live.target = std::string(kTargetLive);
  live.target_url = "https://example.test";
  EXPECT_EQ(error_of([&] { orch.run_audit(live); }).code(), ErrorCode::kUnsupported);
}

TEST_F(AuditTest, ResumeVisitsOnlyMissingCellsAndMatchesUninterruptedRun) {
  const auto set = income_set(5);
  auto orch = orchestrator();
  const auto whole = orch.run_audit(config({set}));

  const auto partial = orch.create_session(config({set}), std::string("au-resume"));
  std::atomic<bool> stop{false};
  RunOptions run;
  run.stop = &stop;
  run.on_progress = [&](const AuditSession& s) {
    if (s.cells.size() == 4) stop = true;
  };
  const auto stopped = orch.run_session(partial.id, run);
  EXPECT_EQ(stopped.status, SessionStatus::kPending);
  EXPECT_EQ(stopped.cells.size(), 4u);
  EXPECT_EQ(sessions.load(partial.id).cells.size(), 4u);

  // A capture written after the last checkpoint is an orphan; resume drops it.
  auto orphan = stopped.captures.front();
  orphan.id = capture_id(99);
  write_capture(orphan, sessions.directory(partial.id));

  std::size_t visited = 0;
  RunOptions resume;
  resume.on_progress = [&](const AuditSession& s) { visited = s.cells.size() - 4; };
  const auto done = orch.run_session(partial.id, resume);
  ASSERT_EQ(done.status, SessionStatus::kDone);
  EXPECT_EQ(visited, 5u);
  EXPECT_EQ(done.cells, whole.cells);
  EXPECT_EQ(done.captures, whole.captures);
  EXPECT_EQ(done.samples, whole.samples);
  EXPECT_EQ(done.report, whole.report);
  EXPECT_FALSE(fs::exists(fs::path(sessions.directory(partial.id)) / "captures" / "099.json"));

  // Done sessions are not revisited.
  EXPECT_EQ(orch.run_session(partial.id).cells, done.cells);
}

TEST_F(AuditTest, TransientFailuresAreRetried) {
  const auto set = income_set(6);
  auto orch = orchestrator(scripted({{{2, 1}}, false}));
  const auto s = orch.run_audit(config({set}));
  ASSERT_EQ(s.status, SessionStatus::kDone);
  for (const auto& c : s.cells) EXPECT_EQ(c.attempts, c.key.round == 2 ? 2 : 1);
  EXPECT_TRUE(s.report->gaps.empty());
}

TEST_F(AuditTest, PersistentFailuresBecomeGaps) {
  const auto set = income_set(6);
  auto orch = orchestrator(scripted({{{2, -1}}, false}));
  const auto s = orch.run_audit(config({set}));
  ASSERT_EQ(s.status, SessionStatus::kDone);
  EXPECT_EQ(s.gap_count(), 3u);
  EXPECT_EQ(s.captures.size(), 24u);
  ASSERT_TRUE(s.report);
  EXPECT_EQ(s.report->gaps.size(), 3u);
  EXPECT_TRUE(s.report->partial);
  EXPECT_NE(std::find(s.report->flags.begin(), s.report->flags.end(), "gaps:3"), s.report->flags.end());
  for (const auto& g : s.report->gaps) {
    EXPECT_EQ(g.cell.round, 2);
    EXPECT_NE(g.error.find("scripted outage"), std::string::npos);
  }
  for (const auto& c : s.cells) {
    if (!c.ok) EXPECT_EQ(c.attempts, 3);
  }
}

TEST_F(AuditTest, MostlyFailingSessionFails) {
  const auto set = income_set(6);
  auto orch = orchestrator(scripted({{{2, -1}, {3, -1}}, false}));
  const auto s = orch.run_audit(config({set}));
  EXPECT_EQ(s.status, SessionStatus::kFailed);
  EXPECT_NE(s.failure_reason.find("scripted outage"), std::string::npos);
  EXPECT_FALSE(s.report);
  EXPECT_EQ(sessions.load(s.id).status, SessionStatus::kFailed);
}

TEST_F(AuditTest, IdenticalServingGivesNoDifference) {
  const auto set = income_set(7);
  auto orch = orchestrator(scripted({{}, true}));
  const auto s = orch.run_audit(config({set}));
  ASSERT_EQ(s.status, SessionStatus::kDone);
  ASSERT_TRUE(s.report->kw);
  EXPECT_NEAR(s.report->kw->p_value, 1.0, 1e-12);
  for (const auto& m : s.report->significance_marks) EXPECT_EQ(m.mark, "");
}

TEST_F(AuditTest, SimilarPersonasShareALevel) {
  const std::vector<std::string> sets = {income_set(11), income_set(12), income_set(13)};
  auto cfg = config(sets);
  cfg.levels = {"high"};
  auto orch = orchestrator();
  const auto s = orch.run_audit(cfg);
  ASSERT_EQ(s.status, SessionStatus::kDone);
  EXPECT_EQ(s.variants.size(), 3u);
  ASSERT_EQ(s.report->similar_persona.size(), 1u);
  const auto& check = s.report->similar_persona[0];
  EXPECT_EQ(check.level, "high");
  EXPECT_EQ(check.labels.size(), 3u);
  EXPECT_EQ(check.labels[0], "high@" + sets[0]);
  ASSERT_TRUE(check.kw);
  EXPECT_EQ(check.consistent, check.kw->p_value > 0.1);
}

TEST_F(AuditTest, DelayIsHonouredBetweenVisits) {
  auto cfg = config({income_set(8)});
  cfg.request_delay_s = 0.5;
  cfg.rounds = 2;
  auto orch = orchestrator();
  orch.run_audit(cfg);
  EXPECT_EQ(sleeps, std::vector<double>(5, 0.5));
}

// ---- report -------------------------------------------------------------

AuditSession hand_session() {
  AuditSession s;
  s.config.attribute = AttributeKind::kIncomeLevel;
  s.config.sites = {"x"};
  s.config.rounds = 1;
  s.variants = {{"v-low", "ps", "low", "low"}, {"v-mid", "ps", "medium", "medium"},
                {"v-high", "ps", "high", "high"}};
  const std::map<std::string, std::vector<std::vector<double>>> scores = {
      {"v-low", {{10, 12}, {20, 22}, {15, 15}}},
      {"v-mid", {{50, 52}, {40, 40}}},
      {"v-high", {{90, 80}, {70, 75}, {88, 86}, {60, 60}}}};
  int next = 1;
  for (const auto& v : s.variants) {
    for (const auto& reps : scores.at(v.variant_id)) {
      AdCapture c;
      c.id = capture_id(next++);
      c.variant_id = v.variant_id;
      c.level = v.level;
      c.persona_set = v.persona_set;
      s.captures.push_back(c);
      for (std::size_t r = 0; r < reps.size(); ++r) {
        pas::scorer::AlignmentSample a;
        a.ad_ref = c.id;
        a.attribute = AttributeKind::kIncomeLevel;
        a.score = reps[r];
        a.repetition_index = static_cast<int>(r);
        s.samples.push_back(a);
      }
    }
  }
  return s;
}

TEST(Report, KruskalWallisRunsOnCaptureMeans) {
  const auto s = hand_session();
  const auto r = build_distribution_report(s);
  ASSERT_EQ(r.per_variant.size(), 3u);
  EXPECT_EQ(r.per_variant[0].capture_means, (std::vector<double>{11, 21, 15}));
  EXPECT_EQ(r.per_variant[2].scores.size(), 8u);
  const auto direct = pas::stats::kruskal_wallis(
      {{"low", {11, 21, 15}}, {"medium", {51, 40}}, {"high", {85, 72.5, 87, 60}}});
  ASSERT_TRUE(r.kw);
  EXPECT_EQ(*r.kw, direct);
  EXPECT_NEAR(r.per_variant[1].fit.mean, 45.5, 1e-12);
  EXPECT_NEAR(r.per_variant[1].fit.std, pas::stats::population_std(std::vector<double>{50, 52, 40, 40}), 1e-12);
  EXPECT_FALSE(r.partial);
  ASSERT_EQ(r.significance_marks.size(), 3u);
  EXPECT_EQ(r.significance_marks[1].label_b, "high");
  EXPECT_FALSE(format_report_table(r).empty());
}

TEST(Report, FailedSamplesAndThinVariants) {
  auto s = hand_session();
  for (auto& a : s.samples) {
    if (a.ad_ref == "cap-004" || a.ad_ref == "cap-005") {
      a.failed = true;
      a.failure = "GatewayFailure: boom";
    }
  }
  s.captures[3].error = "every repetition failed";
  s.captures[4].error = "every repetition failed";
  const auto r = build_distribution_report(s);
  EXPECT_FALSE(r.per_variant[1].sufficient);
  EXPECT_TRUE(r.partial);
  const auto has = [&](const std::string& f) {
    return std::find(r.flags.begin(), r.flags.end(), f) != r.flags.end();
  };
  EXPECT_TRUE(has("insufficient_samples:medium"));
  EXPECT_TRUE(has("failed_samples:4"));
  EXPECT_TRUE(has("failed_captures:2"));
  ASSERT_TRUE(r.kw);
  EXPECT_EQ(r.kw->degrees_of_freedom, 1);
}

TEST(Report, JsonRoundTrip) {
  const auto r = build_distribution_report(hand_session());
  json j = r;
  EXPECT_EQ(j.get<DistributionReport>(), r);
}

// ---- registry -----------------------------------------------------------

TEST(Registry, OneWorkerPerSession) {
  SessionRegistry reg;
  std::atomic<bool> started{false};
  reg.launch("au-1", [&](const std::atomic<bool>& stop) {
    started = true;
    while (!stop.load()) std::this_thread::sleep_for(std::chrono::milliseconds(1));
  });
  while (!started) std::this_thread::sleep_for(std::chrono::milliseconds(1));
  EXPECT_TRUE(reg.running("au-1"));
  EXPECT_EQ(error_of([&] { reg.launch("au-1", [](const std::atomic<bool>&) {}); }).code(), ErrorCode::kConflict);
  StatusSnapshot snap;
  snap.id = "au-1";
  snap.progress = 0.5;
  reg.publish(snap);
  EXPECT_EQ(reg.snapshot("au-1")->progress, 0.5);
  EXPECT_FALSE(reg.snapshot("au-2"));
  reg.shutdown();
  EXPECT_FALSE(reg.running("au-1"));
  EXPECT_EQ(error_of([&] { reg.launch("au-3", [](const std::atomic<bool>&) {}); }).code(), ErrorCode::kConflict);
}

TEST(Registry, WorkerExceptionsDoNotEscape) {
  SessionRegistry reg;
  reg.launch("au-x", [](const std::atomic<bool>&) { throw std::runtime_error("boom"); });
  reg.wait("au-x");
  EXPECT_FALSE(reg.running("au-x"));
  reg.launch("au-x", [](const std::atomic<bool>&) {});
  reg.wait("au-x");
}

TEST(Registry, SnapshotJson) {
  AuditSession s;
  s.id = "au-9";
  s.status = SessionStatus::kFailed;
  s.failure_reason = "x";
  s.variants = {{"v", "ps", "low", "low"}};
  s.config.sites = {"a"};
  s.config.rounds = 2;
  s.cells.push_back({{"v", "a", 1}, false, 3, "down", "", "", {}, {}});
  const auto j = to_json(StatusSnapshot::of(s));
  EXPECT_EQ(j["status"], "Failed");
  EXPECT_EQ(j["failure_reason"], "x");
  EXPECT_EQ(j["cells_total"], 2);
  EXPECT_EQ(j["gaps"], 1);
}

}  // namespace
