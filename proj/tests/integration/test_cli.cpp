#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "pas/api/cli.hpp"
#include "support.hpp"

namespace {

using nlohmann::json;

struct Run {
  int code = -1;
  std::string out;
  std::string err;
  json j() const { return json::parse(out); }
};

Run sandbox(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  Run r;
  r.code = pas::api::cli_run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const std::string kCorpus = std::string(PAS_FIXTURE_DIR) + "/ad_corpus";

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(sandbox({}).code, pas::api::kExitUsage);
  EXPECT_EQ(sandbox({"frobnicate"}).code, pas::api::kExitUsage);
  EXPECT_EQ(sandbox({"audit", "run"}).code, pas::api::kExitUsage);
  EXPECT_EQ(sandbox({"eval", "stability", "--attribute", "age", "--reps", "1"}).code, pas::api::kExitUsage);
  const auto bad = sandbox({"eval", "stability", "--attribute", "shoe-size"});
  EXPECT_EQ(bad.code, pas::api::kExitUsage);
  EXPECT_FALSE(bad.err.empty());
}

TEST(Cli, EvalAdsOnBundledCorpus) {
  const auto r = sandbox({"eval", "ads", "--corpus", kCorpus});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = r.j();
  EXPECT_EQ(j["tp"], 98);
  EXPECT_EQ(j["fn"], 3);
  EXPECT_EQ(j["fp"], 0);
  EXPECT_EQ(j["tn"], 0);
  EXPECT_DOUBLE_EQ(j["precision"].get<double>(), 1.0);
  EXPECT_NEAR(j["recall"].get<double>(), 98.0 / 101.0, 1e-12);
  EXPECT_EQ(j["pages"], 28);

  const auto pretty = sandbox({"--pretty", "eval", "ads", "--corpus", kCorpus});
  EXPECT_EQ(pretty.code, 0);
  EXPECT_NE(pretty.out.find("missed: blog_01.html#"), std::string::npos);

  const auto missing = sandbox({"eval", "ads", "--corpus", kCorpus + "/nope"});
  EXPECT_EQ(missing.code, pas::api::kExitRuntime);
  EXPECT_EQ(json::parse(missing.err)["code"], "NotFound");
}

TEST(Cli, EvalStability) {
  const auto noisy = sandbox({"eval", "stability", "--attribute", "income", "--ads", "20", "--reps", "10",
                              "--sigma", "1", "--seed", "3"});
  ASSERT_EQ(noisy.code, 0) << noisy.err;
  const auto j = noisy.j();
  EXPECT_GE(j["avg_std"].get<double>(), 0.5);
  EXPECT_LE(j["avg_std"].get<double>(), 1.5);
  EXPECT_LT(j["avg_cov"].get<double>(), 10.0);

  const auto flat = sandbox({"eval", "stability", "--attribute", "income", "--ads", "20", "--reps", "10"});
  ASSERT_EQ(flat.code, 0);
  EXPECT_DOUBLE_EQ(flat.j()["avg_std"].get<double>(), 0.0);

  const auto csv = sandbox({"eval", "stability", "--attribute", "age", "--ads", "3", "--reps", "2", "--csv"});
  ASSERT_EQ(csv.code, 0);
  EXPECT_EQ(std::count(csv.out.begin(), csv.out.end(), '\n'), 4);
}

TEST(Cli, PersonaCommandsAreDeterministic) {
  pas::testing::TempDir a("cli-pa"), b("cli-pb");
  const auto ra = sandbox({"--data-dir", a.str(), "persona", "gen", "--guidance", "a beekeeper", "--seed", "5"});
  const auto rb = sandbox({"--data-dir", b.str(), "persona", "gen", "--guidance", "a beekeeper", "--seed", "5"});
  ASSERT_EQ(ra.code, 0) << ra.err;
  EXPECT_EQ(ra.out, rb.out);
  const std::string id = ra.j()["id"];
  const auto v = sandbox({"--data-dir", a.str(), "persona", "variants", "--base", id, "--attribute", "age",
                          "--seed", "5"});
  ASSERT_EQ(v.code, 0) << v.err;
  EXPECT_EQ(v.j()["variants"].size(), 3u);
  EXPECT_EQ(sandbox({"--data-dir", a.str(), "persona", "variants", "--base", "nobody", "--attribute", "age"}).code,
            pas::api::kExitRuntime);
}

TEST(Cli, AuditRunsAreReproducible) {
  const std::vector<std::string> tail = {"audit", "run", "--attribute", "income", "--seed", "7", "--reps", "2",
                                         "--rounds", "2", "--sites", "shopping-mall", "--anchor-ms",
                                         std::to_string(pas::testing::kAnchorMs)};
  pas::testing::TempDir a("cli-a"), b("cli-b");
  auto args_a = std::vector<std::string>{"--data-dir", a.str()};
  auto args_b = std::vector<std::string>{"--data-dir", b.str()};
  args_a.insert(args_a.end(), tail.begin(), tail.end());
  args_b.insert(args_b.end(), tail.begin(), tail.end());
  const auto ra = sandbox(args_a);
  const auto rb = sandbox(args_b);
  ASSERT_EQ(ra.code, 0) << ra.err;
  ASSERT_EQ(rb.code, 0) << rb.err;
  const auto ja = ra.j();
  EXPECT_EQ(ja["status"], "Done");
  EXPECT_EQ(ja["captures"], 3 * 2 * 4);
  const auto report_a = slurp(ja["session_dir"].get<std::string>() + "/report.json");
  const auto report_b = slurp(rb.j()["session_dir"].get<std::string>() + "/report.json");
  ASSERT_FALSE(report_a.empty());
  EXPECT_EQ(report_a, report_b);

  const auto shown = sandbox({"--data-dir", a.str(), "audit", "report", "--session", ja["session_id"]});
  ASSERT_EQ(shown.code, 0);
  EXPECT_EQ(shown.j(), ja["report"]);
  const auto table = sandbox({"--pretty", "--data-dir", a.str(), "audit", "report", "--session", ja["session_id"]});
  EXPECT_NE(table.out.find("kruskal-wallis: H="), std::string::npos);
  EXPECT_EQ(sandbox({"--data-dir", a.str(), "audit", "report", "--session", "s-nothing"}).code,
            pas::api::kExitRuntime);
}

}  // namespace
