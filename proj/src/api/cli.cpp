#include "pas/api/cli.hpp"

#include <csignal>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <pthread.h>

#include "pas/adid/corpus.hpp"
#include "pas/adsim/catalog.hpp"
#include "pas/adsim/server.hpp"
#include "pas/api/config.hpp"
#include "pas/api/service.hpp"
#include "pas/audit/report.hpp"
#include "pas/scorer/stability.hpp"
#include "pas/util/hash.hpp"
#include "pas/util/text.hpp"

namespace pas::api {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string config_path;
  std::string data_dir;
  bool pretty = false;
};

ServiceConfig resolve_config(const Common& c) {
  ServiceConfig cfg = c.config_path.empty() ? ServiceConfig{} : ServiceConfig::load(c.config_path);
  cfg.apply_environment();
  if (!c.data_dir.empty()) cfg.data_dir = c.data_dir;
  cfg.validate();
  return cfg;
}

AttributeKind attribute_arg(const std::string& text) {
  auto kind = parse_attribute(text);
  if (!kind) throw UsageError("unknown attribute '" + text + "'");
  return *kind;
}

std::string target_arg(const std::string& text) {
  if (text == "sim" || text == audit::kTargetSimulator) return std::string(audit::kTargetSimulator);
  if (text == "sim-http" || text == audit::kTargetSimulatorHttp) {
    return std::string(audit::kTargetSimulatorHttp);
  }
  if (text == audit::kTargetLive) return std::string(audit::kTargetLive);
  throw UsageError("unknown target '" + text + "' (sim, sim-http, live)");
}

void emit(std::ostream& out, const json& j) { out << j.dump(2) << "\n"; }

std::string pad(std::string s, std::size_t w) {
  if (s.size() < w) s.append(w - s.size(), ' ');
  return s;
}

std::string persona_table(const persona::PersonaSet& set) {
  std::ostringstream os;
  os << "persona set " << set.id << " (" << key(set.attribute) << ", base " << set.base.id << ")\n";
  os << pad("level", 10) << pad("variant", 28) << pad("age", 5) << pad("income", 10) << "occupation\n";
  for (const auto& v : set.variants) {
    const auto& f = v.derived_fields;
    os << pad(v.level, 10) << pad(v.id, 28) << pad(f.value("age", json()).dump(), 5)
       << pad(f.contains("annual_income") ? util::format_fixed(f["annual_income"].get<double>(), 0) : "", 10)
       << f.value("occupation", std::string()) << "\n";
  }
  return os.str();
}

std::string base_table(const persona::BasePersona& b) {
  std::ostringstream os;
  const auto fields = b.fields();
  for (const auto& [k, v] : fields.items()) {
    os << pad(k, 16) << (v.is_string() ? v.get<std::string>() : v.dump()) << "\n";
  }
  os << pad("id", 16) << b.id << "\n";
  return os.str();
}

std::string stability_table(const scorer::StabilityReport& r) {
  std::ostringstream os;
  os << pad("ad", 10) << pad("samples", 9) << pad("mean", 9) << pad("std", 9) << "cov%\n";
  for (const auto& a : r.per_ad) {
    os << pad(a.ad_ref, 10) << pad(std::to_string(a.samples), 9) << pad(util::format_fixed(a.mean, 3), 9)
       << pad(util::format_fixed(a.std, 3), 9) << (a.cov ? util::format_fixed(*a.cov, 3) : "undefined")
       << "\n";
  }
  os << "average std: " << util::format_fixed(r.avg_std, 4) << "\n";
  os << "average cov: " << (r.avg_cov ? util::format_fixed(*r.avg_cov, 4) + "%" : "undefined") << "\n";
  for (const auto& n : r.notes) os << "note: " << n << "\n";
  return os.str();
}

// Blocks SIGINT/SIGTERM for the threads started afterwards and waits for one.
class SignalWait {
 public:
  SignalWait() {
    sigemptyset(&set_);
    sigaddset(&set_, SIGINT);
    sigaddset(&set_, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &set_, &old_);
  }
  ~SignalWait() { pthread_sigmask(SIG_SETMASK, &old_, nullptr); }
  void wait() {
    int sig = 0;
    sigwait(&set_, &sig);
  }

 private:
  sigset_t set_{};
  sigset_t old_{};
};

}  // namespace

int cli_run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Persona-driven ad personalization audits", "sandbox"};
  app.require_subcommand(1);
  Common common;
  app.add_option("--config", common.config_path, "Service config file (JSON)");
  app.add_option("--data-dir", common.data_dir, "Data directory (overrides config and env)");
  app.add_flag("--pretty", common.pretty, "Human-readable tables instead of JSON");

  std::function<int()> action;

  // persona gen / persona variants
  auto* persona_cmd = app.add_subcommand("persona", "Generate personas");
  persona_cmd->require_subcommand(1);
  std::string guidance;
  std::uint64_t seed = 0;
  auto* gen = persona_cmd->add_subcommand("gen", "Generate a base persona from guidance");
  gen->add_option("--guidance", guidance, "Free-text guidance")->required();
  gen->add_option("--seed", seed, "Generation seed");
  gen->callback([&] {
    action = [&] {
      auto ws = Workspace::open(resolve_config(common));
      const auto base = ws->engine->generate_base_persona(guidance, seed);
      ws->personas->save(base);
      if (common.pretty) {
        out << base_table(base);
      } else {
        emit(out, base);
      }
      return kExitOk;
    };
  });

  std::string base_id;
  std::string attribute_text;
  auto* variants = persona_cmd->add_subcommand("variants", "Generate the three variants of a base persona");
  auto* base_opt = variants->add_option("--base", base_id, "Stored base persona id");
  variants->add_option("--guidance", guidance, "Generate the base persona first")->excludes(base_opt);
  variants->add_option("--attribute", attribute_text, "Privacy attribute")->required();
  variants->add_option("--seed", seed, "Generation seed");
  variants->callback([&] {
    action = [&] {
      const auto kind = attribute_arg(attribute_text);
      if (base_id.empty() && guidance.empty()) throw UsageError("either --base or --guidance is required");
      auto ws = Workspace::open(resolve_config(common));
      std::optional<persona::BasePersona> base;
      if (!base_id.empty()) {
        base = ws->personas->load_base(base_id);
        if (!base) throw Error(ErrorCode::kNotFound, "no base persona '" + base_id + "'");
      } else {
        base = ws->engine->generate_base_persona(guidance, seed);
        ws->personas->save(*base);
      }
      const auto set = ws->engine->generate_variants(*base, kind, seed);
      ws->personas->save(set);
      if (common.pretty) {
        out << persona_table(set);
      } else {
        emit(out, set);
      }
      return kExitOk;
    };
  });

  // audit run / audit report
  auto* audit_cmd = app.add_subcommand("audit", "Run and inspect audits");
  audit_cmd->require_subcommand(1);
  std::string target = "sim";
  std::string target_url;
  std::vector<std::string> persona_sets;
  std::vector<std::string> levels;
  std::vector<std::string> sites = {"news-portal"};
  int rounds = 3;
  int reps = 5;
  int personas = 1;
  double bias = 3.0;
  int slots = 4;
  std::string session_id;
  std::optional<std::int64_t> anchor_ms;
  bool progress = false;
  guidance.clear();
  auto* run = audit_cmd->add_subcommand("run", "Run an audit session");
  run->add_option("--target", target, "sim | sim-http | live");
  run->add_option("--url", target_url, "Target base URL for sim-http / live");
  run->add_option("--attribute", attribute_text, "Privacy attribute")->required();
  run->add_option("--persona-set", persona_sets, "Stored persona set id (repeatable)");
  run->add_option("--guidance", guidance, "Guidance for generated base personas");
  run->add_option("--personas", personas, "Base personas to generate when no set is given")
      ->check(CLI::Range(1, 50));
  run->add_option("--levels", levels, "Only visit these levels");
  run->add_option("--sites", sites, "Site ids");
  run->add_option("--rounds", rounds, "Visits per site")->check(CLI::PositiveNumber);
  run->add_option("--reps", reps, "Ratings per ad")->check(CLI::PositiveNumber);
  run->add_option("--seed", seed, "Seed for personas, simulator and rater");
  run->add_option("--bias", bias, "Simulator bias strength")->check(CLI::NonNegativeNumber);
  run->add_option("--slots", slots, "Simulator ad slots per page")->check(CLI::PositiveNumber);
  run->add_option("--session-id", session_id, "Resume or name this session");
  run->add_option("--anchor-ms", anchor_ms, "History anchor time (UTC epoch ms)");
  run->add_flag("--progress", progress, "Print progress to stderr");
  run->callback([&] {
    action = [&] {
      const auto kind = attribute_arg(attribute_text);
      auto cfg = resolve_config(common);
      if (anchor_ms) cfg.anchor_time_ms = anchor_ms;
      auto ws = Workspace::open(cfg);

      audit::RunOptions opts;
      if (progress) {
        opts.on_progress = [&err](const audit::AuditSession& s) {
          err << "progress " << util::format_fixed(s.progress * 100.0, 1) << "% (" << s.cells.size()
              << "/" << s.total_cells() << ")\n";
        };
      }

      audit::AuditSession session;
      if (!session_id.empty() && ws->sessions->exists(session_id)) {
        session = ws->orchestrator->run_session(session_id, opts);
      } else {
        audit::AuditConfig config;
        config.attribute = kind;
        config.target = target_arg(target);
        config.target_url = target_url;
        config.sites = sites;
        config.rounds = rounds;
        config.repetitions_per_ad = reps;
        config.levels = levels;
        config.seed = seed;
        config.sim.bias_strength = bias;
        config.sim.slots_per_page = slots;
        config.sim.rng_seed = seed;
        config.persona_sets = persona_sets;
        if (config.persona_sets.empty()) {
          const std::string g = guidance.empty() ? "An adult living in the United States" : guidance;
          for (int i = 0; i < personas; ++i) {
            const auto s = util::mix_seed(seed, static_cast<std::uint64_t>(i));
            const auto base = ws->engine->generate_base_persona(g, s);
            ws->personas->save(base);
            const auto set = ws->engine->generate_variants(base, kind, s);
            ws->personas->save(set);
            config.persona_sets.push_back(set.id);
          }
        }
        const auto created = ws->orchestrator->create_session(
            config, session_id.empty() ? std::nullopt : std::optional<std::string>(session_id));
        session = ws->orchestrator->run_session(created.id, opts);
      }
      const auto dir = ws->sessions->directory(session.id);
      if (common.pretty) {
        out << "session " << session.id << ": " << to_string(session.status) << "\n";
        if (session.report) out << audit::format_report_table(*session.report);
        if (!session.failure_reason.empty()) out << "failure: " << session.failure_reason << "\n";
      } else {
        emit(out, {{"session_id", session.id},
                   {"status", std::string(to_string(session.status))},
                   {"failure_reason", session.failure_reason},
                   {"session_dir", dir},
                   {"captures", session.captures.size()},
                   {"samples", session.samples.size()},
                   {"report", session.report ? json(*session.report) : json(nullptr)}});
      }
      return session.status == audit::SessionStatus::kDone ? kExitOk : kExitRuntime;
    };
  });

  std::string report_session;
  auto* report = audit_cmd->add_subcommand("report", "Print the report of a finished session");
  report->add_option("--session", report_session, "Session id")->required();
  report->callback([&] {
    action = [&] {
      auto ws = Workspace::open(resolve_config(common));
      const auto s = ws->sessions->load(report_session);
      if (!s.report) {
        throw Error(ErrorCode::kConflict, "session '" + s.id + "' is " +
                                              std::string(to_string(s.status)) + " and has no report");
      }
      if (common.pretty) {
        out << audit::format_report_table(*s.report);
      } else {
        emit(out, *s.report);
      }
      return kExitOk;
    };
  });

  // eval ads / eval stability
  auto* eval_cmd = app.add_subcommand("eval", "Offline evaluations");
  eval_cmd->require_subcommand(1);
  std::string corpus_dir;
  std::string labels_path;
  auto* eval_ads = eval_cmd->add_subcommand("ads", "Ad identification metrics on a labeled corpus");
  eval_ads->add_option("--corpus", corpus_dir, "Directory of .html pages")->required();
  eval_ads->add_option("--labels", labels_path, "labels.json (default: <corpus>/labels.json)");
  eval_ads->callback([&] {
    action = [&] {
      auto corpus = adid::Corpus::load(corpus_dir);
      if (!labels_path.empty()) {
        fs::path p(labels_path);
        if (p.is_relative() && !fs::exists(p)) p = fs::path(corpus_dir) / p;
        const auto doc = json::parse(util::read_file(p.string()), nullptr, false);
        if (doc.is_discarded() || !doc.is_object()) {
          throw Error(ErrorCode::kInvalidArgument, "labels file '" + p.string() + "' is not a JSON object");
        }
        corpus.labels.clear();
        for (const auto& [file, paths] : doc.items()) {
          corpus.labels[file] = paths.get<std::set<std::string>>();
          if (!corpus.pages.count(file)) {
            throw Error(ErrorCode::kNotFound, "labeled page '" + file + "' is not in the corpus");
          }
        }
      }
      const auto result = adid::evaluate_corpus(corpus);
      if (common.pretty) {
        out << adid::format_table(result.matrix, result.metrics);
        for (const auto& m : result.missed) out << "missed: " << m << "\n";
        for (const auto& f : result.false_positives) out << "false positive: " << f << "\n";
      } else {
        emit(out, adid::to_json(result));
      }
      return kExitOk;
    };
  });

  int ads = 20;
  double sigma = 0.0;
  bool csv = false;
  auto* eval_stab = eval_cmd->add_subcommand("stability", "Rating stability over repeated scoring");
  eval_stab->add_option("--ads", ads, "Number of catalog creatives")->check(CLI::PositiveNumber);
  eval_stab->add_option("--reps", reps, "Ratings per ad")->check(CLI::Range(2, 1000));
  eval_stab->add_option("--attribute", attribute_text, "Privacy attribute")->required();
  eval_stab->add_option("--sigma", sigma, "Stub rater noise (stub provider only)")
      ->check(CLI::NonNegativeNumber);
  eval_stab->add_option("--seed", seed, "Rater seed");
  eval_stab->add_flag("--csv", csv, "CSV table on stdout");
  eval_stab->callback([&] {
    action = [&] {
      const auto kind = attribute_arg(attribute_text);
      auto cfg = resolve_config(common);
      cfg.gateway.stub_noise_sigma = sigma;
      auto gateway = llm::make_gateway(cfg.gateway, nullptr);
      const auto catalog = adsim::Catalog::load_default();
      const auto& pool = catalog->creatives();
      if (static_cast<std::size_t>(ads) > pool.size()) {
        throw UsageError("--ads exceeds the catalog size (" + std::to_string(pool.size()) + ")");
      }
      std::vector<scorer::AdDescription> descriptions;
      for (int i = 0; i < ads; ++i) {
        const auto& c = pool[static_cast<std::size_t>(i) * pool.size() / static_cast<std::size_t>(ads)];
        descriptions.push_back(scorer::describe_ad(c.id, llm::ImagePayload::markup(c.markup), *gateway));
      }
      scorer::ScoreOptions so;
      so.repetitions = reps;
      so.seed = seed;
      const auto samples = scorer::score_ads(descriptions, kind, *gateway, so);
      const auto r = scorer::stability_metrics(samples);
      if (csv) {
        out << scorer::to_csv(r);
      } else if (common.pretty) {
        out << stability_table(r);
      } else {
        auto j = scorer::to_json(r);
        j["attribute"] = std::string(key(kind));
        j["ads"] = ads;
        j["repetitions"] = reps;
        j["noise_sigma"] = sigma;
        emit(out, j);
      }
      return kExitOk;
    };
  });

  // sim serve
  auto* sim_cmd = app.add_subcommand("sim", "Ad-serving simulator");
  sim_cmd->require_subcommand(1);
  std::string host = "127.0.0.1";
  int port = 8687;
  auto* sim_serve = sim_cmd->add_subcommand("serve", "Serve simulated sites over HTTP");
  sim_serve->add_option("--host", host, "Bind address");
  sim_serve->add_option("--port", port, "Port (0 = any)")->check(CLI::Range(0, 65535));
  sim_serve->add_option("--bias", bias, "Bias strength")->check(CLI::NonNegativeNumber);
  sim_serve->add_option("--slots", slots, "Ad slots per page")->check(CLI::PositiveNumber);
  sim_serve->add_option("--seed", seed, "RNG seed");
  sim_serve->callback([&] {
    action = [&] {
      adsim::SimPolicy policy;
      policy.bias_strength = bias;
      policy.slots_per_page = slots;
      policy.rng_seed = seed;
      auto sim = std::make_shared<const adsim::Simulator>(adsim::Catalog::load_default(), policy);
      SignalWait signals;
      adsim::SimServer server(sim);
      const int bound = server.start(host, port);
      emit(out, {{"listening", "http://" + host + ":" + std::to_string(bound)}});
      out.flush();
      signals.wait();
      server.stop();
      return kExitOk;
    };
  });

  // serve
  auto* serve = app.add_subcommand("serve", "Run the HTTP API");
  std::optional<int> serve_port;
  std::string bind;
  serve->add_option("--port", serve_port, "Port (0 = any)")->check(CLI::Range(0, 65535));
  serve->add_option("--bind", bind, "Bind address");
  serve->callback([&] {
    action = [&] {
      auto cfg = resolve_config(common);
      if (serve_port) cfg.port = *serve_port;
      if (!bind.empty()) cfg.bind_address = bind;
      SignalWait signals;
      Service service(Workspace::open(cfg));
      const int bound = service.start();
      emit(out, {{"listening", "http://" + cfg.bind_address + ":" + std::to_string(bound)},
                 {"data_dir", cfg.data_dir}});
      out.flush();
      signals.wait();
      service.stop();
      return kExitOk;
    };
  });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (!action) {
      err << app.help();
      return kExitUsage;
    }
    return action();
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << error_body(e).dump() << "\n";
    return kExitRuntime;
  } catch (const std::exception& e) {
    err << json{{"code", "Internal"}, {"message", e.what()}, {"detail", nullptr}}.dump() << "\n";
    return kExitRuntime;
  }
}

int cli_run(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return cli_run(args, std::cout, std::cerr);
}

}  // namespace pas::api
