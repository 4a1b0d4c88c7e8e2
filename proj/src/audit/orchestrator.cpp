#include "pas/audit/orchestrator.hpp"

#include <atomic>
#include <chrono>
#include <future>
#include <map>
#include <random>
#include <set>
#include <thread>
#include <tuple>

#include "pas/adsim/adapter.hpp"
#include "pas/audit/report.hpp"
#include "pas/error.hpp"
#include "pas/html/parser.hpp"
#include "pas/scorer/alignment.hpp"
#include "pas/util/hash.hpp"

namespace pas::audit {

namespace {

std::string describe_error(const Error& e) {
  return std::string(to_string(e.code())) + ": " + e.what();
}

struct Scored {
  std::string description;
  std::vector<scorer::AlignmentSample> samples;
  std::string error;
};

Scored describe_and_score(const AdCapture& c, const AuditConfig& config, llm::Gateway& gateway) {
  Scored out;
  try {
    const auto desc = scorer::describe_ad(c.id, llm::ImagePayload::markup(c.payload), gateway,
                                          util::mix_seed(config.seed, util::fnv1a64(c.payload)));
    out.description = desc.text;
    scorer::ScoreOptions opts;
    opts.repetitions = config.repetitions_per_ad;
    opts.seed = config.seed;
    out.samples = scorer::score_ad(desc, config.attribute, gateway, opts);
  } catch (const Error& e) {
    out.error = describe_error(e);
  }
  return out;
}

}  // namespace

std::string new_session_id(const AuditConfig& config) {
  static std::atomic<std::uint64_t> counter{0};
  const auto now = std::chrono::steady_clock::now().time_since_epoch().count();
  std::random_device rd;
  const std::string nonce = std::to_string(now) + ":" + std::to_string(rd()) + ":" +
                            std::to_string(counter++) + ":" + to_json(config).dump();
  return "au-" + util::sha256_hex(nonce).substr(0, 12);
}

Orchestrator::Orchestrator(std::shared_ptr<llm::Gateway> gateway, persona::PersonaStore personas,
                           SessionStore sessions, OrchestratorOptions options)
    : gateway_(std::move(gateway)),
      personas_(std::move(personas)),
      sessions_(std::move(sessions)),
      options_(std::move(options)) {
  if (!gateway_) throw Error(ErrorCode::kInvalidArgument, "orchestrator needs a gateway");
  if (!options_.catalog) options_.catalog = adsim::Catalog::load_default();
  if (!options_.sleep) {
    options_.sleep = [](double s) {
      std::this_thread::sleep_for(std::chrono::duration<double>(s));
    };
  }
}

std::unique_ptr<profile::TargetAdapter> Orchestrator::make_target(const AuditConfig& config) const {
  if (options_.target_factory) {
    auto t = options_.target_factory(config);
    if (!t) throw Error(ErrorCode::kInvalidArgument, "target factory returned no target");
    return t;
  }
  if (config.target == kTargetSimulator) {
    auto sim = std::make_shared<const adsim::Simulator>(options_.catalog, config.sim);
    return std::make_unique<adsim::SimulatorAdapter>(sim);
  }
  if (config.target == kTargetSimulatorHttp) {
    return std::make_unique<adsim::HttpSimulatorAdapter>(config.target_url);
  }
  throw Error(ErrorCode::kUnsupported,
              "target '" + config.target + "' needs a browser command channel; none is configured",
              {{"field", "/target"}});
}

AuditSession Orchestrator::create_session(const AuditConfig& config,
                                          std::optional<std::string> session_id) const {
  config.validate();
  AuditSession s;
  s.id = session_id ? *session_id : new_session_id(config);
  check_session_id(s.id);
  if (sessions_.exists(s.id)) {
    throw Error(ErrorCode::kConflict, "audit session '" + s.id + "' already exists");
  }
  s.config = config;
  const bool several = config.persona_sets.size() > 1;
  for (std::size_t i = 0; i < config.persona_sets.size(); ++i) {
    const auto& set_id = config.persona_sets[i];
    const auto set = personas_.load_set(set_id);
    if (!set) {
      throw Error(ErrorCode::kNotFound, "no persona set '" + set_id + "'",
                  {{"field", "/persona_sets/" + std::to_string(i)}});
    }
    if (set->attribute != config.attribute) {
      throw Error(ErrorCode::kInvalidArgument,
                  "persona set '" + set_id + "' varies " + std::string(key(set->attribute)) +
                      ", not " + std::string(key(config.attribute)),
                  {{"field", "/attribute"}});
    }
    for (const auto& v : set->variants) {
      if (!config.levels.empty() &&
          std::find(config.levels.begin(), config.levels.end(), v.level) == config.levels.end()) {
        continue;
      }
      if (!v.profile) {
        throw Error(ErrorCode::kInvalidArgument,
                    "variant '" + v.id + "' has no browser profile", {{"persona_set", set_id}});
      }
      s.variants.push_back({v.id, set_id, v.level, several ? v.level + "@" + set_id : v.level});
    }
  }
  if (s.variants.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "no variant matches the requested levels",
                {{"field", "/levels"}});
  }
  s.created_ms = s.updated_ms = now_epoch_ms();
  sessions_.save(s);
  return s;
}

AuditSession Orchestrator::run_session(const std::string& session_id, const RunOptions& run) const {
  const auto dir = sessions_.directory(session_id);
  AuditSession s = sessions_.load(session_id);
  if (s.status == SessionStatus::kDone && !run.retry_gaps) return s;

  if (run.retry_gaps) {
    std::erase_if(s.cells, [](const CellRecord& c) { return !c.ok; });
  }
  // Captures whose cell record never made it to disk are redone.
  std::set<std::string> referenced;
  for (const auto& c : s.cells) referenced.insert(c.capture_ids.begin(), c.capture_ids.end());
  std::vector<AdCapture> kept;
  for (auto& c : s.captures) {
    if (referenced.count(c.id)) {
      kept.push_back(std::move(c));
    } else {
      remove_capture(c.id, dir);
    }
  }
  s.captures = std::move(kept);
  std::erase_if(s.samples, [&](const scorer::AlignmentSample& x) { return !referenced.count(x.ad_ref); });
  s.report.reset();
  s.failure_reason.clear();

  std::map<std::string, profile::BrowserProfile> profiles;
  for (const auto& set_id : s.config.persona_sets) {
    const auto set = personas_.load_set(set_id);
    if (!set) throw Error(ErrorCode::kNotFound, "no persona set '" + set_id + "'");
    for (const auto& v : set->variants) {
      if (v.profile) profiles.emplace(v.id, *v.profile);
    }
  }
  for (const auto& v : s.variants) {
    if (!profiles.count(v.variant_id)) {
      throw Error(ErrorCode::kNotFound, "persona variant '" + v.variant_id + "' is gone");
    }
  }

  auto target = make_target(s.config);
  const auto plan = plan_cells(s);
  const double total = static_cast<double>(plan.size());
  std::set<CellKey> done;
  for (const auto& c : s.cells) done.insert(c.key);

  // Dedupe key per variant: identical (slot, round, payload) is one capture.
  std::map<std::string, std::set<std::tuple<std::string, int, std::string>>> seen;
  for (const auto& c : s.captures) seen[c.variant_id].insert({c.slot_key, c.round, c.payload});

  std::size_t next_capture = 1;
  for (const auto& c : s.captures) {
    next_capture = std::max<std::size_t>(next_capture, std::stoull(capture_stem(c.id)) + 1);
  }

  auto checkpoint = [&] {
    s.updated_ms = now_epoch_ms();
    write_samples(s, dir);
    write_session_state(s, dir);
    if (run.on_progress) run.on_progress(s);
  };

  s.status = SessionStatus::kRunning;
  s.progress = static_cast<double>(s.cells.size()) / total;
  checkpoint();

  const double delay = s.config.effective_delay_s();
  bool first_visit = true;
  std::map<std::string, const PlannedVariant*> variants;
  for (const auto& v : s.variants) variants[v.variant_id] = &v;

  for (const auto& key : plan) {
    if (done.count(key)) continue;
    if (run.stop && run.stop->load()) {
      s.status = SessionStatus::kPending;
      checkpoint();
      return s;
    }
    if (!first_visit && delay > 0.0) options_.sleep(delay);
    first_visit = false;

    const auto& planned = *variants.at(key.variant_id);
    CellRecord cell;
    cell.key = key;
    std::optional<profile::PageFetch> page;
    profile::AppliedContext ctx;
    for (int attempt = 0; attempt <= s.config.fetch_retries && !page; ++attempt) {
      cell.attempts = attempt + 1;
      try {
        // Fresh profile state every round.
        target->clear();
        ctx = profile::apply_profile(profiles.at(key.variant_id), *target);
        page = target->fetch(key.site, key.round);
      } catch (const Error& e) {
        cell.error = describe_error(e);
      }
    }

    if (page) {
      cell.ok = true;
      cell.error.clear();
      cell.page_url = page->url;
      cell.context_id = ctx.context_id;
      for (auto sf : ctx.skipped) cell.warnings.push_back("skipped_surface:" + std::string(profile::to_string(sf)));
      if (page->echoed_hash && *page->echoed_hash != ctx.profile_hash) {
        cell.warnings.push_back("profile_hash_mismatch");
      }
      const auto doc = html::parse(page->html);
      auto regions = adid::identify_ads(doc, page->url, options_.identify);

      std::vector<AdCapture> fresh;
      for (auto& region : regions) {
        region.round = key.round;
        for (const auto& w : region.warnings) cell.warnings.push_back(w + ":" + region.element_path);
        if (!seen[key.variant_id].insert({region.slot_key, key.round, region.markup}).second) continue;
        AdCapture c;
        c.id = capture_id(next_capture++);
        c.variant_id = key.variant_id;
        c.persona_set = planned.persona_set;
        c.level = planned.level;
        c.site = key.site;
        c.round = key.round;
        c.page_url = page->url;
        c.slot_key = region.slot_key;
        c.element_path = region.element_path;
        c.context_id = ctx.context_id;
        c.payload = region.markup;
        fresh.push_back(std::move(c));
      }

      std::vector<std::future<Scored>> jobs;
      for (const auto& c : fresh) {
        jobs.push_back(std::async(std::launch::async, [&, c] {
          return describe_and_score(c, s.config, *gateway_);
        }));
      }
      for (std::size_t i = 0; i < fresh.size(); ++i) {
        auto scored = jobs[i].get();
        auto& c = fresh[i];
        c.description = std::move(scored.description);
        c.error = std::move(scored.error);
        s.samples.insert(s.samples.end(), scored.samples.begin(), scored.samples.end());
        write_capture(c, dir);
        cell.capture_ids.push_back(c.id);
        s.captures.push_back(std::move(c));
      }
    }

    s.cells.push_back(std::move(cell));
    done.insert(key);
    s.progress = static_cast<double>(s.cells.size()) / total;

    const auto gaps = s.gap_count();
    if (static_cast<double>(gaps) > total / 2.0) {
      s.status = SessionStatus::kFailed;
      s.failure_reason = "more than half of the page visits failed (" + std::to_string(gaps) +
                         " of " + std::to_string(plan.size()) + "); last error: " +
                         s.cells.back().error;
      checkpoint();
      return s;
    }
    checkpoint();
  }

  s.report = build_distribution_report(s);
  write_report(*s.report, dir);
  s.status = SessionStatus::kDone;
  s.progress = 1.0;
  checkpoint();
  return s;
}

AuditSession Orchestrator::run_audit(const AuditConfig& config, const RunOptions& run) const {
  const auto s = create_session(config);
  return run_session(s.id, run);
}

}  // namespace pas::audit
