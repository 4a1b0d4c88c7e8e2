#include "pas/api/service.hpp"

#include <filesystem>
#include <set>

#include <httplib.h>

#include "pas/audit/report.hpp"
#include "pas/audit/store.hpp"
#include "pas/llm/lexicon.hpp"
#include "pas/util/text.hpp"

namespace pas::api {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view to_string(ApiErrorCode c) {
  switch (c) {
    case ApiErrorCode::kBadRequest: return "BadRequest";
    case ApiErrorCode::kNotFound: return "NotFound";
    case ApiErrorCode::kGatewayFailure: return "GatewayFailure";
    case ApiErrorCode::kTargetUnreachable: return "TargetUnreachable";
    case ApiErrorCode::kConflict: return "Conflict";
    case ApiErrorCode::kInternal: return "Internal";
  }
  return "Internal";
}

ApiErrorCode api_error_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kSchemaVersion:
    case ErrorCode::kUnsupported:
      return ApiErrorCode::kBadRequest;
    case ErrorCode::kNotFound:
      return ApiErrorCode::kNotFound;
    case ErrorCode::kGatewayFailure:
    case ErrorCode::kRemoteStatus:
    case ErrorCode::kTimeout:
    case ErrorCode::kStructuredOutput:
    case ErrorCode::kConsistency:
      // Generated content that failed its checks is a provider problem from
      // the caller's point of view.
      return ApiErrorCode::kGatewayFailure;
    case ErrorCode::kTargetUnreachable:
      return ApiErrorCode::kTargetUnreachable;
    case ErrorCode::kConflict:
      return ApiErrorCode::kConflict;
    case ErrorCode::kIo:
    case ErrorCode::kInternal:
      return ApiErrorCode::kInternal;
  }
  return ApiErrorCode::kInternal;
}

int status_of(ApiErrorCode c) {
  switch (c) {
    case ApiErrorCode::kBadRequest: return 400;
    case ApiErrorCode::kNotFound: return 404;
    case ApiErrorCode::kGatewayFailure: return 502;
    case ApiErrorCode::kTargetUnreachable: return 502;
    case ApiErrorCode::kConflict: return 409;
    case ApiErrorCode::kInternal: return 500;
  }
  return 500;
}

json api_error_body(ApiErrorCode code, const std::string& message, const json& detail) {
  return {{"code", std::string(to_string(code))}, {"message", message}, {"detail", detail}};
}

json api_error_body(const Error& e) {
  json detail = e.detail().is_object() ? e.detail() : json::object();
  if (!e.detail().is_null() && !e.detail().is_object()) detail["context"] = e.detail();
  detail["cause"] = std::string(to_string(e.code()));
  return api_error_body(api_error_code(e.code()), e.what(), detail);
}

std::shared_ptr<Workspace> Workspace::open(const ServiceConfig& config,
                                           std::shared_ptr<llm::Gateway> gateway) {
  config.validate();
  std::error_code ec;
  fs::create_directories(fs::path(config.data_dir) / "sessions", ec);
  fs::create_directories(fs::path(config.data_dir) / "personas", ec);
  const auto probe = fs::path(config.data_dir) / ".write-probe";
  try {
    util::write_file(probe.string(), "ok");
    fs::remove(probe, ec);
  } catch (const Error&) {
    throw Error(ErrorCode::kIo, "data directory '" + config.data_dir + "' is not writable");
  }

  auto ws = std::make_shared<Workspace>();
  ws->config = config;
  ws->gateway = gateway ? std::move(gateway) : llm::make_gateway(config.gateway, nullptr);
  auto opts = persona::EngineOptions::defaults();
  if (config.anchor_time_ms) opts.anchor_time_ms = *config.anchor_time_ms;
  ws->engine = std::make_shared<persona::PersonaEngine>(ws->gateway, std::move(opts));
  ws->personas =
      std::make_shared<persona::PersonaStore>((fs::path(config.data_dir) / "personas").string());
  ws->sessions = std::make_shared<audit::SessionStore>(config.data_dir);
  ws->orchestrator =
      std::make_shared<audit::Orchestrator>(ws->gateway, *ws->personas, *ws->sessions);
  return ws;
}

namespace {

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, const Error& e) {
  send_json(res, status_of(api_error_code(e.code())), api_error_body(e));
}

json parse_body(const httplib::Request& req) {
  if (util::trim(req.body).empty()) return json::object();
  auto j = json::parse(req.body, nullptr, false);
  if (j.is_discarded()) {
    throw Error(ErrorCode::kInvalidArgument, "request body is not valid JSON", {{"field", "/"}});
  }
  if (!j.is_object()) {
    throw Error(ErrorCode::kInvalidArgument, "request body must be a JSON object", {{"field", "/"}});
  }
  return j;
}

void only_keys(const json& j, std::initializer_list<const char*> keys) {
  std::set<std::string> known(keys.begin(), keys.end());
  for (const auto& [k, v] : j.items()) {
    if (!known.count(k)) {
      throw Error(ErrorCode::kInvalidArgument, "/" + k + ": unknown field", {{"field", "/" + k}});
    }
  }
}

std::optional<std::uint64_t> optional_seed(const json& j) {
  if (!j.contains("seed") || j["seed"].is_null()) return std::nullopt;
  if (!j["seed"].is_number_unsigned()) {
    throw Error(ErrorCode::kInvalidArgument, "/seed: expected a non-negative integer",
                {{"field", "/seed"}});
  }
  return j["seed"].get<std::uint64_t>();
}

// Handler wrapper: every failure becomes one ApiError body.
template <typename F>
httplib::Server::Handler guarded(F f) {
  return [f](const httplib::Request& req, httplib::Response& res) {
    try {
      f(req, res);
    } catch (const Error& e) {
      send_error(res, e);
    } catch (const json::exception& e) {
      send_json(res, 400, api_error_body(ApiErrorCode::kBadRequest, e.what(), {{"field", "/"}}));
    } catch (const std::exception& e) {
      send_json(res, 500, api_error_body(ApiErrorCode::kInternal, e.what()));
    }
  };
}

void mark_failed(const Workspace& ws, const std::string& id, const std::string& reason,
                 audit::SessionRegistry& reg) {
  try {
    auto s = ws.sessions->load(id);
    s.status = audit::SessionStatus::kFailed;
    s.failure_reason = reason;
    s.updated_ms = audit::now_epoch_ms();
    audit::write_session_state(s, ws.sessions->directory(id));
    reg.publish(audit::StatusSnapshot::of(s));
  } catch (const std::exception&) {
    audit::StatusSnapshot snap;
    snap.id = id;
    snap.status = audit::SessionStatus::kFailed;
    snap.failure_reason = reason;
    reg.publish(snap);
  }
}

}  // namespace

Service::Service(std::shared_ptr<Workspace> workspace)
    : ws_(std::move(workspace)),
      registry_(std::make_unique<audit::SessionRegistry>()),
      server_(std::make_unique<httplib::Server>()) {
  if (!ws_) throw Error(ErrorCode::kInvalidArgument, "service needs a workspace");
  install_routes();
}

Service::~Service() { stop(); }

void Service::launch(const std::string& id) {
  auto ws = ws_;
  auto* reg = registry_.get();
  reg->launch(id, [ws, reg, id](const std::atomic<bool>& stop) {
    audit::RunOptions run;
    run.stop = &stop;
    run.on_progress = [reg](const audit::AuditSession& s) {
      reg->publish(audit::StatusSnapshot::of(s));
    };
    try {
      const auto s = ws->orchestrator->run_session(id, run);
      reg->publish(audit::StatusSnapshot::of(s));
    } catch (const Error& e) {
      mark_failed(*ws, id, std::string(to_string(e.code())) + ": " + e.what(), *reg);
    } catch (const std::exception& e) {
      mark_failed(*ws, id, std::string("Internal: ") + e.what(), *reg);
    }
  });
}

void Service::install_routes() {
  auto& srv = *server_;
  const std::string origin = ws_->config.cors_origin;

  srv.set_post_routing_handler([origin](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Origin", origin);
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
  });
  srv.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
  srv.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
    if (!res.body.empty()) return;
    const auto code = res.status == 404 ? ApiErrorCode::kNotFound
                      : res.status < 500 ? ApiErrorCode::kBadRequest
                                         : ApiErrorCode::kInternal;
    res.set_content(api_error_body(code, "no route for " + req.method + " " + req.path).dump(),
                    "application/json");
  });
  srv.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr) {
    send_json(res, 500, api_error_body(ApiErrorCode::kInternal, "unhandled error"));
  });
  if (!ws_->config.ui_dir.empty()) srv.set_mount_point("/ui", ws_->config.ui_dir);

  auto ws = ws_;

  srv.Get("/healthz", guarded([](const httplib::Request&, httplib::Response& res) {
    send_json(res, 200, {{"status", "ok"}});
  }));

  srv.Post("/personas", guarded([ws](const httplib::Request& req, httplib::Response& res) {
    const auto body = parse_body(req);
    only_keys(body, {"guidance", "seed"});
    if (!body.contains("guidance") || !body["guidance"].is_string() ||
        util::trim(body["guidance"].get<std::string>()).empty()) {
      throw Error(ErrorCode::kInvalidArgument, "/guidance: required non-empty string",
                  {{"field", "/guidance"}});
    }
    const auto base =
        ws->engine->generate_base_persona(body["guidance"].get<std::string>(), optional_seed(body));
    ws->personas->save(base);
    send_json(res, 201, base);
  }));

  srv.Post(R"(/personas/([A-Za-z0-9_-]+)/variants)",
           guarded([ws](const httplib::Request& req, httplib::Response& res) {
             const std::string id = req.matches[1];
             const auto body = parse_body(req);
             only_keys(body, {"attribute", "seed"});
             if (!body.contains("attribute") || !body["attribute"].is_string()) {
               throw Error(ErrorCode::kInvalidArgument, "/attribute: required string",
                           {{"field", "/attribute"}});
             }
             const auto kind = parse_attribute(body["attribute"].get<std::string>());
             if (!kind) {
               throw Error(ErrorCode::kInvalidArgument,
                           "/attribute: unknown attribute '" + body["attribute"].get<std::string>() + "'",
                           {{"field", "/attribute"}});
             }
             const auto base = ws->personas->load_base(id);
             if (!base) throw Error(ErrorCode::kNotFound, "no base persona '" + id + "'");
             const auto set = ws->engine->generate_variants(*base, *kind, optional_seed(body).value_or(0));
             ws->personas->save(set);
             send_json(res, 201, set);
           }));

  srv.Get(R"(/personas/([A-Za-z0-9_-]+))",
          guarded([ws](const httplib::Request& req, httplib::Response& res) {
            const std::string id = req.matches[1];
            if (auto set = ws->personas->load_set(id)) {
              send_json(res, 200, *set);
              return;
            }
            auto base = ws->personas->load_base(id);
            if (!base) throw Error(ErrorCode::kNotFound, "no persona '" + id + "'");
            json out = *base;
            json sets = json::array();
            for (const auto& sid : ws->personas->set_ids()) {
              if (auto s = ws->personas->load_set(sid); s && s->base.id == id) sets.push_back(sid);
            }
            out["sets"] = sets;
            send_json(res, 200, out);
          }));

  srv.Post("/audits", guarded([this, ws](const httplib::Request& req, httplib::Response& res) {
    auto body = parse_body(req);
    // Service-wide defaults fill whatever the request leaves out.
    if (!body.contains("target")) body["target"] = ws->config.target;
    if (!body.contains("target_url") && !ws->config.target_url.empty()) {
      body["target_url"] = ws->config.target_url;
    }
    if (!body.contains("seed")) body["seed"] = ws->config.seed;
    if (!body.contains("sim")) body["sim"] = ws->config.sim;
    const auto config = audit::parse_audit_config(body);
    const auto session = ws->orchestrator->create_session(config);
    registry_->publish(audit::StatusSnapshot::of(session));
    launch(session.id);
    res.set_header("Location", "/audits/" + session.id);
    send_json(res, 202,
              {{"id", session.id},
               {"status", std::string(to_string(session.status))},
               {"links",
                {{"status", "/audits/" + session.id}, {"report", "/audits/" + session.id + "/report"}}}});
  }));

  srv.Post(R"(/audits/([A-Za-z0-9_-]+)/resume)",
           guarded([this, ws](const httplib::Request& req, httplib::Response& res) {
             const std::string id = req.matches[1];
             const auto s = ws->sessions->load(id);
             if (s.status == audit::SessionStatus::kDone) {
               throw Error(ErrorCode::kConflict, "session '" + id + "' is already Done");
             }
             registry_->publish(audit::StatusSnapshot::of(s));
             launch(id);
             send_json(res, 202, {{"id", id}, {"status", std::string(to_string(s.status))}});
           }));

  srv.Get(R"(/audits/([A-Za-z0-9_-]+))",
          guarded([this, ws](const httplib::Request& req, httplib::Response& res) {
            const std::string id = req.matches[1];
            if (auto snap = registry_->snapshot(id)) {
              send_json(res, 200, audit::to_json(*snap));
              return;
            }
            send_json(res, 200, audit::to_json(audit::StatusSnapshot::of(ws->sessions->load(id))));
          }));

  srv.Get(R"(/audits/([A-Za-z0-9_-]+)/report)",
          guarded([ws](const httplib::Request& req, httplib::Response& res) {
            const std::string id = req.matches[1];
            const auto s = ws->sessions->load(id);
            if (s.status != audit::SessionStatus::kDone || !s.report) {
              throw Error(ErrorCode::kConflict,
                          "session '" + id + "' is " + std::string(to_string(s.status)) +
                              "; the report exists once it is Done",
                          {{"status", std::string(to_string(s.status))}});
            }
            json out = *s.report;
            out["session_id"] = s.id;
            send_json(res, 200, out);
          }));

  srv.Get(R"(/ads/([A-Za-z0-9_-]+)\.(cap-[0-9]+))",
          guarded([ws](const httplib::Request& req, httplib::Response& res) {
            const std::string sid = req.matches[1];
            const std::string cid = req.matches[2];
            const auto s = ws->sessions->load(sid);
            const auto* c = s.capture(cid);
            if (!c) throw Error(ErrorCode::kNotFound, "no capture '" + cid + "' in session '" + sid + "'");
            json samples = json::array();
            json scores = json::array();
            for (const auto& x : s.samples) {
              if (x.ad_ref != cid) continue;
              samples.push_back(x);
              if (!x.failed) scores.push_back(x.score);
            }
            json persona = {{"variant_id", c->variant_id},
                            {"persona_set", c->persona_set},
                            {"level", c->level}};
            for (const auto& v : s.variants) {
              if (v.variant_id == c->variant_id) persona["label"] = v.label;
            }
            if (auto set = ws->personas->load_set(c->persona_set)) {
              for (const auto& v : set->variants) {
                if (v.id == c->variant_id) persona["description"] = v.description;
              }
            }
            send_json(res, 200,
                      {{"id", sid + "." + cid},
                       {"session_id", sid},
                       {"capture", *c},
                       {"description", c->description},
                       {"samples", samples},
                       {"scores", scores},
                       {"persona", persona}});
          }));
}

int Service::start() {
  if (thread_.joinable()) throw Error(ErrorCode::kConflict, "service already running");
  const auto& host = ws_->config.bind_address;
  const int want = ws_->config.port;
  port_ = want == 0 ? server_->bind_to_any_port(host) : (server_->bind_to_port(host, want) ? want : -1);
  if (port_ <= 0) {
    throw Error(ErrorCode::kIo, "cannot bind " + host + ":" + std::to_string(want));
  }
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  return port_;
}

void Service::stop() {
  if (server_) server_->stop();
  if (thread_.joinable()) thread_.join();
  if (registry_) registry_->shutdown();
}

}  // namespace pas::api
