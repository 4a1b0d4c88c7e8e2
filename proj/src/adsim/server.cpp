#include "pas/adsim/server.hpp"

#include <httplib.h>

#include "pas/error.hpp"
#include "pas/profile/profile_document.hpp"
#include "pas/util/text.hpp"

namespace pas::adsim {

using nlohmann::json;

namespace {

void send_error(httplib::Response& res, const Error& e) {
  res.status = http_status(e.code());
  res.set_content(error_body(e).dump(), "application/json");
}

int parse_round(const httplib::Request& req) {
  if (!req.has_param("round")) return 0;
  try {
    return std::stoi(req.get_param_value("round"));
  } catch (const std::exception&) {
    throw Error(ErrorCode::kInvalidArgument, "round must be an integer");
  }
}

std::optional<std::string> header(const httplib::Request& req, std::string_view name) {
  const std::string key(name);
  if (!req.has_header(key)) return std::nullopt;
  return req.get_header_value(key);
}

}  // namespace

SimServer::SimServer(std::shared_ptr<const Simulator> sim)
    : sim_(std::move(sim)), server_(std::make_unique<httplib::Server>()) {
  if (!sim_) throw Error(ErrorCode::kInvalidArgument, "server needs a simulator");
  install_routes();
}

SimServer::~SimServer() { stop(); }

void SimServer::install_routes() {
  auto serve = [this](const httplib::Request& req, httplib::Response& res, bool with_body) {
    try {
      const std::string site = req.matches[1];
      std::optional<std::string> doc;
      auto expected = header(req, profile::kProfileHashHeader);
      if (with_body) {
        if (!req.body.empty()) doc = req.body;
      } else if (auto encoded = header(req, profile::kProfileHeader)) {
        doc = util::base64_decode(*encoded);
      }
      if (with_body && doc && !expected) {
        throw Error(ErrorCode::kInvalidArgument,
                    "profile body requires the " + std::string(profile::kProfileHashHeader) +
                        " header");
      }
      const auto page = handle_page_request(*sim_, site, parse_round(req), doc, expected);
      std::string ids;
      for (const auto& s : page.slots) ids += (ids.empty() ? "" : ",") + s.creative_id;
      if (doc) res.set_header(std::string(profile::kProfileHashHeader), page.context_id);
      res.set_header("X-Sandbox-Creatives", ids);
      res.set_content(page.html, "text/html; charset=utf-8");
    } catch (const Error& e) {
      send_error(res, e);
    }
  };
  server_->Get(R"(/site/([A-Za-z0-9_.-]+))",
               [serve](const httplib::Request& q, httplib::Response& r) { serve(q, r, false); });
  server_->Post(R"(/site/([A-Za-z0-9_.-]+))",
                [serve](const httplib::Request& q, httplib::Response& r) { serve(q, r, true); });
  server_->Get(R"(/truth/([A-Za-z0-9_.-]+))",
               [this](const httplib::Request& req, httplib::Response& res) {
                 try {
                   const std::string id = req.matches[1];
                   json affinity = json::object();
                   for (const auto& [k, v] : sim_->ground_truth(id)) affinity[std::string(key(k))] = v;
                   res.set_content(json{{"id", id}, {"affinity", affinity}}.dump(),
                                   "application/json");
                 } catch (const Error& e) {
                   send_error(res, e);
                 }
               });
  server_->Get("/healthz", [](const httplib::Request&, httplib::Response& res) {
    res.set_content(R"({"status":"ok"})", "application/json");
  });
}

int SimServer::start(const std::string& host, int port) {
  if (thread_.joinable()) throw Error(ErrorCode::kConflict, "server already running");
  port_ = port == 0 ? server_->bind_to_any_port(host) : (server_->bind_to_port(host, port) ? port : -1);
  if (port_ <= 0) {
    throw Error(ErrorCode::kIo, "cannot bind " + host + ":" + std::to_string(port));
  }
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  return port_;
}

void SimServer::listen(const std::string& host, int port) {
  port_ = port;
  if (!server_->listen(host, port)) {
    throw Error(ErrorCode::kIo, "cannot listen on " + host + ":" + std::to_string(port));
  }
}

void SimServer::stop() {
  if (server_) server_->stop();
  if (thread_.joinable()) thread_.join();
}

}  // namespace pas::adsim
