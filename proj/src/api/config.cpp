#include "pas/api/config.hpp"

#include <cstdlib>
#include <set>

#include "pas/audit/types.hpp"
#include "pas/error.hpp"
#include "pas/util/text.hpp"

namespace pas::api {

using nlohmann::json;

namespace {

[[noreturn]] void field_error(const std::string& field, const std::string& message) {
  throw Error(ErrorCode::kInvalidArgument, "config " + field + ": " + message, {{"field", field}});
}

}  // namespace

ServiceConfig ServiceConfig::from_json(const json& j) {
  if (!j.is_object()) field_error("/", "expected an object");
  static const std::set<std::string> known = {
      "data_dir", "bind_address", "port", "gateway", "target", "target_url",
      "sim", "seed", "anchor_time_ms", "cors_origin", "ui_dir"};
  for (const auto& [k, v] : j.items()) {
    if (!known.count(k)) field_error("/" + k, "unknown key");
  }
  ServiceConfig c;
  auto str = [&](const char* k, std::string& out) {
    if (!j.contains(k)) return;
    if (!j[k].is_string()) field_error(std::string("/") + k, "expected a string");
    out = j[k].get<std::string>();
  };
  str("data_dir", c.data_dir);
  str("bind_address", c.bind_address);
  str("target", c.target);
  str("target_url", c.target_url);
  str("cors_origin", c.cors_origin);
  str("ui_dir", c.ui_dir);
  if (j.contains("port")) {
    if (!j["port"].is_number_integer()) field_error("/port", "expected an integer");
    c.port = j["port"].get<int>();
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) field_error("/seed", "expected a non-negative integer");
    c.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("anchor_time_ms") && !j["anchor_time_ms"].is_null()) {
    if (!j["anchor_time_ms"].is_number_integer()) field_error("/anchor_time_ms", "expected an integer");
    c.anchor_time_ms = j["anchor_time_ms"].get<std::int64_t>();
  }
  try {
    if (j.contains("gateway")) c.gateway = j["gateway"].get<llm::ProviderConfig>();
  } catch (const std::exception& e) {
    field_error("/gateway", e.what());
  }
  try {
    if (j.contains("sim")) c.sim = j["sim"].get<adsim::SimPolicy>();
  } catch (const std::exception& e) {
    field_error("/sim", e.what());
  }
  c.validate();
  return c;
}

ServiceConfig ServiceConfig::load(const std::string& path) {
  const auto doc = json::parse(util::read_file(path), nullptr, false);
  if (doc.is_discarded()) {
    throw Error(ErrorCode::kInvalidArgument, "config file '" + path + "' is not valid JSON");
  }
  return from_json(doc);
}

void ServiceConfig::apply_environment() {
  if (const char* d = std::getenv(kEnvDataDir); d && *d) data_dir = d;
  if (const char* k = std::getenv(kEnvGatewayKeyVar); k && *k) gateway.api_key_env = std::string(k);
  if (const char* b = std::getenv(kEnvBindAddress); b && *b) {
    // "host" or "host:port"; bare IPv6 addresses are not split.
    const std::string v = b;
    const auto colon = v.rfind(':');
    if (colon == std::string::npos || v.find(':') != colon) {
      bind_address = v;
      return;
    }
    bind_address = v.substr(0, colon);
    try {
      port = std::stoi(v.substr(colon + 1));
    } catch (const std::exception&) {
      throw Error(ErrorCode::kInvalidArgument,
                  std::string(kEnvBindAddress) + " has a bad port: '" + v + "'");
    }
  }
}

void ServiceConfig::validate() const {
  if (data_dir.empty()) field_error("/data_dir", "must not be empty");
  if (port < 0 || port > 65535) field_error("/port", "must be in [0, 65535]");
  if (target != audit::kTargetSimulator && target != audit::kTargetSimulatorHttp &&
      target != audit::kTargetLive) {
    field_error("/target", "unknown target '" + target + "'");
  }
  try {
    gateway.validate();
  } catch (const Error& e) {
    field_error("/gateway", e.what());
  }
  try {
    sim.validate();
  } catch (const Error& e) {
    field_error("/sim", e.what());
  }
}

json to_json(const ServiceConfig& c) {
  return {{"data_dir", c.data_dir},
          {"bind_address", c.bind_address},
          {"port", c.port},
          {"gateway", c.gateway},
          {"target", c.target},
          {"target_url", c.target_url},
          {"sim", c.sim},
          {"seed", c.seed},
          {"anchor_time_ms", c.anchor_time_ms ? json(*c.anchor_time_ms) : json(nullptr)},
          {"cors_origin", c.cors_origin},
          {"ui_dir", c.ui_dir}};
}

}  // namespace pas::api
