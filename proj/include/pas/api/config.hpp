#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "pas/adsim/simulator.hpp"
#include "pas/llm/gateway.hpp"

namespace pas::api {

// Environment overrides, applied after the config file and before flags.
inline constexpr const char* kEnvDataDir = "PAS_DATA_DIR";
inline constexpr const char* kEnvGatewayKeyVar = "PAS_GATEWAY_KEY_VAR";
inline constexpr const char* kEnvBindAddress = "PAS_BIND_ADDRESS";  // host or host:port

struct ServiceConfig {
  std::string data_dir = "pas-data";
  std::string bind_address = "127.0.0.1";
  int port = 8686;
  llm::ProviderConfig gateway;
  std::string target = "simulator";
  std::string target_url;
  adsim::SimPolicy sim;
  std::uint64_t seed = 0;
  // History timestamps are placed relative to this; start of the current UTC
  // day when unset.
  std::optional<std::int64_t> anchor_time_ms;
  std::string cors_origin = "*";
  // Built UI assets served under /ui when set.
  std::string ui_dir;

  // JSON object with the keys above; unknown keys are rejected.
  static ServiceConfig load(const std::string& path);
  static ServiceConfig from_json(const nlohmann::json& j);
  void apply_environment();
  void validate() const;
};

nlohmann::json to_json(const ServiceConfig& c);

}  // namespace pas::api
