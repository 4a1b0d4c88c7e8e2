#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <unistd.h>

#include "pas/llm/gateway.hpp"
#include "pas/llm/lexicon.hpp"
#include "pas/persona/engine.hpp"
#include "pas/persona/store.hpp"

namespace pas::testing {

// 2026-03-02T00:00:00Z. Tests pin it so persona sets hash the same on any day.
inline constexpr std::int64_t kAnchorMs = 1772409600000;

class TempDir {
 public:
  explicit TempDir(const std::string& tag = "pas") {
    static std::atomic<int> counter{0};
    const auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
    path_ = std::filesystem::temp_directory_path() /
            (tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(stamp) + "-" +
             std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::string str() const { return path_.string(); }
  std::string sub(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

inline std::shared_ptr<llm::Gateway> stub_gateway(double noise_sigma = 0.0) {
  llm::ProviderConfig cfg;
  cfg.stub_noise_sigma = noise_sigma;
  return llm::make_gateway(cfg, llm::Lexicon::load_default());
}

inline persona::EngineOptions engine_options() {
  auto o = persona::EngineOptions::defaults();
  o.anchor_time_ms = kAnchorMs;
  return o;
}

inline std::shared_ptr<persona::PersonaEngine> stub_engine(std::shared_ptr<llm::Gateway> gw = nullptr) {
  if (!gw) gw = stub_gateway();
  return std::make_shared<persona::PersonaEngine>(std::move(gw), engine_options());
}

// Base persona + variants, saved into `store`. Returns the set id.
inline std::string make_set(const persona::PersonaEngine& engine, const persona::PersonaStore& store,
                            AttributeKind attribute, std::uint64_t seed,
                            const std::string& guidance = "an adult living in the United States") {
  auto base = engine.generate_base_persona(guidance, seed);
  auto set = engine.generate_variants(base, attribute, seed);
  store.save(base);
  store.save(set);
  return set.id;
}

}  // namespace pas::testing
