#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pas/profile/browser_profile.hpp"

namespace pas::profile {

enum class Surface { kAccount, kGeolocation, kIpRegion, kUserAgent, kHistory };

inline const std::set<Surface> kAllSurfaces = {Surface::kAccount, Surface::kGeolocation,
                                               Surface::kIpRegion, Surface::kUserAgent,
                                               Surface::kHistory};

std::string_view to_string(Surface s);

struct AppliedContext {
  std::string context_id;
  std::string profile_hash;
  std::set<Surface> applied;
  std::set<Surface> skipped;

  bool partial() const { return !skipped.empty(); }
};

struct PageFetch {
  std::string url;
  std::string html;
  int status = 200;
  // Profile hash the target reported back, when it reports one.
  std::optional<std::string> echoed_hash;
};

// Something that can receive a browser profile and serve pages under it.
class TargetAdapter {
 public:
  virtual ~TargetAdapter() = default;

  virtual std::string name() const = 0;
  virtual std::set<Surface> capabilities() const = 0;
  // Replaces any previously applied profile.
  virtual AppliedContext apply(const BrowserProfile& profile) = 0;
  // Back to the target's unpersonalized state.
  virtual void clear() = 0;
  virtual PageFetch fetch(const std::string& site, int round) = 0;
};

// Validates the profile and applies it; the returned context lists every
// surface the adapter could not take.
AppliedContext apply_profile(const BrowserProfile& profile, TargetAdapter& target);

// Transport for a remote-debugging session (one JSON command per call).
class CommandChannel {
 public:
  virtual ~CommandChannel() = default;
  virtual nlohmann::json send(const std::string& method, const nlohmann::json& params) = 0;
};

// Browser driven over a remote-debugging protocol. It can override the user
// agent and geolocation; account state, IP region and history are skipped.
class DevToolsAdapter final : public TargetAdapter {
 public:
  DevToolsAdapter(CommandChannel& channel, std::string base_url);

  std::string name() const override { return "devtools"; }
  std::set<Surface> capabilities() const override;
  AppliedContext apply(const BrowserProfile& profile) override;
  void clear() override;
  PageFetch fetch(const std::string& site, int round) override;

 private:
  CommandChannel& channel_;
  std::string base_url_;
  std::optional<std::string> hash_;
};

}  // namespace pas::profile
