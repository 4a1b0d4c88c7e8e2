#pragma once

#include <memory>
#include <optional>
#include <string>

#include "pas/adsim/simulator.hpp"
#include "pas/profile/target.hpp"

namespace pas::adsim {

// In-process target. Profiles travel as the same canonical document the
// HTTP transport uses and go through the same request handler.
class SimulatorAdapter final : public profile::TargetAdapter {
 public:
  explicit SimulatorAdapter(std::shared_ptr<const Simulator> sim);

  std::string name() const override { return "simulator"; }
  std::set<profile::Surface> capabilities() const override { return profile::kAllSurfaces; }
  profile::AppliedContext apply(const profile::BrowserProfile& profile) override;
  void clear() override;
  profile::PageFetch fetch(const std::string& site, int round) override;

  // Ground truth of the last fetched page.
  const std::optional<ServedPage>& last_page() const { return last_; }

 private:
  std::shared_ptr<const Simulator> sim_;
  std::optional<std::string> document_;
  std::optional<std::string> hash_;
  std::optional<ServedPage> last_;
};

// Target reached over HTTP (`sandbox sim serve`). Small documents go in the
// profile header; larger ones are POSTed with the hash header.
class HttpSimulatorAdapter final : public profile::TargetAdapter {
 public:
  explicit HttpSimulatorAdapter(std::string base_url, double timeout_s = 10.0);

  std::string name() const override { return "simulator-http"; }
  std::set<profile::Surface> capabilities() const override { return profile::kAllSurfaces; }
  profile::AppliedContext apply(const profile::BrowserProfile& profile) override;
  void clear() override;
  profile::PageFetch fetch(const std::string& site, int round) override;

 private:
  std::string base_url_;
  double timeout_s_;
  std::optional<std::string> document_;
  std::optional<std::string> hash_;
};

}  // namespace pas::adsim
