#include "pas/profile/target.hpp"

#include "pas/error.hpp"
#include "pas/profile/profile_document.hpp"

namespace pas::profile {

std::string_view to_string(Surface s) {
  switch (s) {
    case Surface::kAccount: return "account";
    case Surface::kGeolocation: return "geolocation";
    case Surface::kIpRegion: return "ip_region";
    case Surface::kUserAgent: return "user_agent";
    case Surface::kHistory: return "history";
  }
  return "unknown";
}

AppliedContext apply_profile(const BrowserProfile& profile, TargetAdapter& target) {
  profile.validate();
  auto ctx = target.apply(profile);
  const auto caps = target.capabilities();
  for (auto s : kAllSurfaces) {
    if (!caps.count(s)) {
      ctx.skipped.insert(s);
      ctx.applied.erase(s);
    }
  }
  return ctx;
}

DevToolsAdapter::DevToolsAdapter(CommandChannel& channel, std::string base_url)
    : channel_(channel), base_url_(std::move(base_url)) {
  while (!base_url_.empty() && base_url_.back() == '/') base_url_.pop_back();
}

std::set<Surface> DevToolsAdapter::capabilities() const {
  return {Surface::kUserAgent, Surface::kGeolocation};
}

AppliedContext DevToolsAdapter::apply(const BrowserProfile& profile) {
  channel_.send("Emulation.setUserAgentOverride", {{"userAgent", profile.user_agent}});
  channel_.send("Emulation.setGeolocationOverride",
                {{"latitude", profile.geolocation.latitude},
                 {"longitude", profile.geolocation.longitude},
                 {"accuracy", 50}});
  hash_ = profile_hash(profile);
  AppliedContext ctx;
  ctx.context_id = *hash_;
  ctx.profile_hash = *hash_;
  ctx.applied = capabilities();
  for (auto s : kAllSurfaces) {
    if (!ctx.applied.count(s)) ctx.skipped.insert(s);
  }
  return ctx;
}

void DevToolsAdapter::clear() {
  channel_.send("Emulation.setUserAgentOverride", {{"userAgent", ""}});
  channel_.send("Emulation.clearGeolocationOverride", nlohmann::json::object());
  hash_.reset();
}

PageFetch DevToolsAdapter::fetch(const std::string& site, int round) {
  PageFetch page;
  page.url = base_url_ + "/site/" + site + "?round=" + std::to_string(round);
  channel_.send("Page.navigate", {{"url", page.url}});
  const auto res = channel_.send(
      "Runtime.evaluate",
      {{"expression", "document.documentElement.outerHTML"}, {"returnByValue", true}});
  const auto* value = res.is_object() && res.contains("result") ? &res["result"] : nullptr;
  if (!value || !value->contains("value") || !(*value)["value"].is_string()) {
    throw Error(ErrorCode::kTargetUnreachable, "devtools: page markup unavailable",
                {{"url", page.url}, {"response", res}});
  }
  page.html = (*value)["value"].get<std::string>();
  return page;
}

}  // namespace pas::profile
