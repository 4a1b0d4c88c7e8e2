#include "pas/adsim/adapter.hpp"

#include <httplib.h>

#include "pas/error.hpp"
#include "pas/profile/profile_document.hpp"
#include "pas/util/text.hpp"

namespace pas::adsim {

namespace {

profile::AppliedContext full_context(const std::string& hash) {
  profile::AppliedContext ctx;
  ctx.context_id = hash;
  ctx.profile_hash = hash;
  ctx.applied = profile::kAllSurfaces;
  return ctx;
}

}  // namespace

SimulatorAdapter::SimulatorAdapter(std::shared_ptr<const Simulator> sim) : sim_(std::move(sim)) {
  if (!sim_) throw Error(ErrorCode::kInvalidArgument, "adapter needs a simulator");
}

profile::AppliedContext SimulatorAdapter::apply(const profile::BrowserProfile& p) {
  document_ = profile::canonical_document(p);
  hash_ = profile::document_hash(*document_);
  return full_context(*hash_);
}

void SimulatorAdapter::clear() {
  document_.reset();
  hash_.reset();
}

profile::PageFetch SimulatorAdapter::fetch(const std::string& site, int round) {
  // Round-trip through the wire encoding so both transports behave alike.
  std::optional<std::string> doc;
  if (document_) doc = util::base64_decode(util::base64_encode(*document_));
  auto page = handle_page_request(*sim_, site, round, doc, hash_);
  profile::PageFetch out;
  out.url = "sim://local/site/" + site + "?round=" + std::to_string(round);
  out.html = page.html;
  if (doc) out.echoed_hash = page.context_id;
  last_ = std::move(page);
  return out;
}

HttpSimulatorAdapter::HttpSimulatorAdapter(std::string base_url, double timeout_s)
    : base_url_(std::move(base_url)), timeout_s_(timeout_s) {
  while (!base_url_.empty() && base_url_.back() == '/') base_url_.pop_back();
  if (base_url_.empty()) throw Error(ErrorCode::kInvalidArgument, "simulator url is empty");
}

profile::AppliedContext HttpSimulatorAdapter::apply(const profile::BrowserProfile& p) {
  document_ = profile::canonical_document(p);
  hash_ = profile::document_hash(*document_);
  return full_context(*hash_);
}

void HttpSimulatorAdapter::clear() {
  document_.reset();
  hash_.reset();
}

profile::PageFetch HttpSimulatorAdapter::fetch(const std::string& site, int round) {
  httplib::Client client(base_url_);
  const auto secs = static_cast<time_t>(timeout_s_);
  const auto usecs = static_cast<time_t>((timeout_s_ - static_cast<double>(secs)) * 1e6);
  client.set_connection_timeout(secs, usecs);
  client.set_read_timeout(secs, usecs);

  const std::string path = "/site/" + site + "?round=" + std::to_string(round);
  httplib::Headers headers;
  httplib::Result res{nullptr, httplib::Error::Unknown};
  if (document_) {
    headers.emplace(std::string(profile::kProfileHashHeader), *hash_);
    const auto encoded = util::base64_encode(*document_);
    if (encoded.size() <= profile::kMaxHeaderDocumentBytes) {
      headers.emplace(std::string(profile::kProfileHeader), encoded);
      res = client.Get(path, headers);
    } else {
      res = client.Post(path, headers, *document_, "application/json");
    }
  } else {
    res = client.Get(path);
  }
  if (!res) {
    throw Error(ErrorCode::kTargetUnreachable, "simulator unreachable: " + httplib::to_string(res.error()),
                {{"url", base_url_ + path}});
  }
  if (res->status == 404) {
    throw Error(ErrorCode::kNotFound, "simulator does not know site '" + site + "'",
                {{"status", res->status}, {"body", res->body}});
  }
  if (res->status < 200 || res->status >= 300) {
    throw Error(ErrorCode::kTargetUnreachable, "simulator answered " + std::to_string(res->status),
                {{"status", res->status}, {"body", res->body}});
  }
  profile::PageFetch out;
  out.url = base_url_ + path;
  out.html = res->body;
  out.status = res->status;
  if (res->has_header(std::string(profile::kProfileHashHeader))) {
    out.echoed_hash = res->get_header_value(std::string(profile::kProfileHashHeader));
  }
  return out;
}

}  // namespace pas::adsim
