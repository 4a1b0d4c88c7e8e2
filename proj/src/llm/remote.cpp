#include "pas/llm/remote.hpp"

#include <cstdlib>

#include "httplib.h"
#include "pas/error.hpp"
#include "pas/util/hash.hpp"
#include "pas/util/text.hpp"

namespace pas::llm {

namespace {

std::pair<std::string, std::string> split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw Error(ErrorCode::kInvalidArgument, "endpoint_url needs a scheme: " + url);
  }
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

std::string describe_prompt(const ImagePayload& payload) {
  std::string prompt =
      "Describe this online advertisement in one paragraph: the product or service, "
      "the brand, the tone of the message and any visual cues about its intended audience.";
  if (payload.kind == ImagePayload::Kind::kMarkup) {
    prompt += "\nAdvertisement markup:\n\"\"\"" + payload.bytes + "\"\"\"";
  }
  return prompt;
}

}  // namespace

RemoteChatGateway::RemoteChatGateway(const ProviderConfig& cfg)
    : Gateway(cfg.max_concurrency), cfg_(cfg) {
  cfg_.validate();
  std::tie(origin_, path_) = split_url(*cfg_.endpoint_url);
}

nlohmann::json RemoteChatGateway::build_body(const CompletionRequest& req) const {
  std::string content = req.prompt;
  if (req.response_schema) {
    content += "\n\nRespond with a single JSON object matching this schema:\n" +
               req.response_schema->descriptor().dump();
  }
  nlohmann::json body = {
      {"model", *cfg_.model_name},
      {"messages", nlohmann::json::array({{{"role", "user"}, {"content", content}}})},
      {"temperature", req.temperature},
      {"max_tokens", req.max_tokens}};
  if (req.seed) body["seed"] = *req.seed;
  return body;
}

std::string RemoteChatGateway::post(const nlohmann::json& body) const {
  httplib::Client client(origin_);
  const auto timeout_s = static_cast<time_t>(cfg_.request_timeout_s);
  const auto timeout_us = static_cast<time_t>(
      (cfg_.request_timeout_s - static_cast<double>(timeout_s)) * 1e6);
  client.set_connection_timeout(timeout_s, timeout_us);
  client.set_read_timeout(timeout_s, timeout_us);
  client.set_write_timeout(timeout_s, timeout_us);

  httplib::Headers headers;
  if (cfg_.api_key_env) {
    if (const char* key = std::getenv(cfg_.api_key_env->c_str()); key && *key) {
      headers.emplace("Authorization", std::string("Bearer ") + key);
    }
  }
  auto res = client.Post(path_, headers, body.dump(), "application/json");
  if (!res) {
    const auto err = res.error();
    const bool timed_out = err == httplib::Error::ConnectionTimeout ||
                           err == httplib::Error::Read || err == httplib::Error::Write;
    throw Error(timed_out ? ErrorCode::kTimeout : ErrorCode::kGatewayFailure,
                "remote provider request failed: " + httplib::to_string(err),
                {{"endpoint", *cfg_.endpoint_url}});
  }
  if (res->status < 200 || res->status >= 300 || res->body.empty()) {
    throw Error(ErrorCode::kRemoteStatus,
                res->body.empty() ? "remote provider returned an empty body"
                                  : "remote provider returned an error status",
                {{"status", res->status}, {"body", res->body}});
  }
  const auto parsed = nlohmann::json::parse(res->body, nullptr, false);
  if (parsed.is_discarded() || !parsed.is_object() || !parsed.contains("text") ||
      !parsed["text"].is_string()) {
    throw Error(ErrorCode::kStructuredOutput,
                "remote provider response lacks a 'text' string",
                {{"status", res->status}, {"raw", res->body}});
  }
  return parsed["text"].get<std::string>();
}

std::string RemoteChatGateway::do_complete(const CompletionRequest& req) {
  return post(build_body(req));
}

std::string RemoteChatGateway::do_describe(const ImagePayload& payload,
                                           std::optional<std::uint64_t> seed) {
  CompletionRequest req;
  req.prompt = describe_prompt(payload);
  req.max_tokens = 400;
  req.temperature = 0.0;
  req.seed = seed;
  auto body = build_body(req);
  if (payload.kind == ImagePayload::Kind::kImage) {
    body["messages"][0]["image"] = {{"mime_type", payload.mime_type},
                                    {"data_base64", util::base64_encode(payload.bytes)}};
  }
  return post(body);
}

}  // namespace pas::llm
