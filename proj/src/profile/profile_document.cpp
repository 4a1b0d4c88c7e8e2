#include "pas/profile/profile_document.hpp"

#include "pas/error.hpp"
#include "pas/util/hash.hpp"

namespace pas::profile {

using nlohmann::json;

std::string canonical_document(const BrowserProfile& profile) {
  // nlohmann's object type is an ordered std::map, so dump() is already
  // key-sorted; numbers are printed round-trip exact.
  const json doc = {{"schema_version", kProfileDocumentVersion}, {"profile", profile}};
  return doc.dump();
}

std::string document_hash(std::string_view document) { return util::sha256_hex(document); }

std::string profile_hash(const BrowserProfile& profile) {
  return document_hash(canonical_document(profile));
}

BrowserProfile parse_document(std::string_view document, std::string_view expected_hash) {
  if (!expected_hash.empty() && document_hash(document) != expected_hash) {
    throw Error(ErrorCode::kConsistency, "profile document hash mismatch",
                {{"expected", std::string(expected_hash)},
                 {"actual", document_hash(document)}});
  }
  const auto doc = json::parse(document, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    throw Error(ErrorCode::kInvalidArgument, "profile document is not a JSON object");
  }
  const int version = doc.value("schema_version", 0);
  if (version != kProfileDocumentVersion) {
    throw Error(ErrorCode::kSchemaVersion, "unsupported profile document version",
                {{"found", version}, {"expected", kProfileDocumentVersion}});
  }
  try {
    return doc.at("profile").get<BrowserProfile>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, std::string("profile document: ") + e.what());
  }
}

}  // namespace pas::profile
