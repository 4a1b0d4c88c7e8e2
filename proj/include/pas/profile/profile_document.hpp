#pragma once

#include <string>

#include "pas/profile/browser_profile.hpp"

namespace pas::profile {

inline constexpr int kProfileDocumentVersion = 1;
inline constexpr std::string_view kProfileHeader = "X-Sandbox-Profile";
inline constexpr std::string_view kProfileHashHeader = "X-Sandbox-Profile-Hash";
// Documents whose base64 form exceeds this travel in the request body.
inline constexpr std::size_t kMaxHeaderDocumentBytes = 6 * 1024;

// {"schema_version":1,"profile":{...}} serialized with sorted keys and no
// whitespace. Equal profiles give byte-identical documents.
std::string canonical_document(const BrowserProfile& profile);

// Hex SHA-256 of canonical_document().
std::string profile_hash(const BrowserProfile& profile);
std::string document_hash(std::string_view document);

// Parses a canonical (or any equivalent) document. When `expected_hash` is
// non-empty it must match the hash of the document bytes (kConsistency).
BrowserProfile parse_document(std::string_view document,
                              std::string_view expected_hash = {});

}  // namespace pas::profile
