#pragma once

#include <string_view>

#include "pas/html/dom.hpp"

namespace pas::html {

// Error-tolerant parse. Malformed markup never throws; every recovery
// step is reported in Document::warnings.
Document parse(std::string_view markup);

std::string decode_entities(std::string_view text);

}  // namespace pas::html
