#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace pas::util {

std::string to_lower(std::string_view s);
std::string_view trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);

// Whole-phrase, case-insensitive occurrence count. A match must not be
// adjacent to an alphanumeric character on either side.
std::size_t count_phrase(std::string_view haystack, std::string_view phrase);
bool contains_phrase(std::string_view haystack, std::string_view phrase);

// Text between consecutive `"""` delimiters, in order of appearance.
std::vector<std::string_view> quoted_blocks(std::string_view text);

// Replaces every `{name}` occurrence for each (name, value) pair.
std::string render_template(
    std::string_view tmpl,
    const std::vector<std::pair<std::string, std::string>>& values);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

std::string format_fixed(double value, int decimals);
std::string base64_encode(std::string_view bytes);
std::string base64_decode(std::string_view text);

}  // namespace pas::util
