#include "pas/util/text.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "pas/error.hpp"

namespace pas::util {

namespace {

bool is_word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0;
}

}  // namespace

std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  return out;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n\f\v");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n\f\v");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.emplace_back(s.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::size_t count_phrase(std::string_view haystack, std::string_view phrase) {
  if (phrase.empty()) return 0;
  const std::string hay = to_lower(haystack);
  const std::string needle = to_lower(phrase);
  std::size_t count = 0;
  for (auto pos = hay.find(needle); pos != std::string::npos;
       pos = hay.find(needle, pos + 1)) {
    const bool left_ok = pos == 0 || !is_word_char(hay[pos - 1]) ||
                         !is_word_char(needle.front());
    const auto end = pos + needle.size();
    const bool right_ok = end >= hay.size() || !is_word_char(hay[end]) ||
                          !is_word_char(needle.back());
    if (left_ok && right_ok) ++count;
  }
  return count;
}

bool contains_phrase(std::string_view haystack, std::string_view phrase) {
  return count_phrase(haystack, phrase) > 0;
}

std::vector<std::string_view> quoted_blocks(std::string_view text) {
  constexpr std::string_view kDelim = "\"\"\"";
  std::vector<std::string_view> blocks;
  std::size_t pos = text.find(kDelim);
  while (pos != std::string_view::npos) {
    const auto start = pos + kDelim.size();
    const auto end = text.find(kDelim, start);
    if (end == std::string_view::npos) break;
    blocks.push_back(text.substr(start, end - start));
    pos = text.find(kDelim, end + kDelim.size());
  }
  return blocks;
}

std::string render_template(
    std::string_view tmpl,
    const std::vector<std::pair<std::string, std::string>>& values) {
  std::string out(tmpl);
  for (const auto& [name, value] : values) {
    const std::string placeholder = "{" + name + "}";
    std::size_t pos = 0;
    while ((pos = out.find(placeholder, pos)) != std::string::npos) {
      out.replace(pos, placeholder.size(), value);
      pos += value.size();
    }
  }
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write '" + path + "'");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw Error(ErrorCode::kIo, "short write to '" + path + "'");
}

std::string format_fixed(double value, int decimals) {
  std::ostringstream ss;
  ss << std::fixed << std::setprecision(decimals) << value;
  return ss.str();
}

}  // namespace pas::util
