#include "pas/html/parser.hpp"

#include <algorithm>
#include <cctype>
#include <cstdint>

#include "pas/util/text.hpp"

namespace pas::html {

namespace {

bool one_of(std::string_view tag, std::initializer_list<std::string_view> set) {
  return std::find(set.begin(), set.end(), tag) != set.end();
}

bool is_void_tag(std::string_view tag) {
  return one_of(tag, {"area", "base", "br", "col", "embed", "hr", "img",
                      "input", "link", "meta", "param", "source", "track",
                      "wbr"});
}

// Elements whose content is not markup.
bool is_raw_text_tag(std::string_view tag) {
  return one_of(tag, {"script", "style", "textarea", "title", "xmp",
                      "iframe", "noembed", "noframes"});
}

// Block-level start tags that implicitly close an open <p>.
bool closes_paragraph(std::string_view tag) {
  return one_of(tag, {"address", "article", "aside", "blockquote", "div",
                      "dl", "fieldset", "footer", "form", "h1", "h2", "h3",
                      "h4", "h5", "h6", "header", "hr", "main", "nav", "ol",
                      "p", "pre", "section", "table", "ul", "figure"});
}

// Elements whose end tag may be omitted without a warning.
bool optional_end_tag(std::string_view tag) {
  return one_of(tag, {"html", "head", "body", "p", "li", "dt", "dd",
                      "option", "tr", "td", "th", "thead", "tbody",
                      "tfoot", "colgroup"});
}

bool is_name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' ||
         c == ':' || c == '.';
}

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

void append_utf8(std::string& out, std::uint32_t cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp <= 0x10FFFF) {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

}  // namespace

std::string decode_entities(std::string_view text) {
  static constexpr std::pair<std::string_view, std::string_view> kNamed[] = {
      {"amp", "&"},   {"lt", "<"},     {"gt", ">"},    {"quot", "\""},
      {"apos", "'"},  {"nbsp", "\xC2\xA0"}, {"copy", "\xC2\xA9"},
      {"reg", "\xC2\xAE"}, {"trade", "\xE2\x84\xA2"}, {"mdash", "\xE2\x80\x94"},
      {"ndash", "\xE2\x80\x93"}, {"hellip", "\xE2\x80\xA6"}};
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] != '&') {
      out += text[i++];
      continue;
    }
    const auto semi = text.find(';', i + 1);
    if (semi == std::string_view::npos || semi - i > 10) {
      out += text[i++];
      continue;
    }
    const std::string_view name = text.substr(i + 1, semi - i - 1);
    bool decoded = false;
    if (!name.empty() && name[0] == '#') {
      std::uint32_t cp = 0;
      bool ok = name.size() > 1;
      const bool hex = ok && (name[1] == 'x' || name[1] == 'X');
      for (std::size_t k = hex ? 2 : 1; ok && k < name.size(); ++k) {
        const char c = name[k];
        if (hex && std::isxdigit(static_cast<unsigned char>(c))) {
          cp = cp * 16 + static_cast<std::uint32_t>(
                             std::isdigit(static_cast<unsigned char>(c))
                                 ? c - '0'
                                 : std::tolower(c) - 'a' + 10);
        } else if (!hex && std::isdigit(static_cast<unsigned char>(c))) {
          cp = cp * 10 + static_cast<std::uint32_t>(c - '0');
        } else {
          ok = false;
        }
      }
      if (ok && (hex ? name.size() > 2 : true)) {
        append_utf8(out, cp);
        decoded = true;
      }
    } else {
      for (const auto& [n, v] : kNamed) {
        if (n == name) {
          out += v;
          decoded = true;
          break;
        }
      }
    }
    if (decoded) {
      i = semi + 1;
    } else {
      out += text[i++];
    }
  }
  return out;
}

class TreeBuilder {
 public:
  TreeBuilder(std::string_view input, std::vector<std::string>& warnings)
      : in_(input), warnings_(warnings) {
    root_ = std::make_unique<Node>(NodeType::kDocument);
    stack_.push_back(root_.get());
  }

  std::unique_ptr<Node> run() {
    while (pos_ < in_.size()) {
      if (in_[pos_] == '<') {
        if (starts_with("<!--")) {
          comment();
        } else if (starts_with("</")) {
          end_tag();
        } else if (pos_ + 1 < in_.size() &&
                   (in_[pos_ + 1] == '!' || in_[pos_ + 1] == '?')) {
          skip_declaration();
        } else if (pos_ + 1 < in_.size() &&
                   std::isalpha(static_cast<unsigned char>(in_[pos_ + 1]))) {
          start_tag();
        } else {
          text_until_tag();
        }
      } else {
        text_until_tag();
      }
    }
    for (std::size_t i = stack_.size(); i-- > 1;) {
      if (!optional_end_tag(stack_[i]->tag_)) {
        warnings_.push_back("unclosed <" + stack_[i]->tag_ + "> at " +
                            stack_[i]->path());
      }
    }
    return std::move(root_);
  }

 private:
  bool starts_with(std::string_view s) const {
    return in_.substr(pos_, s.size()) == s;
  }

  Node* current() { return stack_.back(); }

  void add_text(std::string_view raw) {
    if (raw.empty()) return;
    auto node = std::make_unique<Node>(NodeType::kText);
    node->text_ = decode_entities(raw);
    current()->append_child(std::move(node));
  }

  void text_until_tag() {
    const auto start = pos_;
    ++pos_;
    while (pos_ < in_.size() && in_[pos_] != '<') ++pos_;
    add_text(in_.substr(start, pos_ - start));
  }

  void comment() {
    const auto start = pos_ + 4;
    const auto end = in_.find("-->", start);
    auto node = std::make_unique<Node>(NodeType::kComment);
    if (end == std::string_view::npos) {
      warnings_.push_back("unterminated comment");
      node->text_ = std::string(in_.substr(start));
      pos_ = in_.size();
    } else {
      node->text_ = std::string(in_.substr(start, end - start));
      pos_ = end + 3;
    }
    current()->append_child(std::move(node));
  }

  void skip_declaration() {
    const auto end = in_.find('>', pos_);
    pos_ = end == std::string_view::npos ? in_.size() : end + 1;
  }

  std::string read_name() {
    const auto start = pos_;
    while (pos_ < in_.size() && is_name_char(in_[pos_])) ++pos_;
    return util::to_lower(in_.substr(start, pos_ - start));
  }

  void skip_spaces() {
    while (pos_ < in_.size() && is_space(in_[pos_])) ++pos_;
  }

  void end_tag() {
    pos_ += 2;
    const std::string name = read_name();
    const auto close = in_.find('>', pos_);
    pos_ = close == std::string_view::npos ? in_.size() : close + 1;
    if (name.empty()) return;

    for (std::size_t i = stack_.size(); i-- > 1;) {
      if (stack_[i]->tag_ == name) {
        for (std::size_t k = stack_.size() - 1; k > i; --k) {
          if (!optional_end_tag(stack_[k]->tag_)) {
            warnings_.push_back("implicitly closed <" + stack_[k]->tag_ +
                                "> at " + stack_[k]->path());
          }
        }
        stack_.resize(i);
        return;
      }
    }
    warnings_.push_back("stray end tag </" + name + ">");
  }

  void start_tag() {
    ++pos_;
    auto node = std::make_unique<Node>(NodeType::kElement);
    node->tag_ = read_name();
    bool self_closing = false;

    while (pos_ < in_.size()) {
      skip_spaces();
      if (pos_ >= in_.size()) break;
      if (in_[pos_] == '>') {
        ++pos_;
        break;
      }
      if (in_[pos_] == '/') {
        ++pos_;
        if (pos_ < in_.size() && in_[pos_] == '>') {
          self_closing = true;
          ++pos_;
          break;
        }
        continue;
      }
      if (in_[pos_] == '<') {
        warnings_.push_back("unterminated start tag <" + node->tag_ + ">");
        break;
      }
      Attribute attr;
      const auto name_start = pos_;
      while (pos_ < in_.size() && !is_space(in_[pos_]) && in_[pos_] != '=' &&
             in_[pos_] != '>' && in_[pos_] != '/' && in_[pos_] != '<') {
        ++pos_;
      }
      attr.name = util::to_lower(in_.substr(name_start, pos_ - name_start));
      if (attr.name.empty()) {
        ++pos_;
        continue;
      }
      skip_spaces();
      if (pos_ < in_.size() && in_[pos_] == '=') {
        ++pos_;
        skip_spaces();
        attr.value = read_attribute_value();
      }
      if (node->attribute(attr.name) == nullptr) {
        node->attributes_.push_back(std::move(attr));
      } else {
        warnings_.push_back("duplicate attribute '" + attr.name + "' on <" +
                            node->tag_ + ">");
      }
    }

    apply_implicit_closes(node->tag_);
    const std::string tag = node->tag_;
    Node* element = current()->append_child(std::move(node));

    if (is_void_tag(tag) || self_closing) return;
    if (is_raw_text_tag(tag)) {
      raw_text(element);
      return;
    }
    stack_.push_back(element);
  }

  std::string read_attribute_value() {
    if (pos_ >= in_.size()) return {};
    const char q = in_[pos_];
    if (q == '"' || q == '\'') {
      const auto end = in_.find(q, pos_ + 1);
      if (end == std::string_view::npos) {
        warnings_.push_back("unterminated attribute value");
        const auto v = in_.substr(pos_ + 1);
        pos_ = in_.size();
        return decode_entities(v);
      }
      const auto v = in_.substr(pos_ + 1, end - pos_ - 1);
      pos_ = end + 1;
      return decode_entities(v);
    }
    const auto start = pos_;
    while (pos_ < in_.size() && !is_space(in_[pos_]) && in_[pos_] != '>') ++pos_;
    return decode_entities(in_.substr(start, pos_ - start));
  }

  void raw_text(Node* element) {
    const std::string closing = "</" + element->tag_;
    std::size_t end = pos_;
    while (true) {
      end = in_.find("</", end);
      if (end == std::string_view::npos) break;
      if (util::to_lower(in_.substr(end, closing.size())) == closing) break;
      end += 2;
    }
    std::string_view body;
    if (end == std::string_view::npos) {
      warnings_.push_back("unclosed <" + element->tag_ + "> at " +
                          element->path());
      body = in_.substr(pos_);
      pos_ = in_.size();
    } else {
      body = in_.substr(pos_, end - pos_);
      const auto close = in_.find('>', end);
      pos_ = close == std::string_view::npos ? in_.size() : close + 1;
    }
    if (!body.empty() && element->tag_ != "iframe") {
      auto text = std::make_unique<Node>(NodeType::kText);
      const bool decode = element->tag_ == "textarea" || element->tag_ == "title";
      text->text_ = decode ? decode_entities(body) : std::string(body);
      element->append_child(std::move(text));
    }
    if (element->tag_ == "iframe" || element->tag_ == "frame") {
      if (const auto* srcdoc = element->attribute("srcdoc")) {
        TreeBuilder inner(*srcdoc, warnings_);
        element->set_content_document(inner.run());
      }
    }
  }

  void apply_implicit_closes(std::string_view tag) {
    auto pop_if_current = [&](std::initializer_list<std::string_view> tags) {
      if (stack_.size() > 1 && one_of(current()->tag_, tags)) {
        stack_.pop_back();
        return true;
      }
      return false;
    };
    if (closes_paragraph(tag)) pop_if_current({"p"});
    if (tag == "li") pop_if_current({"li"});
    if (tag == "dt" || tag == "dd") pop_if_current({"dt", "dd"});
    if (tag == "option") pop_if_current({"option"});
    if (tag == "td" || tag == "th") pop_if_current({"td", "th"});
    if (tag == "tr") {
      pop_if_current({"td", "th"});
      pop_if_current({"tr"});
    }
  }

  std::string_view in_;
  std::size_t pos_ = 0;
  std::vector<std::string>& warnings_;
  std::unique_ptr<Node> root_;
  std::vector<Node*> stack_;
};

Document parse(std::string_view markup) {
  Document doc;
  TreeBuilder builder(markup, doc.warnings);
  doc.root = builder.run();
  return doc;
}

}  // namespace pas::html
