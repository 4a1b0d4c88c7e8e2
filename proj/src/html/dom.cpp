#include "pas/html/dom.hpp"

#include <cctype>

namespace pas::html {

namespace {

bool is_void(std::string_view tag) {
  static constexpr std::string_view kVoid[] = {
      "area", "base", "br",   "col",   "embed",  "hr",    "img",
      "input", "link", "meta", "param", "source", "track", "wbr"};
  for (auto v : kVoid) {
    if (v == tag) return true;
  }
  return false;
}

void append_collapsed(std::string& out, std::string_view text) {
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!out.empty() && out.back() != ' ') out += ' ';
    } else {
      out += c;
    }
  }
}

void collect_text(const Node& node, std::string& out) {
  for (const auto& child : node.children()) {
    if (child->type() == NodeType::kText) {
      append_collapsed(out, child->text());
    } else if (child->is_element()) {
      const auto& t = child->tag();
      if (t == "script" || t == "style" || t == "template") continue;
      if (!out.empty() && out.back() != ' ') out += ' ';
      collect_text(*child, out);
    }
  }
}

void serialize(const Node& node, std::string& out);

void serialize_children(const Node& node, std::string& out) {
  for (const auto& child : node.children()) serialize(*child, out);
}

void serialize(const Node& node, std::string& out) {
  switch (node.type()) {
    case NodeType::kDocument:
      serialize_children(node, out);
      return;
    case NodeType::kText: {
      const Node* p = node.parent();
      const bool raw = p && (p->tag() == "script" || p->tag() == "style");
      out += raw ? node.text() : escape_text(node.text());
      return;
    }
    case NodeType::kComment:
      out += "<!--" + node.text() + "-->";
      return;
    case NodeType::kElement:
      out += '<' + node.tag();
      for (const auto& a : node.attributes()) {
        out += ' ' + a.name + "=\"" + escape_attribute(a.value) + '"';
      }
      out += '>';
      if (is_void(node.tag())) return;
      serialize_children(node, out);
      out += "</" + node.tag() + '>';
      return;
  }
}

}  // namespace

const std::string* Node::attribute(std::string_view name) const {
  for (const auto& a : attributes_) {
    if (a.name == name) return &a.value;
  }
  return nullptr;
}

std::string Node::path() const {
  if (type_ == NodeType::kDocument) {
    return frame_owner_ ? frame_owner_->path() + "/#document" : std::string();
  }
  std::string prefix = parent_ ? parent_->path() : std::string();
  if (type_ != NodeType::kElement) return prefix;
  std::size_t index = 1;
  if (parent_) {
    for (const auto& sibling : parent_->children_) {
      if (sibling.get() == this) break;
      if (sibling->is_element() && sibling->tag_ == tag_) ++index;
    }
  }
  return prefix + '/' + tag_ + '[' + std::to_string(index) + ']';
}

std::string Node::outer_html() const {
  std::string out;
  serialize(*this, out);
  return out;
}

std::string Node::inner_html() const {
  std::string out;
  serialize_children(*this, out);
  return out;
}

std::string Node::text_content() const {
  std::string out;
  if (type_ == NodeType::kText) {
    append_collapsed(out, text_);
  } else {
    collect_text(*this, out);
  }
  while (!out.empty() && out.back() == ' ') out.pop_back();
  if (!out.empty() && out.front() == ' ') out.erase(0, 1);
  return out;
}

Node* Node::append_child(std::unique_ptr<Node> child) {
  child->parent_ = this;
  children_.push_back(std::move(child));
  return children_.back().get();
}

void Node::set_content_document(std::unique_ptr<Node> doc) {
  doc->frame_owner_ = this;
  content_document_ = std::move(doc);
}

void for_each_element(const Node& node,
                      const std::function<void(const Node&)>& visit,
                      bool into_frames) {
  if (node.is_element()) visit(node);
  if (into_frames && node.content_document()) {
    for_each_element(*node.content_document(), visit, into_frames);
  }
  for (const auto& child : node.children()) {
    for_each_element(*child, visit, into_frames);
  }
}

std::string escape_text(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string escape_attribute(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace pas::html
