#pragma once

#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace pas::html {

enum class NodeType { kDocument, kElement, kText, kComment };

struct Attribute {
  std::string name;   // lower-cased
  std::string value;  // entity-decoded
};

class Node {
 public:
  explicit Node(NodeType type) : type_(type) {}

  NodeType type() const { return type_; }
  bool is_element() const { return type_ == NodeType::kElement; }

  const std::string& tag() const { return tag_; }
  const std::string& text() const { return text_; }
  const std::vector<Attribute>& attributes() const { return attributes_; }
  const std::string* attribute(std::string_view name) const;

  const Node* parent() const { return parent_; }
  const std::vector<std::unique_ptr<Node>>& children() const { return children_; }
  // Parsed `srcdoc` of an iframe/frame element, when present.
  const Node* content_document() const { return content_document_.get(); }

  // Structural path, e.g. "/html[1]/body[1]/div[2]". Indices count
  // preceding siblings with the same tag. Nodes inside an inline frame
  // document continue the frame element's path with "/#document".
  std::string path() const;

  std::string outer_html() const;
  std::string inner_html() const;
  // Visible descendant text with whitespace collapsed; script/style skipped.
  std::string text_content() const;

  Node* append_child(std::unique_ptr<Node> child);
  void set_content_document(std::unique_ptr<Node> doc);

 private:
  friend class TreeBuilder;

  NodeType type_;
  std::string tag_;
  std::string text_;
  std::vector<Attribute> attributes_;
  Node* parent_ = nullptr;
  Node* frame_owner_ = nullptr;  // set on a content document root
  std::vector<std::unique_ptr<Node>> children_;
  std::unique_ptr<Node> content_document_;
};

struct Document {
  std::unique_ptr<Node> root;
  std::vector<std::string> warnings;
};

// Depth-first pre-order over elements. Inline frame documents are visited
// right after their owning element when `into_frames` is set.
void for_each_element(const Node& node,
                      const std::function<void(const Node&)>& visit,
                      bool into_frames = true);

std::string escape_text(std::string_view text);
std::string escape_attribute(std::string_view text);

}  // namespace pas::html
