#pragma once

#include <cstddef>
#include <istream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace kmodel {

enum class NodeKind { Branch, Leaf };

struct KnowledgeNode {
  /// Normalized identifier, unique tree-wide ("bayes-rule").
  std::string name;
  /// Name as written in the tree file ("Bayes' rule").
  std::string display_name;
  NodeKind kind = NodeKind::Leaf;
  std::vector<std::string> children;
  /// Empty for the root.
  std::string parent;
};

/// Validated taxonomy: single root, unique names, every branch has at least
/// one child and no leaf has any. Leaves are knowledge points.
class KnowledgeTree {
 public:
  /// Draft node used while building: `parent` is an index into the draft
  /// list, or -1 for a root.
  struct Draft {
    std::string display_name;
    NodeKind kind;
    std::ptrdiff_t parent;
  };

  /// Validates and indexes. Throws ValidationError naming the offending node.
  static KnowledgeTree build(std::span<const Draft> drafts);

  const KnowledgeNode& root() const { return nodes_.front(); }
  const KnowledgeNode* find(std::string_view name) const;
  /// Throws NotFoundError.
  const KnowledgeNode& at(std::string_view name) const;
  bool contains(std::string_view name) const { return find(name) != nullptr; }
  bool is_leaf(std::string_view name) const;

  std::size_t size() const { return nodes_.size(); }
  /// Pre-order, children in file order.
  std::span<const KnowledgeNode> nodes() const { return nodes_; }

  std::vector<std::string> leaves() const { return subtree_points(root().name); }

  /// Leaves below `name` in depth-first child order; a leaf yields itself.
  std::vector<std::string> subtree_points(std::string_view name) const;

  /// Leaves whose names have two or more words, as space-separated phrases,
  /// for multi-word term merging.
  std::vector<std::string> multiword_phrases() const;

  std::string display_name(std::string_view name) const;

 private:
  std::vector<KnowledgeNode> nodes_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Reads either format, chosen by the first non-blank character: `{` or `[`
/// selects nested JSON records, anything else the indented text form.
///
/// Indented form: one node per line, children indented deeper than their
/// parent, branch lines end with `:`. Blank lines and `#` comments skipped.
///
/// JSON form: {"name": "...", "children": [...]} recursively; a node with a
/// "children" key (or "kind": "branch") is a branch.
KnowledgeTree load_tree(std::istream& in);
KnowledgeTree parse_tree(std::string_view text);
KnowledgeTree load_tree_file(const std::string& path);

}  // namespace kmodel
