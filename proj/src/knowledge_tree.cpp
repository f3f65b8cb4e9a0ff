#include "kmodel/knowledge_tree.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "kmodel/error.hpp"
#include "kmodel/text.hpp"

namespace kmodel {

KnowledgeTree KnowledgeTree::build(std::span<const Draft> drafts) {
  if (drafts.empty()) throw ValidationError("knowledge tree is empty");

  std::vector<std::string> names;
  names.reserve(drafts.size());
  std::unordered_map<std::string, std::size_t> first_seen;
  std::vector<std::vector<std::size_t>> children(drafts.size());
  std::ptrdiff_t root = -1;

  for (std::size_t i = 0; i < drafts.size(); ++i) {
    const auto& d = drafts[i];
    auto name = normalize_name(d.display_name);
    if (name.empty()) {
      throw ValidationError(
          fmt::format("node '{}' has an empty normalized name", d.display_name));
    }
    if (const auto it = first_seen.find(name); it != first_seen.end()) {
      for (auto p = d.parent; p >= 0; p = drafts[p].parent) {
        if (static_cast<std::size_t>(p) == it->second) {
          throw ValidationError(
              fmt::format("cycle: node '{}' appears below itself", name));
        }
      }
      throw ValidationError(fmt::format("duplicate node name '{}'", name));
    }
    first_seen.emplace(name, i);
    names.push_back(std::move(name));
    if (d.parent < 0) {
      if (root >= 0) {
        throw ValidationError(fmt::format(
            "multiple roots: '{}' and '{}'", names[root], names.back()));
      }
      root = static_cast<std::ptrdiff_t>(i);
    } else {
      if (static_cast<std::size_t>(d.parent) >= i) {
        throw ValidationError(
            fmt::format("node '{}' precedes its parent", names.back()));
      }
      if (drafts[d.parent].kind == NodeKind::Leaf) {
        throw ValidationError(fmt::format("leaf '{}' has child '{}'",
                                          names[d.parent], names.back()));
      }
      children[d.parent].push_back(i);
    }
  }
  for (std::size_t i = 0; i < drafts.size(); ++i) {
    if (drafts[i].kind == NodeKind::Branch && children[i].empty()) {
      throw ValidationError(fmt::format("branch '{}' has no children", names[i]));
    }
  }

  KnowledgeTree tree;
  tree.nodes_.reserve(drafts.size());
  // Pre-order from the root so nodes() is in DFS order.
  std::vector<std::size_t> stack{static_cast<std::size_t>(root)};
  while (!stack.empty()) {
    const auto i = stack.back();
    stack.pop_back();
    KnowledgeNode node;
    node.name = names[i];
    node.display_name = std::string(trim(drafts[i].display_name));
    node.kind = drafts[i].kind;
    if (drafts[i].parent >= 0) node.parent = names[drafts[i].parent];
    for (auto c : children[i]) node.children.push_back(names[c]);
    for (auto it = children[i].rbegin(); it != children[i].rend(); ++it) {
      stack.push_back(*it);
    }
    tree.index_.emplace(node.name, tree.nodes_.size());
    tree.nodes_.push_back(std::move(node));
  }
  return tree;
}

const KnowledgeNode* KnowledgeTree::find(std::string_view name) const {
  const auto it = index_.find(normalize_name(name));
  return it == index_.end() ? nullptr : &nodes_[it->second];
}

const KnowledgeNode& KnowledgeTree::at(std::string_view name) const {
  if (const auto* node = find(name)) return *node;
  throw NotFoundError(fmt::format("unknown knowledge tree node '{}'", name));
}

bool KnowledgeTree::is_leaf(std::string_view name) const {
  const auto* node = find(name);
  return node != nullptr && node->kind == NodeKind::Leaf;
}

std::vector<std::string> KnowledgeTree::subtree_points(
    std::string_view name) const {
  std::vector<std::string> out;
  std::vector<const KnowledgeNode*> stack{&at(name)};
  while (!stack.empty()) {
    const auto* node = stack.back();
    stack.pop_back();
    if (node->kind == NodeKind::Leaf) {
      out.push_back(node->name);
      continue;
    }
    for (auto it = node->children.rbegin(); it != node->children.rend(); ++it) {
      stack.push_back(&nodes_[index_.at(*it)]);
    }
  }
  return out;
}

std::vector<std::string> KnowledgeTree::multiword_phrases() const {
  std::vector<std::string> out;
  for (const auto& node : nodes_) {
    if (node.kind != NodeKind::Leaf) continue;
    const auto words = name_words(node.name);
    if (words.size() < 2) continue;
    std::string phrase = words.front();
    for (std::size_t i = 1; i < words.size(); ++i) phrase += " " + words[i];
    out.push_back(std::move(phrase));
  }
  return out;
}

std::string KnowledgeTree::display_name(std::string_view name) const {
  const auto* node = find(name);
  return node ? node->display_name : std::string(name);
}

namespace {

std::vector<KnowledgeTree::Draft> parse_indented(std::string_view text) {
  std::vector<KnowledgeTree::Draft> drafts;
  // (indent, draft index) of the open ancestors.
  std::vector<std::pair<std::size_t, std::size_t>> stack;
  std::size_t line_no = 0;
  for (auto raw : split(text, '\n')) {
    ++line_no;
    if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);
    const auto body = trim(raw);
    if (body.empty() || body.front() == '#') continue;
    const auto indent = raw.find_first_not_of(" \t");
    while (!stack.empty() && stack.back().first >= indent) stack.pop_back();
    KnowledgeTree::Draft draft{std::string(body), NodeKind::Leaf, -1};
    if (body.back() == ':') {
      draft.kind = NodeKind::Branch;
      draft.display_name = std::string(trim(body.substr(0, body.size() - 1)));
    }
    if (draft.display_name.empty()) throw ParseError("empty node name", line_no);
    if (!stack.empty()) {
      draft.parent = static_cast<std::ptrdiff_t>(stack.back().second);
    }
    stack.emplace_back(indent, drafts.size());
    drafts.push_back(std::move(draft));
  }
  return drafts;
}

void collect_json(const nlohmann::json& node, std::ptrdiff_t parent,
                  std::vector<KnowledgeTree::Draft>& drafts) {
  if (!node.is_object() || !node.contains("name") ||
      !node["name"].is_string()) {
    throw ParseError("every tree node must be an object with a string 'name'",
                     0);
  }
  KnowledgeTree::Draft draft{node["name"].get<std::string>(), NodeKind::Leaf,
                             parent};
  const bool has_children = node.contains("children");
  if (node.contains("kind")) {
    const auto kind = node["kind"].get<std::string>();
    if (kind == "branch") {
      draft.kind = NodeKind::Branch;
    } else if (kind != "leaf") {
      throw ParseError("node kind must be 'branch' or 'leaf'", 0);
    }
  } else if (has_children) {
    draft.kind = NodeKind::Branch;
  }
  const auto self = static_cast<std::ptrdiff_t>(drafts.size());
  drafts.push_back(std::move(draft));
  if (has_children) {
    if (!node["children"].is_array()) {
      throw ParseError("'children' must be an array", 0);
    }
    for (const auto& child : node["children"]) {
      collect_json(child, self, drafts);
    }
  }
}

std::vector<KnowledgeTree::Draft> parse_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("tree JSON: ") + e.what(), 0);
  }
  std::vector<KnowledgeTree::Draft> drafts;
  try {
    if (doc.is_array()) {
      for (const auto& root : doc) collect_json(root, -1, drafts);
    } else {
      collect_json(doc, -1, drafts);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("tree JSON: ") + e.what(), 0);
  }
  return drafts;
}

}  // namespace

KnowledgeTree parse_tree(std::string_view text) {
  const auto body = trim(text);
  if (!body.empty() && (body.front() == '{' || body.front() == '[')) {
    return KnowledgeTree::build(parse_json(body));
  }
  return KnowledgeTree::build(parse_indented(text));
}

KnowledgeTree load_tree(std::istream& in) {
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_tree(buffer.str());
}

KnowledgeTree load_tree_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw NotFoundError("cannot open tree file '" + path + "'");
  return load_tree(in);
}

}  // namespace kmodel
