// Copyright 2026 The gcnn Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "gcnn/ast.hpp"

#include "gcnn/error.hpp"

namespace gcnn {

std::string path_string(const NodePath& path) {
  std::string s = "/";
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (i) s += '/';
    s += std::to_string(path[i]);
  }
  return s;
}

namespace {

bool first_unexpanded(const AstNode& node, NodePath& path) {
  if (node.is_unexpanded()) return true;
  for (std::size_t i = 0; i < node.children.size(); ++i) {
    path.push_back(static_cast<int>(i));
    if (first_unexpanded(node.children[i], path)) return true;
    path.pop_back();
  }
  return false;
}

AstNode& mutable_at(AstNode& root, const NodePath& path) {
  AstNode* node = &root;
  for (int i : path) node = &node->children.at(static_cast<std::size_t>(i));
  return *node;
}

const AstNode& node_at(const AstNode& root, const NodePath& path) {
  const AstNode* node = &root;
  for (int i : path) node = &node->children.at(static_cast<std::size_t>(i));
  return *node;
}

// Frontier after the node at `expanded` received its children. Everything
// before `expanded` in pre-order is already expanded, so the search starts
// there.
std::optional<NodePath> advance_frontier(const AstNode& root, NodePath expanded) {
  const AstNode& node = node_at(root, expanded);
  NodePath path = expanded;
  for (std::size_t i = 0; i < node.children.size(); ++i) {
    path.push_back(static_cast<int>(i));
    if (first_unexpanded(node.children[i], path)) return path;
    path.pop_back();
  }
  NodePath cursor = std::move(expanded);
  while (!cursor.empty()) {
    const int idx = cursor.back();
    cursor.pop_back();
    const AstNode& parent = node_at(root, cursor);
    for (std::size_t j = static_cast<std::size_t>(idx) + 1; j < parent.children.size();
         ++j) {
      NodePath candidate = cursor;
      candidate.push_back(static_cast<int>(j));
      if (first_unexpanded(parent.children[j], candidate)) return candidate;
    }
  }
  return std::nullopt;
}

void assign_scope(const Grammar& g, AstNode& root, const NodePath& frontier,
                  const std::string& value) {
  for (std::size_t k = frontier.size(); k-- > 0;) {
    NodePath prefix(frontier.begin(), frontier.begin() + static_cast<long>(k));
    AstNode& ancestor = mutable_at(root, prefix);
    auto id = g.find_symbol(ancestor.symbol.name);
    if (id && g.introduces_scope(*id)) {
      if (!ancestor.scope) ancestor.scope = value;
      return;
    }
  }
}

}  // namespace

std::optional<NodePath> find_frontier(const AstNode& root) {
  NodePath path;
  if (first_unexpanded(root, path)) return path;
  return std::nullopt;
}

PartialAst::PartialAst(Symbol root_symbol) {
  if (root_symbol.kind != SymbolKind::nonterminal) {
    throw InputError("derivations start from a nonterminal, got '" +
                     root_symbol.name + "'");
  }
  root_.symbol = std::move(root_symbol);
  frontier_ = NodePath{};
}

PartialAst PartialAst::from_tree(AstNode root) {
  PartialAst t;
  t.root_ = std::move(root);
  t.frontier_ = find_frontier(t.root_);
  return t;
}

const AstNode* PartialAst::frontier_node() const {
  if (!frontier_) return nullptr;
  return &at(*frontier_);
}

const AstNode& PartialAst::at(const NodePath& path) const {
  return node_at(root_, path);
}

PartialAst apply_rule(const Grammar& g, const PartialAst& t, const GrammarRule& rule) {
  if (t.complete()) throw CompleteTreeError("cannot apply a rule to a complete tree");
  const AstNode& target = *t.frontier_node();
  const Symbol& lhs = g.symbol(rule.lhs);
  if (target.symbol.name != lhs.name) {
    throw IllegalApplicationError("rule " + g.describe_rule(rule.id) +
                                  " cannot expand frontier '" +
                                  target.symbol.name + "' at " +
                                  path_string(*t.frontier()));
  }

  PartialAst out = t;
  const NodePath at = *t.frontier();
  AstNode& node = mutable_at(out.root_, at);
  node.children.reserve(rule.rhs.size());
  for (int s : rule.rhs) {
    AstNode child;
    child.symbol = g.symbol(s);
    if (child.symbol.kind == SymbolKind::terminal) child.terminal = rule.terminal_value;
    node.children.push_back(std::move(child));
  }
  if (rule.terminal_value && node.symbol.node_class == NodeClass::function_name) {
    assign_scope(g, out.root_, at, *rule.terminal_value);
  }
  out.frontier_ = advance_frontier(out.root_, at);
  return out;
}

PartialAst apply_terminal(const Grammar& g, const PartialAst& t, int terminal_symbol,
                          std::string value) {
  if (t.complete()) throw CompleteTreeError("cannot emit a terminal into a complete tree");
  const Symbol& sym = g.symbol(terminal_symbol);
  if (sym.kind != SymbolKind::terminal) {
    throw IllegalApplicationError("'" + sym.name + "' is not a terminal symbol");
  }
  PartialAst out = t;
  const NodePath at = *t.frontier();
  AstNode& node = mutable_at(out.root_, at);
  AstNode child;
  child.symbol = sym;
  child.terminal = value;
  node.children.push_back(std::move(child));
  if (node.symbol.node_class == NodeClass::function_name) {
    assign_scope(g, out.root_, at, value);
  }
  out.frontier_ = advance_frontier(out.root_, at);
  return out;
}

namespace {

void encode_node(const AstNode& node, const Grammar& g, std::vector<int>& out,
                 NodePath& path) {
  if (node.symbol.kind == SymbolKind::terminal) return;
  if (node.children.empty()) {
    throw StructuralInputError("unexpanded nonterminal '" + node.symbol.name +
                               "' at " + path_string(path));
  }
  std::string rhs_text;
  std::vector<int> rhs;
  bool known = true;
  for (const auto& c : node.children) {
    rhs_text += ' ' + c.symbol.name;
    auto id = g.find_symbol(c.symbol.name);
    if (!id) {
      known = false;
      continue;
    }
    rhs.push_back(*id);
  }
  std::optional<std::string> value;
  if (node.children.size() == 1 && node.children[0].terminal) {
    value = node.children[0].terminal;
    rhs_text += " [" + *value + "]";
  }
  auto lhs = g.find_symbol(node.symbol.name);
  std::optional<int> rule;
  if (known && lhs) rule = g.find_rule(*lhs, rhs, value);
  if (!rule) {
    throw MissingRuleError("no rule (" + node.symbol.name + " ->" + rhs_text +
                           ") at " + path_string(path));
  }
  out.push_back(*rule);
  for (std::size_t i = 0; i < node.children.size(); ++i) {
    path.push_back(static_cast<int>(i));
    encode_node(node.children[i], g, out, path);
    path.pop_back();
  }
}

}  // namespace

std::vector<int> encode_to_rules(const AstNode& tree, const Grammar& g) {
  std::vector<int> out;
  NodePath path;
  encode_node(tree, g, out, path);
  return out;
}

AstNode decode_from_rules(std::span<const int> rules, const Grammar& g,
                          int start_symbol) {
  if (g.symbol(start_symbol).kind != SymbolKind::nonterminal) {
    throw InputError("start symbol '" + g.symbol(start_symbol).name + "' is not a nonterminal");
  }
  PartialAst t(g.symbol(start_symbol));
  for (std::size_t i = 0; i < rules.size(); ++i) {
    if (t.complete()) {
      throw OverlongDerivationError("derivation complete after " + std::to_string(i) +
                                    " of " + std::to_string(rules.size()) + " rules");
    }
    if (rules[i] < 0 || rules[i] >= g.rule_count()) {
      throw InputError("rule id " + std::to_string(rules[i]) + " out of range");
    }
    t = apply_rule(g, t, g.rule(rules[i]));
  }
  if (!t.complete()) {
    throw IncompleteDerivationError("derivation ends with frontier at " +
                                    path_string(*t.frontier()));
  }
  return t.root();
}

namespace {

void flatten_node(const AstNode& node, int parent, int depth, const AstNode* frontier,
                  bool with_placeholder, TreeView& view) {
  const int self = static_cast<int>(view.entries.size());
  view.entries.push_back({&node, parent, depth});
  if (&node == frontier) {
    view.frontier = self;
    if (with_placeholder) {
      view.placeholder = static_cast<int>(view.entries.size());
      view.entries.push_back({nullptr, parent, depth});
    }
  }
  for (const auto& c : node.children) {
    flatten_node(c, self, depth + 1, frontier, with_placeholder, view);
  }
}

}  // namespace

TreeView flatten(const PartialAst& t, bool with_placeholder) {
  if (with_placeholder && t.complete()) {
    throw CompleteTreeError("placeholder requested for a complete tree");
  }
  TreeView view;
  flatten_node(t.root(), -1, 0, t.frontier_node(), with_placeholder, view);
  return view;
}

Traversal preorder_with_backtrack(const PartialAst& t, bool with_placeholder) {
  Traversal out;
  out.view = flatten(t, with_placeholder);
  const auto& entries = out.view.entries;
  out.units.reserve(entries.size() * 2);
  std::vector<int> open;
  for (int i = 0; i < static_cast<int>(entries.size()); ++i) {
    while (!open.empty() && open.back() != entries[i].parent) {
      out.units.push_back({open.back(), UnitFlag::backtrack});
      open.pop_back();
    }
    out.units.push_back({i, UnitFlag::visit});
    open.push_back(i);
  }
  while (!open.empty()) {
    out.units.push_back({open.back(), UnitFlag::backtrack});
    open.pop_back();
  }
  return out;
}

std::vector<const AstNode*> root_path(const PartialAst& t) {
  if (t.complete()) throw CompleteTreeError("root path needs a frontier");
  std::vector<const AstNode*> path;
  const AstNode* node = &t.root();
  path.push_back(node);
  for (int i : *t.frontier()) {
    node = &node->children[static_cast<std::size_t>(i)];
    path.push_back(node);
  }
  return path;
}

std::array<int, 3> context_triple(const TreeView& view, int node) {
  const int parent = view.entries.at(static_cast<std::size_t>(node)).parent;
  const int grandparent =
      parent == kPadNode ? kPadNode : view.entries[static_cast<std::size_t>(parent)].parent;
  return {node, parent, grandparent};
}

std::optional<std::string> nearest_scope(const PartialAst& t) {
  if (t.complete()) return std::nullopt;
  std::vector<const AstNode*> chain = root_path(t);
  for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
    if ((*it)->scope) return (*it)->scope;
  }
  return std::nullopt;
}

}  // namespace gcnn
