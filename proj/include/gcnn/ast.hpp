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

#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gcnn/ast_node.hpp"
#include "gcnn/grammar.hpp"

namespace gcnn {

// Child indices from the root.
using NodePath = std::vector<int>;

std::string path_string(const NodePath& path);

// First unexpanded nonterminal in depth-first pre-order.
std::optional<NodePath> find_frontier(const AstNode& root);

// A derivation in progress. The frontier is always the leftmost unexpanded
// nonterminal; none means the tree is complete.
class PartialAst {
 public:
  // Root-only tree.
  explicit PartialAst(Symbol root_symbol);
  // Wraps an existing tree and computes its frontier.
  static PartialAst from_tree(AstNode root);

  const AstNode& root() const { return root_; }
  const std::optional<NodePath>& frontier() const { return frontier_; }
  // nullptr when complete.
  const AstNode* frontier_node() const;
  bool complete() const { return !frontier_.has_value(); }

  const AstNode& at(const NodePath& path) const;

  bool operator==(const PartialAst&) const = default;

 private:
  PartialAst() = default;

  AstNode root_;
  std::optional<NodePath> frontier_;

  friend PartialAst apply_rule(const Grammar&, const PartialAst&,
                               const GrammarRule&);
  friend PartialAst apply_terminal(const Grammar&, const PartialAst&, int,
                                   std::string);
};

// Expands the frontier with the rule's rhs. The input is not modified.
// When a function-name node receives its value, the nearest enclosing
// scope-introducing ancestor without a scope name takes that value as its
// scope name.
PartialAst apply_rule(const Grammar& g, const PartialAst& t,
                      const GrammarRule& rule);

// Expands the frontier with a single terminal leaf of the given symbol and
// value, whether or not the grammar has a rule for it (slot copying).
PartialAst apply_terminal(const Grammar& g, const PartialAst& t,
                          int terminal_symbol, std::string value);

// Leftmost derivation of a complete tree. Throws MissingRuleError naming the
// (lhs, rhs) pair that has no rule.
std::vector<int> encode_to_rules(const AstNode& tree, const Grammar& g);

AstNode decode_from_rules(std::span<const int> rules, const Grammar& g,
                          int start_symbol);

// Flattened pre-order view of a partial tree, optionally with the
// placeholder node inserted as the next sibling of the frontier.
struct TreeView {
  struct Entry {
    const AstNode* node = nullptr;  // nullptr for the placeholder
    int parent = -1;
    int depth = 0;
  };

  std::vector<Entry> entries;
  int frontier = -1;
  int placeholder = -1;

  bool is_placeholder(int i) const { return entries[i].node == nullptr; }
  std::size_t size() const { return entries.size(); }
};

// The view points into t, which must outlive it.
TreeView flatten(const PartialAst& t, bool with_placeholder);
TreeView flatten(PartialAst&& t, bool with_placeholder) = delete;

enum class UnitFlag { visit, backtrack };

struct TraversalUnit {
  int node = 0;  // index into TreeView::entries
  UnitFlag flag = UnitFlag::visit;

  bool operator==(const TraversalUnit&) const = default;
};

struct Traversal {
  TreeView view;
  std::vector<TraversalUnit> units;
};

// Pre-order traversal where every node is emitted on entry and again after
// its last descendant. Throws CompleteTreeError when a placeholder is
// requested for a complete tree.
Traversal preorder_with_backtrack(const PartialAst& t, bool with_placeholder);
Traversal preorder_with_backtrack(PartialAst&& t, bool with_placeholder) = delete;

// Nodes from the root to the frontier, inclusive.
std::vector<const AstNode*> root_path(const PartialAst& t);

inline constexpr int kPadNode = -1;

// (node, parent, grandparent) as view indices; kPadNode for missing ancestors.
std::array<int, 3> context_triple(const TreeView& view, int node);

// Scope name of the closest scoped ancestor of the frontier, frontier
// included.
std::optional<std::string> nearest_scope(const PartialAst& t);

}  // namespace gcnn
