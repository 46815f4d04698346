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

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gcnn {

enum class SymbolKind { nonterminal, terminal };

// Selects the predictor head for a frontier node.
enum class NodeClass { structural, variable, function_name };

std::string_view to_string(SymbolKind kind);
std::string_view to_string(NodeClass cls);
SymbolKind parse_symbol_kind(std::string_view text);
NodeClass parse_node_class(std::string_view text);

struct Symbol {
  std::string name;
  SymbolKind kind = SymbolKind::nonterminal;
  NodeClass node_class = NodeClass::structural;

  bool operator==(const Symbol&) const = default;
};

// A node of a (possibly partial) abstract syntax tree. Terminal nodes carry a
// value and no children; a nonterminal with no children is unexpanded.
struct AstNode {
  Symbol symbol;
  std::optional<std::string> terminal;
  // Set on scope-introducing nodes (function or method definitions).
  std::optional<std::string> scope;
  std::vector<AstNode> children;

  bool is_terminal() const { return symbol.kind == SymbolKind::terminal; }
  bool is_unexpanded() const {
    return symbol.kind == SymbolKind::nonterminal && children.empty();
  }

  // Exact equality, scope metadata included.
  bool operator==(const AstNode&) const = default;
};

// Equality on symbols, terminal values and shape; scope names are ignored.
bool same_structure(const AstNode& a, const AstNode& b);

std::size_t node_count(const AstNode& root);

// In-order terminal values.
std::vector<std::string> token_yield(const AstNode& root);

AstNode make_nonterminal(std::string name, NodeClass cls,
                         std::vector<AstNode> children = {});
AstNode make_terminal(std::string name, std::string value);

}  // namespace gcnn
