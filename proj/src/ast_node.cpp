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

#include "gcnn/ast_node.hpp"

#include "gcnn/error.hpp"

namespace gcnn {

std::string_view to_string(SymbolKind kind) {
  return kind == SymbolKind::terminal ? "terminal" : "nonterminal";
}

std::string_view to_string(NodeClass cls) {
  switch (cls) {
    case NodeClass::structural:
      return "structural";
    case NodeClass::variable:
      return "variable";
    case NodeClass::function_name:
      return "function_name";
  }
  return "structural";
}

SymbolKind parse_symbol_kind(std::string_view text) {
  if (text == "nonterminal") return SymbolKind::nonterminal;
  if (text == "terminal") return SymbolKind::terminal;
  throw StructuralInputError("unknown symbol kind '" + std::string(text) + "'");
}

NodeClass parse_node_class(std::string_view text) {
  if (text == "structural") return NodeClass::structural;
  if (text == "variable") return NodeClass::variable;
  if (text == "function_name") return NodeClass::function_name;
  throw StructuralInputError("unknown node class '" + std::string(text) + "'");
}

bool same_structure(const AstNode& a, const AstNode& b) {
  if (a.symbol != b.symbol || a.terminal != b.terminal ||
      a.children.size() != b.children.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.children.size(); ++i) {
    if (!same_structure(a.children[i], b.children[i])) return false;
  }
  return true;
}

std::size_t node_count(const AstNode& root) {
  std::size_t n = 1;
  for (const auto& c : root.children) n += node_count(c);
  return n;
}

namespace {

void collect_yield(const AstNode& node, std::vector<std::string>& out) {
  if (node.terminal) out.push_back(*node.terminal);
  for (const auto& c : node.children) collect_yield(c, out);
}

}  // namespace

std::vector<std::string> token_yield(const AstNode& root) {
  std::vector<std::string> out;
  collect_yield(root, out);
  return out;
}

AstNode make_nonterminal(std::string name, NodeClass cls,
                         std::vector<AstNode> children) {
  AstNode n;
  n.symbol = Symbol{std::move(name), SymbolKind::nonterminal, cls};
  n.children = std::move(children);
  return n;
}

AstNode make_terminal(std::string name, std::string value) {
  AstNode n;
  n.symbol = Symbol{std::move(name), SymbolKind::terminal, NodeClass::structural};
  n.terminal = std::move(value);
  return n;
}

}  // namespace gcnn
