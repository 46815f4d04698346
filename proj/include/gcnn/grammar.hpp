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

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "gcnn/ast_node.hpp"

namespace gcnn {

// One production lhs -> rhs. Symbols are referenced by their id in the
// owning Grammar's symbol table.
struct GrammarRule {
  int id = 0;
  int lhs = 0;
  std::vector<int> rhs;
  // Set iff rhs is a single terminal symbol.
  std::optional<std::string> terminal_value;

  bool operator==(const GrammarRule&) const = default;
};

struct SymbolInfo {
  Symbol symbol;
  // Nodes of this symbol carry a scope name (function/method definitions).
  bool introduces_scope = false;

  bool operator==(const SymbolInfo&) const = default;
};

// Immutable rule inventory. Rule ids are dense and each rule is one class of
// the decoder's prediction alphabet.
class Grammar {
 public:
  static constexpr std::string_view kNoScope = "<none>";

  Grammar() = default;

  // Validates and indexes the parts. scope_vocab must start with kNoScope.
  static Grammar from_parts(std::vector<SymbolInfo> symbols,
                            std::vector<GrammarRule> rules,
                            std::vector<std::string> scope_vocab,
                            int start_symbol);

  const std::vector<SymbolInfo>& symbols() const { return symbols_; }
  const Symbol& symbol(int id) const;
  std::optional<int> find_symbol(std::string_view name) const;
  // Throws StructuralInputError when the name is unknown.
  int symbol_id(std::string_view name) const;
  bool introduces_scope(int symbol_id) const;

  const std::vector<GrammarRule>& rules() const { return rules_; }
  const GrammarRule& rule(int id) const;
  int rule_count() const { return static_cast<int>(rules_.size()); }

  // Rule ids whose lhs is the symbol, ascending.
  std::span<const int> rules_for(int symbol_id) const;
  std::optional<int> find_rule(int lhs, std::span<const int> rhs,
                               const std::optional<std::string>& terminal) const;

  // Terminal symbol used when a value is emitted for lhs by slot copying:
  // the terminal of lhs's first terminal-production rule.
  std::optional<int> copy_symbol(int lhs) const;

  // Index 0 is kNoScope.
  const std::vector<std::string>& scope_vocab() const { return scope_vocab_; }
  // 0 (no scope) for names outside the vocabulary.
  int scope_id(const std::optional<std::string>& name) const;

  // Distinct terminal values in rule-id order.
  const std::vector<std::string>& terminal_values() const {
    return terminal_values_;
  }
  std::optional<int> terminal_index(std::string_view value) const;

  int start_symbol() const { return start_; }

  std::string describe_rule(int id) const;

  bool operator==(const Grammar& other) const {
    return symbols_ == other.symbols_ && rules_ == other.rules_ &&
           scope_vocab_ == other.scope_vocab_ && start_ == other.start_;
  }

 private:
  using RuleKey = std::tuple<int, std::vector<int>, std::optional<std::string>>;

  std::vector<SymbolInfo> symbols_;
  std::vector<GrammarRule> rules_;
  std::vector<std::string> scope_vocab_{std::string(kNoScope)};
  int start_ = 0;

  std::unordered_map<std::string, int> symbol_index_;
  std::vector<std::vector<int>> lhs_index_;
  std::map<RuleKey, int> rule_index_;
  std::vector<std::optional<int>> copy_symbol_;
  std::vector<std::string> terminal_values_;
  std::unordered_map<std::string, int> terminal_index_;
  std::unordered_map<std::string, int> scope_index_;
};

// Builds the grammar from complete trees. Rule ids follow first occurrence in
// a pre-order sweep over the corpus in input order. Throws
// StructuralInputError naming the offending node path.
Grammar induce_grammar(std::span<const AstNode> corpus);

// mask[i] is true iff rule i expands the symbol. Throws
// UncoverableSymbolError when nothing does.
std::vector<bool> valid_rule_mask(const Grammar& g, int symbol_id);

}  // namespace gcnn
