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

#include "gcnn/grammar.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "gcnn/error.hpp"

namespace gcnn {

Grammar Grammar::from_parts(std::vector<SymbolInfo> symbols,
                            std::vector<GrammarRule> rules,
                            std::vector<std::string> scope_vocab,
                            int start_symbol) {
  Grammar g;
  g.symbols_ = std::move(symbols);
  g.rules_ = std::move(rules);
  g.scope_vocab_ = std::move(scope_vocab);
  g.start_ = start_symbol;

  const int n_symbols = static_cast<int>(g.symbols_.size());
  for (int i = 0; i < n_symbols; ++i) {
    const auto& name = g.symbols_[i].symbol.name;
    if (name.empty()) throw StructuralInputError("empty symbol name");
    if (!g.symbol_index_.emplace(name, i).second) {
      throw StructuralInputError("duplicate symbol '" + name + "'");
    }
  }
  if (n_symbols > 0 &&
      (g.start_ < 0 || g.start_ >= n_symbols ||
       g.symbols_[g.start_].symbol.kind != SymbolKind::nonterminal)) {
    throw StructuralInputError("start symbol must be a nonterminal");
  }

  g.lhs_index_.assign(n_symbols, {});
  g.copy_symbol_.assign(n_symbols, std::nullopt);
  auto valid = [&](int id) { return id >= 0 && id < n_symbols; };

  for (int i = 0; i < static_cast<int>(g.rules_.size()); ++i) {
    const auto& r = g.rules_[i];
    if (r.id != i) throw StructuralInputError("rule ids must be dense and ordered");
    if (!valid(r.lhs) || g.symbols_[r.lhs].symbol.kind != SymbolKind::nonterminal) {
      throw StructuralInputError("rule " + std::to_string(i) +
                                 ": lhs must be a nonterminal");
    }
    if (r.rhs.empty()) {
      throw StructuralInputError("rule " + std::to_string(i) + ": empty rhs");
    }
    bool has_terminal = false;
    for (int s : r.rhs) {
      if (!valid(s)) {
        throw StructuralInputError("rule " + std::to_string(i) +
                                   ": unknown rhs symbol");
      }
      has_terminal |= g.symbols_[s].symbol.kind == SymbolKind::terminal;
    }
    if (has_terminal && r.rhs.size() != 1) {
      throw StructuralInputError("rule " + std::to_string(i) +
                                 ": a terminal must be the only rhs symbol");
    }
    if (has_terminal != r.terminal_value.has_value()) {
      throw StructuralInputError(
          "rule " + std::to_string(i) +
          ": terminal value must be set exactly for terminal productions");
    }
    if (!g.rule_index_.emplace(RuleKey{r.lhs, r.rhs, r.terminal_value}, i).second) {
      throw StructuralInputError("duplicate rule " + std::to_string(i));
    }
    g.lhs_index_[r.lhs].push_back(i);
    if (r.terminal_value) {
      if (!g.copy_symbol_[r.lhs]) g.copy_symbol_[r.lhs] = r.rhs[0];
      if (g.terminal_index_.emplace(*r.terminal_value,
                                    static_cast<int>(g.terminal_values_.size()))
              .second) {
        g.terminal_values_.push_back(*r.terminal_value);
      }
    }
  }

  if (g.scope_vocab_.empty() || g.scope_vocab_[0] != kNoScope) {
    throw StructuralInputError("scope vocabulary must start with " +
                               std::string(kNoScope));
  }
  for (int i = 0; i < static_cast<int>(g.scope_vocab_.size()); ++i) {
    if (!g.scope_index_.emplace(g.scope_vocab_[i], i).second) {
      throw StructuralInputError("duplicate scope name '" + g.scope_vocab_[i] + "'");
    }
  }
  return g;
}

const Symbol& Grammar::symbol(int id) const {
  return symbols_.at(static_cast<std::size_t>(id)).symbol;
}

std::optional<int> Grammar::find_symbol(std::string_view name) const {
  auto it = symbol_index_.find(std::string(name));
  if (it == symbol_index_.end()) return std::nullopt;
  return it->second;
}

int Grammar::symbol_id(std::string_view name) const {
  auto id = find_symbol(name);
  if (!id) throw StructuralInputError("unknown symbol '" + std::string(name) + "'");
  return *id;
}

bool Grammar::introduces_scope(int symbol_id) const {
  return symbols_.at(static_cast<std::size_t>(symbol_id)).introduces_scope;
}

const GrammarRule& Grammar::rule(int id) const {
  return rules_.at(static_cast<std::size_t>(id));
}

std::span<const int> Grammar::rules_for(int symbol_id) const {
  return lhs_index_.at(static_cast<std::size_t>(symbol_id));
}

std::optional<int> Grammar::find_rule(
    int lhs, std::span<const int> rhs,
    const std::optional<std::string>& terminal) const {
  auto it = rule_index_.find(RuleKey{lhs, std::vector<int>(rhs.begin(), rhs.end()),
                                     terminal});
  if (it == rule_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<int> Grammar::copy_symbol(int lhs) const {
  return copy_symbol_.at(static_cast<std::size_t>(lhs));
}

int Grammar::scope_id(const std::optional<std::string>& name) const {
  if (!name) return 0;
  auto it = scope_index_.find(*name);
  return it == scope_index_.end() ? 0 : it->second;
}

std::optional<int> Grammar::terminal_index(std::string_view value) const {
  auto it = terminal_index_.find(std::string(value));
  if (it == terminal_index_.end()) return std::nullopt;
  return it->second;
}

std::string Grammar::describe_rule(int id) const {
  const auto& r = rule(id);
  std::ostringstream os;
  os << symbol(r.lhs).name << " ->";
  for (int s : r.rhs) os << ' ' << symbol(s).name;
  if (r.terminal_value) os << " [" << *r.terminal_value << ']';
  return os.str();
}

namespace {

class Inducer {
 public:
  void register_symbols(const AstNode& node, const std::string& tree,
                        const std::string& path) {
    const std::string where = tree + " at /" + path;
    if (node.symbol.name.empty()) {
      throw StructuralInputError(where + ": empty symbol name");
    }
    if (node.terminal && !node.children.empty()) {
      throw StructuralInputError(where + " (" + node.symbol.name +
                                 "): mixed terminal value and children");
    }
    if (node.terminal && node.symbol.kind != SymbolKind::terminal) {
      throw StructuralInputError(where + " (" + node.symbol.name +
                                 "): terminal value on a nonterminal symbol");
    }
    if (node.symbol.kind == SymbolKind::terminal && !node.terminal) {
      throw StructuralInputError(where + " (" + node.symbol.name +
                                 "): terminal symbol without a value");
    }
    if (node.symbol.kind == SymbolKind::nonterminal && node.children.empty()) {
      throw StructuralInputError(where + " (" + node.symbol.name +
                                 "): unexpanded nonterminal in a corpus tree");
    }
    if (node.scope && node.symbol.kind == SymbolKind::terminal) {
      throw StructuralInputError(where + " (" + node.symbol.name +
                                 "): scope name on a terminal");
    }

    auto [it, inserted] =
        index_.emplace(node.symbol.name, static_cast<int>(symbols_.size()));
    if (inserted) {
      symbols_.push_back(SymbolInfo{node.symbol, false});
    } else if (symbols_[it->second].symbol != node.symbol) {
      throw StructuralInputError(where + " (" + node.symbol.name +
                                 "): symbol redeclared with a different kind "
                                 "or node class");
    }
    if (node.scope) {
      symbols_[it->second].introduces_scope = true;
      if (scope_seen_.insert(*node.scope).second) scope_vocab_.push_back(*node.scope);
    }

    for (std::size_t i = 0; i < node.children.size(); ++i) {
      const auto& child = node.children[i];
      if (child.symbol.kind == SymbolKind::terminal && node.children.size() != 1) {
        throw StructuralInputError(where + (path.empty() ? "" : "/") +
                                   std::to_string(i) + " (" +
                                   child.symbol.name +
                                   "): a terminal leaf must be the only child");
      }
      register_symbols(child, tree,
                       path + (path.empty() ? "" : "/") + std::to_string(i));
    }
  }

  void collect_rules(const AstNode& node) {
    if (node.symbol.kind == SymbolKind::terminal) return;
    const int lhs = index_.at(node.symbol.name);
    std::vector<int> rhs;
    rhs.reserve(node.children.size());
    for (const auto& c : node.children) rhs.push_back(index_.at(c.symbol.name));
    std::optional<std::string> value;
    if (node.children.size() == 1 && node.children[0].terminal) {
      value = node.children[0].terminal;
      terminal_producing_.insert(lhs);
    }
    auto key = std::make_tuple(lhs, rhs, value);
    if (seen_.insert(key).second) {
      GrammarRule r;
      r.id = static_cast<int>(rules_.size());
      r.lhs = lhs;
      r.rhs = std::move(rhs);
      r.terminal_value = std::move(value);
      rules_.push_back(std::move(r));
    }
    for (const auto& c : node.children) collect_rules(c);
  }

  void check_node_classes() const {
    for (int i = 0; i < static_cast<int>(symbols_.size()); ++i) {
      const auto& s = symbols_[i].symbol;
      const bool produces_terminal = terminal_producing_.count(i) > 0;
      const bool structural = s.node_class == NodeClass::structural;
      if (produces_terminal && structural) {
        throw StructuralInputError("symbol '" + s.name +
                                   "' produces terminals but is classed "
                                   "structural (expected variable or "
                                   "function_name)");
      }
      if (!produces_terminal && !structural) {
        throw StructuralInputError("symbol '" + s.name + "' is classed " +
                                   std::string(to_string(s.node_class)) +
                                   " but never produces a terminal");
      }
    }
  }

  Grammar finish(int start) {
    check_node_classes();
    return Grammar::from_parts(std::move(symbols_), std::move(rules_),
                               std::move(scope_vocab_), start);
  }

  int id_of(const std::string& name) const { return index_.at(name); }

 private:
  std::vector<SymbolInfo> symbols_;
  std::unordered_map<std::string, int> index_;
  std::vector<GrammarRule> rules_;
  std::set<std::tuple<int, std::vector<int>, std::optional<std::string>>> seen_;
  std::set<int> terminal_producing_;
  std::vector<std::string> scope_vocab_{std::string(Grammar::kNoScope)};
  std::set<std::string> scope_seen_{std::string(Grammar::kNoScope)};
};

}  // namespace

Grammar induce_grammar(std::span<const AstNode> corpus) {
  if (corpus.empty()) throw StructuralInputError("empty corpus");
  Inducer inducer;
  for (std::size_t t = 0; t < corpus.size(); ++t) {
    if (corpus[t].symbol.kind != SymbolKind::nonterminal) {
      throw StructuralInputError("tree " + std::to_string(t) +
                                 ": root must be a nonterminal");
    }
    inducer.register_symbols(corpus[t], "tree " + std::to_string(t), "");
  }
  for (const auto& tree : corpus) inducer.collect_rules(tree);
  const int start = inducer.id_of(corpus.front().symbol.name);
  return inducer.finish(start);
}

std::vector<bool> valid_rule_mask(const Grammar& g, int symbol_id) {
  if (g.symbol(symbol_id).kind != SymbolKind::nonterminal) {
    throw InputError("rule mask requested for terminal '" +
                     g.symbol(symbol_id).name + "'");
  }
  auto ids = g.rules_for(symbol_id);
  if (ids.empty()) {
    throw UncoverableSymbolError("no rule expands '" + g.symbol(symbol_id).name + "'");
  }
  std::vector<bool> mask(static_cast<std::size_t>(g.rule_count()), false);
  for (int id : ids) mask[static_cast<std::size_t>(id)] = true;
  return mask;
}

}  // namespace gcnn
