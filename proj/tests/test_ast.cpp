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


#include <doctest.h>

#include <random>
#include <sstream>

#include "gcnn/ast.hpp"
#include "gcnn/error.hpp"
#include "gcnn/grammar.hpp"
#include "gcnn/io.hpp"
#include "support.hpp"

using namespace gcnn;
using namespace gcnn::testing;

namespace {

// Ancestors of the first unexpanded nonterminal, found by a plain recursive
// search that keeps its own chain.
bool chain_to_frontier(const AstNode& n, std::vector<const AstNode*>& chain) {
  chain.push_back(&n);
  if (n.symbol.kind == SymbolKind::nonterminal && n.children.empty()) return true;
  for (const auto& c : n.children) {
    if (chain_to_frontier(c, chain)) return true;
  }
  chain.pop_back();
  return false;
}

std::optional<std::string> scan_scope(const std::vector<const AstNode*>& chain) {
  for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
    if ((*it)->scope) return (*it)->scope;
  }
  return std::nullopt;
}

std::size_t internal_nodes(const AstNode& n) {
  if (n.symbol.kind == SymbolKind::terminal) return 0;
  std::size_t k = 1;
  for (const auto& c : n.children) k += internal_nodes(c);
  return k;
}

}  // namespace

TEST_CASE("single terminal production encodes to one rule") {
  AstNode t = make_nonterminal("Var", NodeClass::variable, {make_terminal("identifier", "x")});
  std::vector<AstNode> corpus{t};
  Grammar g = induce_grammar(corpus);
  auto rules = encode_to_rules(t, g);
  CHECK(rules.size() == 1);
  CHECK(decode_from_rules(rules, g, g.start_symbol()) == t);
}

TEST_CASE("init(a) derivation has one rule per internal node") {
  AstNode call = make_nonterminal(
      "Call", NodeClass::structural,
      {make_nonterminal("FuncName", NodeClass::function_name, {make_terminal("name", "init")}),
       make_nonterminal("Arguments", NodeClass::structural,
                        {make_nonterminal("Var", NodeClass::variable,
                                          {make_terminal("identifier", "a")})})});
  AstNode t = make_nonterminal(
      "Module", NodeClass::structural,
      {make_nonterminal("Expr", NodeClass::structural, {call})});
  std::vector<AstNode> corpus{t};
  Grammar g = induce_grammar(corpus);
  auto rules = encode_to_rules(t, g);
  CHECK(rules.size() == internal_nodes(t));
  CHECK(rules.size() == 6);
  CHECK(decode_from_rules(rules, g, g.start_symbol()) == t);
}

TEST_CASE("fixture trees round-trip through the rule codec") {
  auto trees = testing::fixture_trees();
  Grammar g = induce_grammar(trees);
  for (const auto& t : trees) {
    auto rules = encode_to_rules(t, g);
    CHECK(rules.size() == internal_nodes(t));
    CHECK(decode_from_rules(rules, g, g.start_symbol()) == t);
  }
}

TEST_CASE("decode errors") {
  auto trees = testing::fixture_trees();
  Grammar g = induce_grammar(trees);
  auto rules = encode_to_rules(trees[2], g);

  const int terminal = g.symbol_id("identifier");
  CHECK_THROWS_AS(decode_from_rules({}, g, terminal), InputError);

  std::vector<int> prefix(rules.begin(), rules.end() - 1);
  CHECK_THROWS_AS(decode_from_rules(prefix, g, g.start_symbol()), IncompleteDerivationError);

  std::vector<int> longer = rules;
  longer.push_back(rules.front());
  CHECK_THROWS_AS(decode_from_rules(longer, g, g.start_symbol()), OverlongDerivationError);

  std::vector<int> wrong = rules;
  wrong[1] = rules[0];
  CHECK_THROWS_AS(decode_from_rules(wrong, g, g.start_symbol()), IllegalApplicationError);
}

TEST_CASE("missing rule names the construct") {
  auto trees = testing::fixture_trees();
  Grammar g = induce_grammar(trees);
  AstNode t = trees[0];
  t.children[0].children[0].children[0].terminal = "unseen";
  try {
    encode_to_rules(t, g);
    FAIL("expected MissingRuleError");
  } catch (const MissingRuleError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("FuncName -> name") != std::string::npos);
    CHECK(msg.find("unseen") != std::string::npos);
  }
}

TEST_CASE("sample tree traversal sequence") {
  PartialAst t = testing::sample_partial_tree();
  Traversal tr = preorder_with_backtrack(t, true);
  // View order: n1 n2 n3 n6 n4 phd n5.
  std::vector<std::string> expected{"Module",      "Call",   "Var",       "identifier=a",
                                    "identifier=a", "Var",    "Args",      "Args",
                                    "<phd>",        "<phd>",  "Body",      "Body",
                                    "Call",         "Module"};
  std::vector<UnitFlag> flags{UnitFlag::visit,     UnitFlag::visit,     UnitFlag::visit,
                              UnitFlag::visit,     UnitFlag::backtrack, UnitFlag::backtrack,
                              UnitFlag::visit,     UnitFlag::backtrack, UnitFlag::visit,
                              UnitFlag::backtrack, UnitFlag::visit,     UnitFlag::backtrack,
                              UnitFlag::backtrack, UnitFlag::backtrack};
  REQUIRE(tr.units.size() == 14);
  for (std::size_t i = 0; i < 14; ++i) {
    CHECK(label(tr.view, tr.units[i].node) == expected[i]);
    CHECK(tr.units[i].flag == flags[i]);
  }
  CHECK(tr.view.is_placeholder(tr.units[8].node));
  CHECK(tr.units.size() == 2 * (node_count(t.root()) + 1));
}

TEST_CASE("single node traversal") {
  PartialAst t(Symbol{"S", SymbolKind::nonterminal, NodeClass::structural});
  Traversal tr = preorder_with_backtrack(t, false);
  REQUIRE(tr.units.size() == 2);
  CHECK(tr.units[0] == TraversalUnit{0, UnitFlag::visit});
  CHECK(tr.units[1] == TraversalUnit{0, UnitFlag::backtrack});
  CHECK(preorder_with_backtrack(t, true).units.size() == 4);
}

TEST_CASE("placeholder on a complete tree is an error") {
  PartialAst done = PartialAst::from_tree(testing::fixture_trees()[0]);
  CHECK_THROWS_AS(preorder_with_backtrack(done, true), CompleteTreeError);
  CHECK(preorder_with_backtrack(done, false).units.size() == 2 * node_count(done.root()));
}

TEST_CASE("traversal reconstructs random trees") {
  Grammar g = induce_grammar(testing::fixture_trees());
  std::mt19937_64 rng(11);
  for (int i = 0; i < 1000; ++i) {
    AstNode t = testing::random_tree(g, rng);
    PartialAst pt = PartialAst::from_tree(t);
    Traversal tr = preorder_with_backtrack(pt, false);
    CHECK(tr.units.size() == 2 * node_count(t));
    Shape back;
    REQUIRE(rebuild(tr, back));
    CHECK(back == shape_of(t));
  }
}

TEST_CASE("visit-only sequences do not determine the tree") {
  std::istringstream in(read_file(testing::fixture("visit_only_pair.jsonl")));
  std::string line;
  std::vector<AstNode> pair;
  while (std::getline(in, line)) pair.push_back(ast_from_json(Json::parse(line)));
  REQUIRE(pair.size() == 2);
  CHECK_FALSE(same_structure(pair[0], pair[1]));
  PartialAst pa = PartialAst::from_tree(pair[0]);
  PartialAst pb = PartialAst::from_tree(pair[1]);
  Traversal a = preorder_with_backtrack(pa, false);
  Traversal b = preorder_with_backtrack(pb, false);
  CHECK(visit_labels(a) == visit_labels(b));
  Shape sa, sb;
  REQUIRE(rebuild(a, sa));
  REQUIRE(rebuild(b, sb));
  CHECK(sa == shape_of(pair[0]));
  CHECK(sb == shape_of(pair[1]));
  CHECK_FALSE(sa == sb);
}

TEST_CASE("root paths") {
  PartialAst root_only(Symbol{"S", SymbolKind::nonterminal, NodeClass::structural});
  auto p = root_path(root_only);
  REQUIRE(p.size() == 1);
  CHECK(p[0] == &root_only.root());

  PartialAst sample = testing::sample_partial_tree();
  auto fp = root_path(sample);
  REQUIRE(fp.size() == 3);
  CHECK(fp[0]->symbol.name == "Module");
  CHECK(fp[1]->symbol.name == "Call");
  CHECK(fp[2]->symbol.name == "Args");

  CHECK_THROWS_AS(root_path(PartialAst::from_tree(testing::fixture_trees()[0])),
                  CompleteTreeError);
}

TEST_CASE("root paths and scopes match independent walks over random prefixes") {
  auto trees = testing::fixture_trees();
  Grammar g = induce_grammar(trees);
  std::mt19937_64 rng(5);
  for (int i = 0; i < 300; ++i) {
    AstNode full = i < static_cast<int>(trees.size()) ? trees[static_cast<std::size_t>(i)]
                                                      : testing::random_tree(g, rng);
    auto rules = encode_to_rules(full, g);
    for (std::size_t k = 0; k < rules.size(); ++k) {
      PartialAst t(g.symbol(g.start_symbol()));
      for (std::size_t j = 0; j < k; ++j) t = apply_rule(g, t, g.rule(rules[j]));
      std::vector<const AstNode*> chain;
      REQUIRE(chain_to_frontier(t.root(), chain));
      CHECK(root_path(t) == chain);
      CHECK(nearest_scope(t) == scan_scope(chain));
      CHECK(t.frontier() == find_frontier(t.root()));
    }
  }
}

TEST_CASE("context triples") {
  PartialAst sample = testing::sample_partial_tree();
  TreeView v = flatten(sample, true);
  CHECK(context_triple(v, 0) == std::array<int, 3>{0, kPadNode, kPadNode});
  CHECK(context_triple(v, 1) == std::array<int, 3>{1, 0, kPadNode});
  // n6 is the identifier leaf under n3 under n2.
  REQUIRE(label(v, 3) == "identifier=a");
  CHECK(context_triple(v, 3) == std::array<int, 3>{3, 2, 1});
  // The placeholder sits next to the frontier under the same parent.
  CHECK(v.frontier == 4);
  CHECK(v.placeholder == 5);
  CHECK(context_triple(v, 5) == std::array<int, 3>{5, 1, 0});
}

TEST_CASE("nearest scope") {
  PartialAst sample = testing::sample_partial_tree();
  CHECK_FALSE(nearest_scope(sample).has_value());

  // Class c with method m: stop once the method body is the frontier.
  auto trees = testing::fixture_trees();
  Grammar g = induce_grammar(trees);
  const AstNode& cls = trees[3];
  auto rules = encode_to_rules(cls, g);
  PartialAst t(g.symbol(g.start_symbol()));
  bool seen_method_body = false;
  for (int r : rules) {
    t = apply_rule(g, t, g.rule(r));
    if (t.complete()) break;
    auto path = root_path(t);
    bool in_method = false;
    int defs = 0;
    for (const AstNode* n : path) defs += n->symbol.name == "FunctionDef";
    in_method = defs > 0 && path.back()->symbol.name == "Body";
    if (in_method) {
      CHECK(nearest_scope(t) == std::optional<std::string>("m"));
      seen_method_body = true;
    }
  }
  CHECK(seen_method_body);
}

TEST_CASE("scope names follow function-name values during replay") {
  Grammar g = induce_grammar(testing::fixture_trees());
  std::mt19937_64 rng(3);
  for (int i = 0; i < 200; ++i) {
    AstNode t = testing::random_tree(g, rng);
    CHECK(decode_from_rules(encode_to_rules(t, g), g, g.start_symbol()) == t);
  }
}
