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

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gcnn/ast.hpp"
#include "gcnn/decoder.hpp"
#include "gcnn/grammar.hpp"
#include "gcnn/io.hpp"
#include "gcnn/model.hpp"
#include "gcnn/nn/tensor.hpp"
#include "gcnn/search.hpp"

namespace gcnn::testing {

inline std::filesystem::path fixture(std::string_view name) {
  return std::filesystem::path(GCNN_FIXTURE_DIR) / name;
}

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "gcnn_test" / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::vector<AstNode> trees_of(const std::vector<Example>& data) {
  std::vector<AstNode> out;
  for (const auto& ex : data) out.push_back(ex.ast);
  return out;
}

inline std::vector<AstNode> fixture_trees() {
  return trees_of(read_dataset(fixture("six_trees.jsonl")));
}

// Fewest expansion levels needed to complete each symbol.
inline std::vector<int> min_heights(const Grammar& g) {
  const int big = std::numeric_limits<int>::max() / 2;
  std::vector<int> h(g.symbols().size(), big);
  for (std::size_t s = 0; s < h.size(); ++s) {
    if (g.symbols()[s].symbol.kind == SymbolKind::terminal) h[s] = 0;
  }
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& r : g.rules()) {
      int worst = 0;
      for (int c : r.rhs) worst = std::max(worst, h[static_cast<std::size_t>(c)]);
      if (worst + 1 < h[static_cast<std::size_t>(r.lhs)]) {
        h[static_cast<std::size_t>(r.lhs)] = worst + 1;
        changed = true;
      }
    }
  }
  return h;
}

namespace detail {

inline AstNode grow(const Grammar& g, const std::vector<int>& heights, int sym, int depth,
                    int max_depth, std::mt19937_64& rng) {
  std::vector<int> options;
  for (int r : g.rules_for(sym)) {
    int worst = 0;
    for (int c : g.rule(r).rhs) worst = std::max(worst, heights[static_cast<std::size_t>(c)]);
    if (depth + worst < max_depth) options.push_back(r);
  }
  if (options.empty()) {
    int best = -1;
    int best_h = std::numeric_limits<int>::max();
    for (int r : g.rules_for(sym)) {
      int worst = 0;
      for (int c : g.rule(r).rhs) worst = std::max(worst, heights[static_cast<std::size_t>(c)]);
      if (worst < best_h) {
        best_h = worst;
        best = r;
      }
    }
    options.push_back(best);
  }
  std::uniform_int_distribution<std::size_t> pick(0, options.size() - 1);
  const GrammarRule& rule = g.rule(options[pick(rng)]);
  AstNode node;
  node.symbol = g.symbol(sym);
  for (int c : rule.rhs) {
    if (g.symbol(c).kind == SymbolKind::terminal) {
      node.children.push_back(make_terminal(g.symbol(c).name, *rule.terminal_value));
    } else {
      node.children.push_back(grow(g, heights, c, depth + 1, max_depth, rng));
    }
  }
  return node;
}

// A scope node takes the value of the first function-name node whose
// closest scope-node ancestor it is.
inline void name_scopes(const Grammar& g, AstNode& node, AstNode* owner) {
  auto id = g.find_symbol(node.symbol.name);
  if (node.symbol.node_class == NodeClass::function_name && node.children.size() == 1 &&
      node.children[0].terminal && owner != nullptr && !owner->scope) {
    owner->scope = node.children[0].terminal;
  }
  AstNode* next = (id && g.introduces_scope(*id)) ? &node : owner;
  for (auto& c : node.children) name_scopes(g, c, next);
}

}  // namespace detail

// Random complete tree derived from the start symbol, with scopes named as
// the decoder would name them.
inline AstNode random_tree(const Grammar& g, std::mt19937_64& rng, int max_depth = 8) {
  const std::vector<int> heights = min_heights(g);
  AstNode t = detail::grow(g, heights, g.start_symbol(), 0, max_depth, rng);
  detail::name_scopes(g, t, nullptr);
  return t;
}

// Partial tree used by the traversal fixtures: n1 -> n2; n2 -> n3, n4,
// n5; n3 -> n6. n6 is a terminal leaf, n4 is the frontier and n5 is still
// unexpanded.
inline PartialAst sample_partial_tree() {
  AstNode n6 = make_terminal("identifier", "a");
  AstNode n3 = make_nonterminal("Var", NodeClass::variable, {n6});
  AstNode n4 = make_nonterminal("Args", NodeClass::structural);
  AstNode n5 = make_nonterminal("Body", NodeClass::structural);
  AstNode n2 = make_nonterminal("Call", NodeClass::structural, {n3, n4, n5});
  AstNode n1 = make_nonterminal("Module", NodeClass::structural, {n2});
  return PartialAst::from_tree(n1);
}

// Straight-line convolution stack: layer l reads a k-wide zero-padded window
// starting at i - floor((k-1)/2); even layers add layer l-2 at the same
// position; every layer ends in ReLU.
inline std::vector<nn::Tensor> reference_cnn(const nn::Tensor& x0,
                                             const std::vector<nn::Tensor>& weights,
                                             int window) {
  std::vector<nn::Tensor> ys{x0};
  const long n = x0.rows();
  const long d = x0.cols();
  const long lo = -((window - 1) / 2);
  for (std::size_t l = 1; l <= weights.size(); ++l) {
    const nn::Tensor& w = weights[l - 1];
    const nn::Tensor& x = ys[l - 1];
    nn::Tensor y(n, w.cols());
    for (long i = 0; i < n; ++i) {
      for (long o = 0; o < w.cols(); ++o) {
        double acc = 0.0;
        for (long j = 0; j < window; ++j) {
          const long src = i + lo + j;
          if (src < 0 || src >= n) continue;
          for (long c = 0; c < d; ++c) acc += x(src, c) * w(j * d + c, o);
        }
        if (l % 2 == 0) acc += ys[l - 2](i, o);
        y(i, o) = acc > 0.0 ? acc : 0.0;
      }
    }
    ys.push_back(y);
  }
  return ys;
}

inline std::string label(const TreeView& view, int i) {
  const auto* n = view.entries[static_cast<std::size_t>(i)].node;
  if (n == nullptr) return "<phd>";
  return n->symbol.name + (n->terminal ? "=" + *n->terminal : "");
}

inline std::string label(const AstNode& n) {
  return n.symbol.name + (n.terminal ? "=" + *n.terminal : "");
}

struct Shape {
  std::string label;
  std::vector<Shape> kids;
  bool operator==(const Shape&) const = default;
};

inline Shape shape_of(const AstNode& n) {
  Shape s{label(n), {}};
  for (const auto& c : n.children) s.kids.push_back(shape_of(c));
  return s;
}

// Rebuilds a tree from labelled units with an explicit stack. Returns false
// when the sequence is not a well-nested visit/backtrack stream.
inline bool rebuild(const Traversal& tr, Shape& out) {
  std::vector<Shape> stack;
  std::vector<int> open;
  bool done = false;
  for (const auto& u : tr.units) {
    if (done) return false;
    if (u.flag == UnitFlag::visit) {
      stack.push_back(Shape{label(tr.view, u.node), {}});
      open.push_back(u.node);
    } else {
      if (open.empty() || open.back() != u.node) return false;
      Shape top = stack.back();
      stack.pop_back();
      open.pop_back();
      if (stack.empty()) {
        out = top;
        done = true;
      } else {
        stack.back().kids.push_back(top);
      }
    }
  }
  return done;
}

inline std::vector<std::string> visit_labels(const Traversal& tr) {
  std::vector<std::string> out;
  for (const auto& u : tr.units) {
    if (u.flag == UnitFlag::visit) out.push_back(label(tr.view, u.node));
  }
  return out;
}

// Stepwise argmax; ties go to the lowest action id.
inline Hypothesis greedy(const Model& m, std::span<const int> ids, const std::vector<Slot>& slots,
                  int max_steps) {
  EncodedInput enc = encode_input(m, ids);
  Hypothesis h{initial_state(m.grammar(), slots), 0.0, {}};
  for (int step = 0; step < max_steps && !h.complete(); ++step) {
    RuleDistribution d = predict(m, h.state, enc);
    std::size_t best = 0;
    for (std::size_t a = 1; a < d.probs.size(); ++a) {
      if (d.probs[a] > d.probs[best]) best = a;
    }
    h.log_prob += d.log_probs[best];
    h.step_log_probs.push_back(d.log_probs[best]);
    h.state = advance(m, h.state, static_cast<int>(best));
  }
  return h;
}

}  // namespace gcnn::testing
