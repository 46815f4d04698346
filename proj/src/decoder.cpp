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


#include "gcnn/decoder.hpp"

#include <algorithm>
#include <cmath>

#include "gcnn/error.hpp"

namespace gcnn {
namespace {

int copy_limit(const HeadParams& head, const DecoderState& s) {
  return std::min(head.copy_targets, static_cast<int>(s.slots.size()));
}

nn::Var pool(nn::Graph& g, nn::Var candidates, nn::Var controller, int w_att) {
  if (w_att < 0) return nn::max_over_rows(candidates);
  return attentive_pool(candidates, controller, g.param(w_att)).pooled;
}

}  // namespace

DecoderState initial_state(const Grammar& g, std::vector<Slot> slots) {
  DecoderState s{{}, PartialAst(g.symbol(g.start_symbol())), 0, std::move(slots)};
  s.scope = g.scope_id(nearest_scope(s.partial_ast));
  return s;
}

NodeClass frontier_class(const DecoderState& state) {
  const AstNode* f = state.partial_ast.frontier_node();
  if (f == nullptr) throw CompleteTreeError("the tree has no frontier");
  return f->symbol.node_class;
}

DecoderState advance(const Model& model, const DecoderState& state, int action) {
  const Grammar& g = model.grammar();
  const int r = g.rule_count();
  if (action < 0 || action >= model.action_count()) {
    throw IllegalApplicationError("action " + std::to_string(action) + " is out of range");
  }
  DecoderState next{state.rule_trace, state.partial_ast, 0, state.slots};
  if (action < r) {
    next.partial_ast = apply_rule(g, state.partial_ast, g.rule(action));
  } else {
    const AstNode* f = state.partial_ast.frontier_node();
    if (f == nullptr) throw CompleteTreeError("cannot copy into a complete tree");
    const int slot = action - r;
    const HeadParams& head = model.head(f->symbol.node_class);
    if (f->symbol.node_class != NodeClass::variable || slot >= copy_limit(head, state)) {
      throw IllegalApplicationError("copy of slot " + std::to_string(slot) +
                                    " is not applicable at '" + f->symbol.name + "'");
    }
    auto term = g.copy_symbol(g.symbol_id(f->symbol.name));
    if (!term) {
      throw IllegalApplicationError("'" + f->symbol.name + "' has no terminal production");
    }
    next.partial_ast = apply_terminal(g, state.partial_ast, *term,
                                      state.slots[static_cast<std::size_t>(slot)].value);
  }
  next.rule_trace.push_back(action);
  next.scope = g.scope_id(nearest_scope(next.partial_ast));
  return next;
}

DecoderState replay(const Model& model, std::span<const int> actions,
                    std::vector<Slot> slots) {
  DecoderState s = initial_state(model.grammar(), std::move(slots));
  for (int a : actions) s = advance(model, s, a);
  return s;
}

std::vector<bool> action_mask(const Model& model, const DecoderState& state) {
  const Grammar& g = model.grammar();
  const AstNode* f = state.partial_ast.frontier_node();
  if (f == nullptr) throw CompleteTreeError("the tree has no frontier");
  const HeadParams& head = model.head(f->symbol.node_class);
  std::vector<bool> mask(static_cast<std::size_t>(g.rule_count() + head.copy_targets), false);
  const int sym = g.symbol_id(f->symbol.name);
  for (int rule : g.rules_for(sym)) mask[static_cast<std::size_t>(rule)] = true;
  if (f->symbol.node_class == NodeClass::variable && g.copy_symbol(sym)) {
    const int n = copy_limit(head, state);
    for (int j = 0; j < n; ++j) mask[static_cast<std::size_t>(g.rule_count() + j)] = true;
  }
  return mask;
}

namespace {

void gold_node(const Model& model, const AstNode& node, std::span<const Slot> slots,
               NodePath& path, std::vector<int>& out) {
  if (node.is_terminal()) return;
  const Grammar& g = model.grammar();
  if (node.children.empty()) {
    throw StructuralInputError("unexpanded nonterminal '" + node.symbol.name + "' at " +
                               path_string(path));
  }
  const int lhs = g.symbol_id(node.symbol.name);
  std::vector<int> rhs;
  std::optional<std::string> terminal;
  for (const auto& c : node.children) {
    rhs.push_back(g.find_symbol(c.symbol.name).value_or(-1));
    if (c.is_terminal()) terminal = c.terminal;
  }
  if (node.children.size() == 1 && node.children[0].is_terminal() &&
      node.symbol.node_class == NodeClass::variable && terminal) {
    const HeadParams& head = model.head(node.symbol.node_class);
    auto copy_sym = g.copy_symbol(lhs);
    const int n = std::min(head.copy_targets, static_cast<int>(slots.size()));
    if (copy_sym && rhs[0] == *copy_sym) {
      for (int j = 0; j < n; ++j) {
        if (slots[static_cast<std::size_t>(j)].value == *terminal) {
          out.push_back(g.rule_count() + j);
          return;
        }
      }
    }
  }
  auto rule = std::find(rhs.begin(), rhs.end(), -1) == rhs.end()
                  ? g.find_rule(lhs, rhs, terminal)
                  : std::nullopt;
  if (!rule) {
    std::string text = node.symbol.name + " ->";
    for (const auto& c : node.children) text += " " + c.symbol.name;
    if (terminal) text += " [" + *terminal + "]";
    throw MissingRuleError("no rule (" + text + ") at " + path_string(path));
  }
  out.push_back(*rule);
  for (std::size_t i = 0; i < node.children.size(); ++i) {
    path.push_back(static_cast<int>(i));
    gold_node(model, node.children[i], slots, path, out);
    path.pop_back();
  }
}

}  // namespace

std::vector<int> gold_actions(const Model& model, const AstNode& tree,
                              std::span<const Slot> slots) {
  if (tree.symbol.name != model.grammar().symbol(model.grammar().start_symbol()).name) {
    throw MissingRuleError("root '" + tree.symbol.name + "' is not the start symbol");
  }
  std::vector<int> out;
  NodePath path;
  gold_node(model, tree, slots, path, out);
  return out;
}

nn::Var rule_cnn(nn::Graph& g, const Model& model, const HeadParams& head,
                 std::span<const int> trace) {
  std::vector<int> rows(trace.begin(), trace.end());
  if (rows.empty()) rows.push_back(model.rule_pad_row());
  nn::Var x = nn::embedding_lookup(g, model.rule_embed(), rows);
  return shortcut_cnn(x, head.rule_cnn, model.config().window);
}

nn::Var node_embeddings(nn::Graph& g, const Model& model, const TreeView& view) {
  std::vector<int> rows;
  rows.reserve(view.size());
  for (const auto& e : view.entries) {
    rows.push_back(e.node == nullptr ? model.node_placeholder_row() : model.node_row(*e.node));
  }
  return nn::embedding_lookup(g, model.node_embed(), rows);
}

nn::Var tree_conv(nn::Graph& g, const Model& model, const HeadParams& head,
                  const TreeView& view) {
  if (view.frontier < 0) throw CompleteTreeError("tree convolution needs a frontier");
  std::vector<int> self;
  for (const auto& e : view.entries) {
    self.push_back(e.node == nullptr ? model.node_placeholder_row() : model.node_row(*e.node));
  }
  std::vector<int> parent(self.size()), grand(self.size());
  for (std::size_t i = 0; i < self.size(); ++i) {
    auto t = context_triple(view, static_cast<int>(i));
    parent[i] = t[1] == kPadNode ? model.node_pad_row() : self[static_cast<std::size_t>(t[1])];
    grand[i] = t[2] == kPadNode ? model.node_pad_row() : self[static_cast<std::size_t>(t[2])];
  }
  const int table = model.node_embed();
  std::vector<nn::Var> parts{nn::embedding_lookup(g, table, self),
                             nn::embedding_lookup(g, table, parent),
                             nn::embedding_lookup(g, table, grand)};
  return nn::relu(nn::matmul(nn::concat_cols(parts), g.param(head.tree_conv)));
}

nn::Var preorder_cnn(nn::Graph& g, const Model& model, const HeadParams& head,
                     const Traversal& traversal, nn::Var node_features) {
  std::vector<int> nodes, flags;
  for (const auto& u : traversal.units) {
    nodes.push_back(u.node);
    flags.push_back(u.flag == UnitFlag::visit ? 0 : 1);
  }
  std::vector<nn::Var> parts{nn::gather_rows(node_features, nodes),
                             nn::embedding_lookup(g, model.flag_embed(), flags)};
  nn::Var x = nn::matmul(nn::concat_cols(parts), g.param(head.preorder_proj));
  return shortcut_cnn(x, head.preorder_cnn, model.config().window);
}

nn::Var treepath_cnn(nn::Graph& g, const Model& model, const HeadParams& head,
                     const PartialAst& t) {
  std::vector<int> rows;
  for (const AstNode* n : root_path(t)) rows.push_back(model.node_row(*n));
  nn::Var x = nn::embedding_lookup(g, model.node_embed(), rows);
  return shortcut_cnn(x, head.path_cnn, model.config().window);
}

Attention attentive_pool(nn::Var candidates, nn::Var controller, nn::Var w_att) {
  nn::Var alpha = nn::softmax(nn::bilinear(candidates, w_att, controller));
  return {nn::matmul(nn::transpose(alpha), candidates), alpha};
}

nn::Var aggregate(nn::Graph& g, const Model& model, const HeadParams& head,
                  const DecoderState& state, const EncoderOutput& enc) {
  const Ablation& a = model.config().ablation;
  const int d = model.config().dim;
  nn::Var ctrl_a = enc.controller;
  nn::Var ctrl_b = (a.no_scope || state.scope == 0)
                       ? g.constant(nn::Tensor::Zero(1, d))
                       : nn::embedding_lookup(g, model.scope_embed(), std::span(&state.scope, 1));

  Traversal trav = preorder_with_backtrack(state.partial_ast, true);
  nn::Var ast = a.no_tree_conv ? node_embeddings(g, model, trav.view)
                               : tree_conv(g, model, head, trav.view);
  nn::Var pre = a.no_preorder_cnn ? ast : preorder_cnn(g, model, head, trav, ast);

  std::vector<nn::Var> segs;
  if (!a.no_rule_cnn) {
    segs.push_back(pool(g, rule_cnn(g, model, head, state.rule_trace), ctrl_a, head.att_rule));
  }
  if (!a.no_treepath_cnn) {
    segs.push_back(pool(g, treepath_cnn(g, model, head, state.partial_ast), ctrl_a, head.att_path));
  }
  segs.push_back(pool(g, pre, ctrl_b, head.att_preorder));
  segs.push_back(pool(g, enc.features, ctrl_b, head.att_input));
  segs.push_back(nn::max_over_rows(enc.features));
  segs.push_back(nn::max_over_rows(pre));
  if (a.extra_treeconv_pool) segs.push_back(nn::max_over_rows(ast));
  return nn::concat_cols(segs);
}

StepOutput step_logits(nn::Graph& g, const Model& model, const DecoderState& state,
                       const EncoderOutput& enc, double dropout) {
  const NodeClass cls = frontier_class(state);
  const HeadParams& head = model.head(cls);
  nn::Var x = nn::dropout(aggregate(g, model, head, state, enc), dropout);
  nn::Var h = nn::relu(nn::add_row(nn::matmul(x, g.param(head.hidden_w)), g.param(head.hidden_b)));
  h = nn::dropout(h, dropout);
  nn::Var logits = nn::add_row(nn::matmul(h, g.param(head.out_w)), g.param(head.out_b));
  return {logits, action_mask(model, state), cls};
}

RuleDistribution predict(const Model& model, const DecoderState& state,
                         const EncodedInput& enc) {
  nn::Graph g(model.params(), {.training = false, .record = false});
  StepOutput step = step_logits(g, model, state, as_constants(g, enc), 0.0);
  nn::Tensor logp = nn::masked_log_softmax(step.logits.value(), step.mask);
  RuleDistribution out;
  out.rule_count = model.grammar().rule_count();
  out.head = step.head;
  out.log_probs.resize(static_cast<std::size_t>(logp.cols()));
  out.probs.resize(out.log_probs.size());
  for (Eigen::Index j = 0; j < logp.cols(); ++j) {
    out.log_probs[static_cast<std::size_t>(j)] = logp(0, j);
    out.probs[static_cast<std::size_t>(j)] = std::exp(logp(0, j));
  }
  return out;
}

}  // namespace gcnn
