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

#include <span>
#include <vector>

#include "gcnn/ast.hpp"
#include "gcnn/encoder.hpp"
#include "gcnn/example.hpp"
#include "gcnn/model.hpp"
#include "gcnn/nn/graph.hpp"

namespace gcnn {

// Decoder input at one step. Action ids below R are grammar rules; id R + j
// copies slot j.
struct DecoderState {
  std::vector<int> rule_trace;
  PartialAst partial_ast;
  int scope = 0;  // index into grammar.scope_vocab(); 0 is none
  std::vector<Slot> slots;

  bool operator==(const DecoderState&) const = default;
};

DecoderState initial_state(const Grammar& g, std::vector<Slot> slots);

// Applies one action. Throws IllegalApplicationError for actions that are
// not applicable at the frontier and CompleteTreeError when there is none.
DecoderState advance(const Model& model, const DecoderState& state, int action);

DecoderState replay(const Model& model, std::span<const int> actions,
                    std::vector<Slot> slots);

// Node class of the frontier symbol. Throws CompleteTreeError.
NodeClass frontier_class(const DecoderState& state);

// Valid entries of the frontier head's output layer.
std::vector<bool> action_mask(const Model& model, const DecoderState& state);

// Teacher-forcing targets. A variable terminal that equals a slot value is
// labelled with the first such slot's copy action when copying is enabled.
std::vector<int> gold_actions(const Model& model, const AstNode& tree,
                              std::span<const Slot> slots);

nn::Var rule_cnn(nn::Graph& g, const Model& model, const HeadParams& head,
                 std::span<const int> trace);

// Node embeddings in view order.
nn::Var node_embeddings(nn::Graph& g, const Model& model, const TreeView& view);

// One feature row per view entry from (node, parent, grandparent).
nn::Var tree_conv(nn::Graph& g, const Model& model, const HeadParams& head,
                  const TreeView& view);

// One feature row per traversal unit.
nn::Var preorder_cnn(nn::Graph& g, const Model& model, const HeadParams& head,
                     const Traversal& traversal, nn::Var node_features);

nn::Var treepath_cnn(nn::Graph& g, const Model& model, const HeadParams& head,
                     const PartialAst& t);

struct Attention {
  nn::Var pooled;   // 1 x d
  nn::Var weights;  // D x 1
};

Attention attentive_pool(nn::Var candidates, nn::Var controller, nn::Var w_att);

// Pooled segments in the fixed order: att(rule | A), att(path | A),
// att(preorder | B), att(input | B), max(input), max(preorder), then
// max(tree conv) when enabled. Disabled modules drop their segment.
nn::Var aggregate(nn::Graph& g, const Model& model, const HeadParams& head,
                  const DecoderState& state, const EncoderOutput& enc);

struct StepOutput {
  nn::Var logits;  // 1 x (R + copy targets)
  std::vector<bool> mask;
  NodeClass head;
};

StepOutput step_logits(nn::Graph& g, const Model& model, const DecoderState& state,
                       const EncoderOutput& enc, double dropout);

struct RuleDistribution {
  // R rule entries followed by the head's copy targets. Masked entries are 0.
  std::vector<double> probs;
  std::vector<double> log_probs;
  int rule_count = 0;
  NodeClass head = NodeClass::structural;
};

// Throws DeadEndError when no action is valid.
RuleDistribution predict(const Model& model, const DecoderState& state,
                         const EncodedInput& enc);

}  // namespace gcnn
