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

#include <cstdint>
#include <string>
#include <vector>

#include "gcnn/ast_node.hpp"
#include "gcnn/grammar.hpp"
#include "gcnn/nn/params.hpp"
#include "gcnn/vocab.hpp"

namespace gcnn {

// Architecture switches. Each one changes a fixed set of parameter names;
// HEAD stands for every head prefix.
struct Ablation {
  // Drops embed.rule, HEAD.rule_cnn.* and HEAD.att.rule.W.
  bool no_rule_cnn = false;
  // Drops embed.flag, HEAD.preorder.proj.W and HEAD.preorder_cnn.*; the
  // pre-order segment then pools the per-node features directly.
  bool no_preorder_cnn = false;
  // Drops HEAD.tree_conv.W.
  bool no_tree_conv = false;
  // Drops HEAD.path_cnn.* and HEAD.att.path.W.
  bool no_treepath_cnn = false;
  // Drops every HEAD.att.* weight.
  bool attention_to_maxpool = false;
  // Drops embed.scope.
  bool no_scope = false;
  // Keeps the name set; HEAD.mlp.hidden.W gains dim input rows.
  bool extra_treeconv_pool = false;
  // Replaces head.structural.*, head.variable.* and head.function_name.* with
  // one head.shared.* set.
  bool share_heads = false;

  bool operator==(const Ablation&) const = default;
};

struct ModelConfig {
  int dim = 128;
  int layers = 21;
  int window = 2;
  // 0 means dim.
  int mlp_hidden = 0;
  int max_slots = 8;
  bool copy_mechanism = true;
  // 32 or 64.
  int precision = 32;
  Ablation ablation;

  int hidden() const { return mlp_hidden > 0 ? mlp_hidden : dim; }
  // Throws InputError.
  void validate() const;

  bool operator==(const ModelConfig&) const = default;
};

// Parameter indices of one Eq.2-style convolution stack, layers 1..L.
struct CnnParams {
  std::vector<int> layers;
};

struct HeadParams {
  std::string prefix;
  CnnParams rule_cnn;
  CnnParams preorder_cnn;
  CnnParams path_cnn;
  int tree_conv = -1;
  int preorder_proj = -1;
  int att_rule = -1;
  int att_path = -1;
  int att_preorder = -1;
  int att_input = -1;
  int hidden_w = -1;
  int hidden_b = -1;
  int out_w = -1;
  int out_b = -1;
  // Copy targets appended after the R rule logits.
  int copy_targets = 0;
  // Number of pooled segments fed to the perceptron.
  int segments = 0;
};

struct ParamSpec {
  std::string name;
  nn::ParamKind kind;
  int rows;
  int cols;
};

// Ordered parameter layout for a configuration.
std::vector<ParamSpec> param_layout(const ModelConfig& cfg, const Grammar& g,
                                    const TokenVocab& vocab);

// FNV-1a over the config, grammar and vocabulary, as 16 hex digits.
std::string config_hash(const ModelConfig& cfg, const Grammar& g,
                        const TokenVocab& vocab);

class Model {
 public:
  // Fresh parameters from the seed.
  Model(ModelConfig cfg, Grammar grammar, TokenVocab vocab, std::uint64_t seed);
  // Existing parameters; names and shapes must match the layout.
  Model(ModelConfig cfg, Grammar grammar, TokenVocab vocab, nn::ParamStore params);

  const ModelConfig& config() const { return cfg_; }
  const Grammar& grammar() const { return grammar_; }
  const TokenVocab& vocab() const { return vocab_; }
  nn::ParamStore& params() { return params_; }
  const nn::ParamStore& params() const { return params_; }

  const HeadParams& head(NodeClass cls) const;
  const std::vector<HeadParams>& heads() const { return heads_; }

  int encoder_embed() const { return encoder_embed_; }
  const CnnParams& encoder_cnn() const { return encoder_cnn_; }
  int rule_embed() const { return rule_embed_; }
  int node_embed() const { return node_embed_; }
  int flag_embed() const { return flag_embed_; }
  int scope_embed() const { return scope_embed_; }

  // Rows of embed.rule: actions first, PAD last.
  int rule_pad_row() const;
  // Rows of embed.node.
  int node_pad_row() const;
  int node_placeholder_row() const;
  int node_row(const AstNode& node) const;

  // Rule count plus copy targets of the widest head.
  int action_count() const;

  std::string hash() const { return config_hash(cfg_, grammar_, vocab_); }

 private:
  void bind();

  ModelConfig cfg_;
  Grammar grammar_;
  TokenVocab vocab_;
  nn::ParamStore params_;

  int encoder_embed_ = -1;
  CnnParams encoder_cnn_;
  int rule_embed_ = -1;
  int node_embed_ = -1;
  int flag_embed_ = -1;
  int scope_embed_ = -1;
  std::vector<HeadParams> heads_;
};

}  // namespace gcnn
