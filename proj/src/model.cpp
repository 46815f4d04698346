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


#include "gcnn/model.hpp"

#include <cstdio>
#include <random>

#include "gcnn/error.hpp"

namespace gcnn {
namespace {

constexpr double kEmbeddingInit = 0.05;

const NodeClass kHeadClasses[] = {NodeClass::structural, NodeClass::variable,
                                  NodeClass::function_name};

int segment_count(const Ablation& a) {
  int n = 6;
  if (a.no_rule_cnn) --n;
  if (a.no_treepath_cnn) --n;
  if (a.extra_treeconv_pool) ++n;
  return n;
}

void add_cnn(std::vector<ParamSpec>& out, const std::string& prefix, int layers,
             int window, int dim) {
  for (int l = 1; l <= layers; ++l) {
    out.push_back({prefix + ".conv." + std::to_string(l) + ".W",
                   nn::ParamKind::weight, window * dim, dim});
  }
}

std::vector<std::string> head_prefixes(const Ablation& a) {
  if (a.share_heads) return {"head.shared"};
  std::vector<std::string> out;
  for (NodeClass c : kHeadClasses) out.push_back("head." + std::string(to_string(c)));
  return out;
}

int head_copy_targets(const ModelConfig& cfg, const std::string& prefix) {
  if (!cfg.copy_mechanism) return 0;
  if (prefix == "head.shared" || prefix == "head.variable") return cfg.max_slots;
  return 0;
}

}  // namespace

void ModelConfig::validate() const {
  auto fail = [](const std::string& what) { throw InputError("model config: " + what); };
  if (dim < 1) fail("dim must be positive");
  if (layers < 1) fail("layers must be positive");
  if (window < 1) fail("window must be positive");
  if (mlp_hidden < 0) fail("mlp_hidden must be nonnegative");
  if (max_slots < 0) fail("max_slots must be nonnegative");
  if (precision != 32 && precision != 64) fail("precision must be 32 or 64");
}

std::vector<ParamSpec> param_layout(const ModelConfig& cfg, const Grammar& g,
                                    const TokenVocab& vocab) {
  cfg.validate();
  const Ablation& a = cfg.ablation;
  const int d = cfg.dim;
  const int r = g.rule_count();
  std::vector<ParamSpec> out;
  out.push_back({"encoder.embed", nn::ParamKind::embedding, vocab.size(), d});
  add_cnn(out, "encoder", cfg.layers, cfg.window, d);
  if (!a.no_rule_cnn) {
    int copies = cfg.copy_mechanism ? cfg.max_slots : 0;
    out.push_back({"embed.rule", nn::ParamKind::embedding, r + copies + 1, d});
  }
  int nodes = static_cast<int>(g.symbols().size()) + 2 +
              static_cast<int>(g.terminal_values().size()) + 1;
  out.push_back({"embed.node", nn::ParamKind::embedding, nodes, d});
  if (!a.no_preorder_cnn) out.push_back({"embed.flag", nn::ParamKind::embedding, 2, d});
  if (!a.no_scope) {
    out.push_back({"embed.scope", nn::ParamKind::embedding,
                   static_cast<int>(g.scope_vocab().size()), d});
  }
  const int segments = segment_count(a);
  const int h = cfg.hidden();
  for (const auto& p : head_prefixes(a)) {
    if (!a.no_rule_cnn) add_cnn(out, p + ".rule_cnn", cfg.layers, cfg.window, d);
    if (!a.no_tree_conv) out.push_back({p + ".tree_conv.W", nn::ParamKind::weight, 3 * d, d});
    if (!a.no_preorder_cnn) {
      out.push_back({p + ".preorder.proj.W", nn::ParamKind::weight, 2 * d, d});
      add_cnn(out, p + ".preorder_cnn", cfg.layers, cfg.window, d);
    }
    if (!a.no_treepath_cnn) add_cnn(out, p + ".path_cnn", cfg.layers, cfg.window, d);
    if (!a.attention_to_maxpool) {
      if (!a.no_rule_cnn) out.push_back({p + ".att.rule.W", nn::ParamKind::weight, d, d});
      if (!a.no_treepath_cnn) out.push_back({p + ".att.path.W", nn::ParamKind::weight, d, d});
      out.push_back({p + ".att.preorder.W", nn::ParamKind::weight, d, d});
      out.push_back({p + ".att.input.W", nn::ParamKind::weight, d, d});
    }
    const int outputs = r + head_copy_targets(cfg, p);
    out.push_back({p + ".mlp.hidden.W", nn::ParamKind::mlp_weight, segments * d, h});
    out.push_back({p + ".mlp.hidden.b", nn::ParamKind::bias, 1, h});
    out.push_back({p + ".mlp.out.W", nn::ParamKind::mlp_weight, h, outputs});
    out.push_back({p + ".mlp.out.b", nn::ParamKind::bias, 1, outputs});
  }
  return out;
}

std::string config_hash(const ModelConfig& cfg, const Grammar& g,
                        const TokenVocab& vocab) {
  std::uint64_t h = 14695981039346656037ull;
  auto feed = [&h](std::string_view s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 1099511628211ull;
    }
    h ^= 0xff;
    h *= 1099511628211ull;
  };
  const Ablation& a = cfg.ablation;
  for (int v : {cfg.dim, cfg.layers, cfg.window, cfg.hidden(), cfg.max_slots,
                int(cfg.copy_mechanism), cfg.precision, int(a.no_rule_cnn),
                int(a.no_preorder_cnn), int(a.no_tree_conv), int(a.no_treepath_cnn),
                int(a.attention_to_maxpool), int(a.no_scope),
                int(a.extra_treeconv_pool), int(a.share_heads)}) {
    feed(std::to_string(v));
  }
  for (const auto& s : g.symbols()) {
    feed(s.symbol.name);
    feed(to_string(s.symbol.kind));
    feed(to_string(s.symbol.node_class));
    feed(s.introduces_scope ? "1" : "0");
  }
  for (int i = 0; i < g.rule_count(); ++i) feed(g.describe_rule(i));
  for (const auto& s : g.scope_vocab()) feed(s);
  feed(std::to_string(g.start_symbol()));
  for (const auto& t : vocab.tokens()) feed(t);
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Model::Model(ModelConfig cfg, Grammar grammar, TokenVocab vocab, std::uint64_t seed)
    : cfg_(std::move(cfg)),
      grammar_(std::move(grammar)),
      vocab_(std::move(vocab)),
      params_(cfg_.precision) {
  std::mt19937_64 rng(seed);
  for (const auto& spec : param_layout(cfg_, grammar_, vocab_)) {
    nn::Tensor init;
    switch (spec.kind) {
      case nn::ParamKind::weight:
      case nn::ParamKind::mlp_weight:
        init = nn::glorot_uniform(spec.rows, spec.cols, rng);
        break;
      case nn::ParamKind::embedding:
        init = nn::uniform(spec.rows, spec.cols, kEmbeddingInit, rng);
        break;
      case nn::ParamKind::bias:
        init = nn::Tensor::Zero(spec.rows, spec.cols);
        break;
    }
    params_.add(spec.name, spec.kind, std::move(init));
  }
  bind();
}

Model::Model(ModelConfig cfg, Grammar grammar, TokenVocab vocab, nn::ParamStore params)
    : cfg_(std::move(cfg)),
      grammar_(std::move(grammar)),
      vocab_(std::move(vocab)),
      params_(std::move(params)) {
  auto layout = param_layout(cfg_, grammar_, vocab_);
  if (static_cast<int>(layout.size()) != params_.size()) {
    throw CheckpointIncompatible("checkpoint has " + std::to_string(params_.size()) +
                                 " parameters, configuration expects " +
                                 std::to_string(layout.size()));
  }
  if (params_.precision() != cfg_.precision) {
    throw CheckpointIncompatible("checkpoint precision differs from configuration");
  }
  for (std::size_t i = 0; i < layout.size(); ++i) {
    const auto& p = params_.at(static_cast<int>(i));
    const auto& s = layout[i];
    if (p.name != s.name || p.kind != s.kind || p.value.rows() != s.rows ||
        p.value.cols() != s.cols) {
      throw CheckpointIncompatible("parameter " + std::to_string(i) + " is " + p.name +
                                   " " + nn::shape_string(p.value) + ", expected " +
                                   s.name + " (" + std::to_string(s.rows) + ", " +
                                   std::to_string(s.cols) + ")");
    }
  }
  bind();
}

void Model::bind() {
  auto opt = [this](const std::string& name) {
    auto i = params_.find(name);
    return i ? *i : -1;
  };
  auto cnn = [this](const std::string& prefix) {
    CnnParams c;
    for (int l = 1; l <= cfg_.layers; ++l) {
      auto i = params_.find(prefix + ".conv." + std::to_string(l) + ".W");
      if (!i) return CnnParams{};
      c.layers.push_back(*i);
    }
    return c;
  };
  encoder_embed_ = params_.index("encoder.embed");
  encoder_cnn_ = cnn("encoder");
  rule_embed_ = opt("embed.rule");
  node_embed_ = params_.index("embed.node");
  flag_embed_ = opt("embed.flag");
  scope_embed_ = opt("embed.scope");
  heads_.clear();
  for (const auto& p : head_prefixes(cfg_.ablation)) {
    HeadParams h;
    h.prefix = p;
    h.rule_cnn = cnn(p + ".rule_cnn");
    h.preorder_cnn = cnn(p + ".preorder_cnn");
    h.path_cnn = cnn(p + ".path_cnn");
    h.tree_conv = opt(p + ".tree_conv.W");
    h.preorder_proj = opt(p + ".preorder.proj.W");
    h.att_rule = opt(p + ".att.rule.W");
    h.att_path = opt(p + ".att.path.W");
    h.att_preorder = opt(p + ".att.preorder.W");
    h.att_input = opt(p + ".att.input.W");
    h.hidden_w = params_.index(p + ".mlp.hidden.W");
    h.hidden_b = params_.index(p + ".mlp.hidden.b");
    h.out_w = params_.index(p + ".mlp.out.W");
    h.out_b = params_.index(p + ".mlp.out.b");
    h.copy_targets = head_copy_targets(cfg_, p);
    h.segments = segment_count(cfg_.ablation);
    heads_.push_back(std::move(h));
  }
}

const HeadParams& Model::head(NodeClass cls) const {
  if (cfg_.ablation.share_heads) return heads_.front();
  return heads_.at(static_cast<std::size_t>(cls));
}

int Model::rule_pad_row() const {
  return grammar_.rule_count() + (cfg_.copy_mechanism ? cfg_.max_slots : 0);
}

int Model::node_pad_row() const { return static_cast<int>(grammar_.symbols().size()); }

int Model::node_placeholder_row() const { return node_pad_row() + 1; }

int Model::node_row(const AstNode& node) const {
  if (node.is_terminal()) {
    const int base = node_placeholder_row() + 1;
    const int unk = base + static_cast<int>(grammar_.terminal_values().size());
    if (!node.terminal) return unk;
    auto t = grammar_.terminal_index(*node.terminal);
    return t ? base + *t : unk;
  }
  auto s = grammar_.find_symbol(node.symbol.name);
  if (!s) throw InputError("symbol '" + node.symbol.name + "' is not in the grammar");
  return *s;
}

int Model::action_count() const {
  return grammar_.rule_count() + (cfg_.copy_mechanism ? cfg_.max_slots : 0);
}

}  // namespace gcnn
