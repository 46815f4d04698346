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


#include "gcnn/train.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>

#include "gcnn/ast_node.hpp"
#include "gcnn/encoder.hpp"
#include "gcnn/error.hpp"
#include "gcnn/io.hpp"

namespace gcnn {
namespace {

std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

std::uint64_t example_seed(std::uint64_t seed, int epoch, std::size_t index) {
  return mix(mix(mix(seed) ^ static_cast<std::uint64_t>(epoch)) ^ index);
}

struct Prepared {
  const Example* ex;
  std::vector<int> tokens;
  std::vector<int> actions;
};

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace

void TrainConfig::validate() const {
  auto fail = [](const std::string& what) { throw InputError("train config: " + what); };
  if (epochs < 1) fail("epochs must be positive");
  if (accumulation < 1) fail("accumulation must be positive");
  if (!(dropout >= 0.0 && dropout < 1.0)) fail("dropout must be in [0, 1)");
  if (l2 < 0.0) fail("l2 must be nonnegative");
  if (!(adam.lr > 0.0)) fail("lr must be positive");
  if (!(adam.beta1 >= 0.0 && adam.beta1 < 1.0)) fail("beta1 must be in [0, 1)");
  if (!(adam.beta2 >= 0.0 && adam.beta2 < 1.0)) fail("beta2 must be in [0, 1)");
  if (!(adam.eps > 0.0)) fail("eps must be positive");
  if (eval_interval < 1) fail("eval_interval must be positive");
  if (patience < 1) fail("patience must be positive");
  if (max_decode_steps < 1) fail("max_decode_steps must be positive");
  if (beam < 1) fail("beam must be positive");
  if (max_updates < 0) fail("max_updates must be nonnegative");
}

bool TrainConfig::operator==(const TrainConfig& o) const {
  return epochs == o.epochs && accumulation == o.accumulation && dropout == o.dropout &&
         l2 == o.l2 && adam.lr == o.adam.lr && adam.beta1 == o.adam.beta1 &&
         adam.beta2 == o.adam.beta2 && adam.eps == o.adam.eps && seed == o.seed &&
         eval_interval == o.eval_interval && patience == o.patience &&
         max_decode_steps == o.max_decode_steps && beam == o.beam &&
         max_updates == o.max_updates && stop_on_perfect_dev == o.stop_on_perfect_dev;
}

nn::Var example_loss(nn::Graph& g, const Model& model, std::span<const int> token_ids,
                     std::span<const int> actions, const std::vector<Slot>& slots,
                     double dropout, double l2) {
  if (actions.empty()) throw InputError("empty action sequence");
  EncoderOutput enc = encode(g, model, token_ids);
  DecoderState state = initial_state(model.grammar(), slots);
  std::vector<nn::Var> terms;
  terms.reserve(actions.size() + 1);
  for (int a : actions) {
    StepOutput step = step_logits(g, model, state, enc, dropout);
    terms.push_back(nn::masked_nll(step.logits, step.mask, a));
    state = advance(model, state, a);
  }
  if (!state.partial_ast.complete()) {
    throw IncompleteDerivationError("action sequence leaves the tree incomplete");
  }
  if (l2 > 0.0) {
    std::vector<nn::Var> reg;
    for (const auto& h : model.heads()) {
      reg.push_back(nn::sum_squares(g.param(h.hidden_w)));
      reg.push_back(nn::sum_squares(g.param(h.out_w)));
    }
    terms.push_back(nn::scale(nn::sum(nn::concat_cols(reg)), l2));
  }
  return nn::sum(nn::concat_cols(terms));
}

EvalReport make_report(std::vector<ExampleRecord> records) {
  EvalReport r;
  std::vector<std::optional<Yield>> preds;
  std::vector<Yield> golds;
  for (auto& rec : records) {
    rec.match = rec.predicted && *rec.predicted == rec.gold;
    rec.sentence_bleu = sentence_bleu(rec.predicted.value_or(Yield{}), rec.gold);
    if (!rec.predicted) ++r.failures;
    preds.push_back(rec.predicted);
    golds.push_back(rec.gold);
  }
  if (!records.empty()) {
    r.string_accuracy = string_accuracy(preds, golds);
    r.bleu = bleu(preds, golds);
  }
  r.records = std::move(records);
  return r;
}

EvalReport evaluate(const Model& model, std::span<const Example> data,
                    const SearchOptions& options) {
  std::vector<ExampleRecord> records;
  for (const auto& ex : data) {
    ExampleRecord rec;
    rec.id = ex.id;
    rec.gold = token_yield(ex.ast);
    auto ids = model.vocab().encode(example_tokens(ex));
    DecodeResult res = beam_search(model, ids, ex.slots, options);
    if (res.failed()) {
      rec.diagnostic = res.diagnostic;
    } else {
      rec.predicted = token_yield(res.hypotheses.front().state.partial_ast.root());
    }
    records.push_back(std::move(rec));
  }
  return make_report(std::move(records));
}

TrainResult train(Model& model, std::span<const Example> train_set,
                  std::span<const Example> dev_set, const TrainConfig& cfg,
                  const std::filesystem::path& out_dir, std::ostream* log_sink) {
  cfg.validate();
  TrainResult result;
  auto emit = [&](const std::string& line) {
    result.log.push_back(line);
    if (log_sink != nullptr) *log_sink << line << '\n' << std::flush;
  };

  std::vector<Prepared> data;
  for (const auto& ex : train_set) {
    try {
      data.push_back({&ex, model.vocab().encode(example_tokens(ex)),
                      gold_actions(model, ex.ast, ex.slots)});
    } catch (const StructuralInputError& e) {
      ++result.skipped;
      emit("skip " + ex.id + ": " + e.what());
    } catch (const MissingRuleError& e) {
      ++result.skipped;
      emit("skip " + ex.id + ": " + e.what());
    }
  }
  if (result.skipped > 0) emit("skipped " + std::to_string(result.skipped) + " examples");
  if (data.empty()) throw InputError("no derivable training examples");

  if (!out_dir.empty()) std::filesystem::create_directories(out_dir);
  nn::ParamStore& store = model.params();
  nn::Gradients acc(store);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const SearchOptions search{cfg.beam, cfg.max_decode_steps};
  int evals_without_gain = 0;
  bool stop = false;

  for (int epoch = 1; epoch <= cfg.epochs && !stop; ++epoch) {
    std::mt19937_64 shuffle_rng(mix(cfg.seed ^ mix(static_cast<std::uint64_t>(epoch))));
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    double loss_sum = 0.0;
    int seen = 0;
    int chunk = 0;
    for (std::size_t k = 0; k < order.size(); ++k) {
      const Prepared& p = data[order[k]];
      nn::Graph g(store, {.training = cfg.dropout > 0.0,
                          .record = true,
                          .seed = example_seed(cfg.seed, epoch, order[k])});
      nn::Var loss = example_loss(g, model, p.tokens, p.actions, p.ex->slots, cfg.dropout, cfg.l2);
      loss_sum += loss.value()(0, 0);
      ++seen;
      g.backward(loss, acc);
      ++chunk;
      if (chunk == cfg.accumulation || k + 1 == order.size()) {
        acc.scale(1.0 / chunk);
        nn::adam_step(store, acc, cfg.adam);
        acc.clear();
        chunk = 0;
        ++result.updates;
        if (cfg.max_updates > 0 && result.updates >= cfg.max_updates) {
          stop = true;
          break;
        }
      }
    }
    result.epochs = epoch;

    std::string line = "epoch " + std::to_string(epoch) + " loss " + fixed(loss_sum / seen, 6);
    const bool eval_now = !dev_set.empty() &&
                          (epoch % cfg.eval_interval == 0 || stop || epoch == cfg.epochs);
    if (eval_now) {
      EvalReport rep = evaluate(model, dev_set, search);
      line += " dev_str_acc " + fixed(rep.string_accuracy, 4) + " dev_bleu " + fixed(rep.bleu, 4);
      if (rep.string_accuracy > result.best_dev_accuracy) {
        result.best_dev_accuracy = rep.string_accuracy;
        result.best_epoch = epoch;
        evals_without_gain = 0;
        if (!out_dir.empty()) save_model(model, out_dir / "best.ckpt", cfg);
      } else if (++evals_without_gain >= cfg.patience) {
        stop = true;
      }
      if (cfg.stop_on_perfect_dev && rep.string_accuracy >= 1.0) stop = true;
    }
    line += " updates " + std::to_string(result.updates);
    emit(line);
  }

  if (!out_dir.empty()) {
    save_model(model, out_dir / "last.ckpt", cfg);
    if (dev_set.empty()) save_model(model, out_dir / "best.ckpt", cfg);
    std::ofstream out(out_dir / "train.log", std::ios::binary);
    if (!out) throw IoError("cannot write " + (out_dir / "train.log").string());
    for (const auto& l : result.log) out << l << '\n';
  }
  return result;
}

}  // namespace gcnn
