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


#include "gcnn/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "gcnn/decoder.hpp"
#include "gcnn/grammar.hpp"
#include "gcnn/synth.hpp"
#include "gcnn/train.hpp"

namespace gcnn {
namespace {

constexpr double kErrorFloor = 1e-5;
constexpr double kStepScales[] = {1.0, 10.0, 0.1, 100.0, 0.01};

double eval_loss(nn::ParamStore& store, const std::function<nn::Var(nn::Graph&)>& loss,
                 std::uint64_t seed) {
  nn::Graph g(store, {.training = true, .record = false, .seed = seed});
  return loss(g).value()(0, 0);
}

nn::Tensor random_tensor(int rows, int cols, std::mt19937_64& rng) {
  return nn::uniform(rows, cols, 1.0, rng);
}

// Positive inputs keep max pooling and ReLU away from ties and kinks.
nn::Tensor offset_tensor(int rows, int cols, std::mt19937_64& rng) {
  nn::Tensor t = random_tensor(rows, cols, rng);
  for (Eigen::Index i = 0; i < t.size(); ++i) t.data()[i] += (i % 2 == 0 ? 0.3 : -0.3);
  return t;
}

Example gradcheck_example() {
  // Function name, scope, variables and several structural nodes.
  AstNode tree = make_nonterminal(
      "Module", NodeClass::structural,
      {make_nonterminal(
          "FunctionDef", NodeClass::structural,
          {make_nonterminal("FuncName", NodeClass::function_name, {make_terminal("name", "f")}),
           make_nonterminal(
               "Assign", NodeClass::structural,
               {make_nonterminal("Var", NodeClass::variable, {make_terminal("identifier", "x")}),
                make_nonterminal(
                    "Call", NodeClass::structural,
                    {make_nonterminal("FuncName", NodeClass::function_name,
                                      {make_terminal("name", "g")}),
                     make_nonterminal("Var", NodeClass::variable,
                                      {make_terminal("identifier", "y")})})})})});
  tree.children[0].scope = "f";
  Example ex;
  ex.id = "gradcheck";
  ex.description = "def f assign x call g y";
  ex.slots = {{"a", "y"}, {"b", "z"}};
  ex.ast = std::move(tree);
  return ex;
}

}  // namespace

double GradcheckReport::max_error() const {
  double m = 0.0;
  for (const auto& r : rows) m = std::max(m, r.max_error);
  return m;
}

double relative_error(double analytic, double numeric) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), kErrorFloor});
  return std::abs(analytic - numeric) / denom;
}

GradcheckReport check_gradients(nn::ParamStore& store,
                                const std::function<nn::Var(nn::Graph&)>& loss,
                                const GradcheckOptions& opts, const std::string& prefix) {
  const std::uint64_t seed = opts.seed * 31 + 1;
  nn::Gradients grads(store);
  {
    nn::Graph g(store, {.training = true, .record = true, .seed = seed});
    g.backward(loss(g), grads);
  }
  GradcheckReport report;
  for (int p = 0; p < store.size(); ++p) {
    nn::Parameter& param = store.at(p);
    GradcheckRow row{prefix + param.name, 0.0, 0};
    for (Eigen::Index i = 0; i < param.value.size(); ++i) {
      double& x = param.value.data()[i];
      const double saved = x;
      double analytic = grads.touched(p) ? grads.peek(p).data()[i] : 0.0;
      if (opts.corrupt) analytic = analytic * 1.01 + 1e-3;
      // A ReLU or max-pool kink closer than eps spoils the central difference,
      // and tiny gradients drown in rounding noise. Other step sizes are tried
      // before the entry counts as a failure.
      double err = std::numeric_limits<double>::infinity();
      for (double scale : kStepScales) {
        if (err < opts.tolerance) break;
        const double eps = opts.eps * scale;
        x = saved + eps;
        const double up = eval_loss(store, loss, seed);
        x = saved - eps;
        const double down = eval_loss(store, loss, seed);
        x = saved;
        err = std::min(err, relative_error(analytic, (up - down) / (2.0 * eps)));
      }
      row.max_error = std::max(row.max_error, err);
      ++row.checked;
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

GradcheckReport gradcheck_ops(const GradcheckOptions& opts) {
  std::mt19937_64 rng(opts.seed);
  const int d = opts.dim;
  GradcheckReport out;
  auto run = [&](const std::string& name, nn::ParamStore store,
                 const std::function<nn::Var(nn::Graph&)>& f) {
    // Project to a scalar with a fixed random weighting.
    const nn::Tensor probe = random_tensor(64, 64, rng);
    auto loss = [&](nn::Graph& g) {
      nn::Var y = f(g);
      nn::Tensor w = probe.topLeftCorner(y.rows(), y.cols());
      nn::Var weighted = nn::matmul(nn::transpose(y), g.constant(w));
      return nn::sum(weighted);
    };
    auto rep = check_gradients(store, loss, opts, "op." + name + ".");
    out.rows.insert(out.rows.end(), rep.rows.begin(), rep.rows.end());
  };
  auto store_of = [&](std::vector<std::pair<std::string, nn::Tensor>> ts) {
    nn::ParamStore s(64);
    for (auto& [n, t] : ts) s.add(n, nn::ParamKind::weight, std::move(t));
    return s;
  };

  run("matmul", store_of({{"a", random_tensor(3, d, rng)}, {"b", random_tensor(d, 2, rng)}}),
      [](nn::Graph& g) { return nn::matmul(g.param(0), g.param(1)); });
  run("add_row", store_of({{"a", random_tensor(3, d, rng)}, {"b", random_tensor(1, d, rng)}}),
      [](nn::Graph& g) { return nn::add_row(g.param(0), g.param(1)); });
  run("add_scale", store_of({{"a", random_tensor(3, d, rng)}, {"b", random_tensor(3, d, rng)}}),
      [](nn::Graph& g) { return nn::scale(nn::add(g.param(0), g.param(1)), -1.5); });
  run("relu", store_of({{"a", offset_tensor(3, d, rng)}}),
      [](nn::Graph& g) { return nn::relu(g.param(0)); });
  run("softmax", store_of({{"a", random_tensor(5, 1, rng)}}),
      [](nn::Graph& g) { return nn::softmax(g.param(0)); });
  run("concat", store_of({{"a", random_tensor(2, d, rng)}, {"b", random_tensor(2, 3, rng)}}),
      [](nn::Graph& g) {
        std::vector<nn::Var> cols{g.param(0), g.param(1)};
        std::vector<nn::Var> rows{nn::concat_cols(cols), nn::concat_cols(cols)};
        return nn::concat_rows(rows);
      });
  run("gather_max", store_of({{"a", random_tensor(4, d, rng)}}), [](nn::Graph& g) {
    std::vector<int> idx{2, 0, 2, 3};
    return nn::max_over_rows(nn::gather_rows(g.param(0), idx));
  });
  run("embedding", store_of({{"a", random_tensor(5, d, rng)}}), [](nn::Graph& g) {
    std::vector<int> idx{4, 1, 4};
    return nn::embedding_lookup(g, 0, idx);
  });
  run("bilinear", store_of({{"y", random_tensor(4, d, rng)},
                            {"w", random_tensor(d, d, rng)},
                            {"c", random_tensor(1, d, rng)}}),
      [](nn::Graph& g) { return nn::bilinear(g.param(0), g.param(1), g.param(2)); });
  run("dropout", store_of({{"a", random_tensor(3, d, rng)}}),
      [](nn::Graph& g) { return nn::dropout(g.param(0), 0.5); });
  run("sum_squares", store_of({{"a", random_tensor(3, d, rng)}}),
      [](nn::Graph& g) { return nn::sum_squares(g.param(0)); });
  run("masked_nll", store_of({{"a", random_tensor(1, 6, rng)}}), [](nn::Graph& g) {
    std::vector<bool> mask{true, false, true, true, false, true};
    return nn::masked_nll(g.param(0), mask, 3);
  });
  for (int window : {1, 2, 3}) {
    run("conv" + std::to_string(window),
        store_of({{"x", offset_tensor(5, d, rng)},
                  {"w", random_tensor(window * d, d, rng)},
                  {"s", offset_tensor(5, d, rng)}}),
        [window](nn::Graph& g) {
          return nn::conv_layer(g.param(0), g.param(1), g.param(2), window);
        });
  }
  return out;
}

GradcheckReport gradcheck_model(const GradcheckOptions& opts, const Ablation& ablation) {
  const Example ex = gradcheck_example();
  std::vector<AstNode> corpus{ex.ast};
  Grammar grammar = induce_grammar(corpus);
  std::vector<std::vector<std::string>> toks{example_tokens(ex)};
  TokenVocab vocab = TokenVocab::build(toks);
  ModelConfig cfg;
  cfg.dim = opts.dim;
  cfg.layers = opts.layers;
  cfg.precision = 64;
  cfg.max_slots = 2;
  cfg.ablation = ablation;
  Model model(cfg, grammar, vocab, opts.seed);
  // Unit-scale values keep pre-activations away from the ReLU and max-pool
  // kinks that tiny embeddings would otherwise sit next to.
  std::mt19937_64 rng(opts.seed);
  for (int p = 0; p < model.params().size(); ++p) {
    nn::Tensor& v = model.params().at(p).value;
    v = nn::uniform(static_cast<int>(v.rows()), static_cast<int>(v.cols()), 1.0, rng);
  }
  const std::vector<int> ids = vocab.encode(toks[0]);
  const std::vector<int> actions = gold_actions(model, ex.ast, ex.slots);
  auto loss = [&](nn::Graph& g) {
    return example_loss(g, model, ids, actions, ex.slots, 0.5, 1e-2);
  };
  return check_gradients(model.params(), loss, opts);
}

}  // namespace gcnn
