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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "gcnn/decoder.hpp"
#include "gcnn/error.hpp"
#include "gcnn/metrics.hpp"
#include "gcnn/model.hpp"
#include "gcnn/search.hpp"
#include "gcnn/train.hpp"
#include "support.hpp"

using namespace gcnn;

namespace {

ModelConfig tiny(int dim = 8, int layers = 3) {
  ModelConfig cfg;
  cfg.dim = dim;
  cfg.layers = layers;
  cfg.precision = 64;
  return cfg;
}

TokenVocab vocab_of(const std::vector<Example>& data) {
  std::vector<std::vector<std::string>> lists;
  for (const auto& ex : data) lists.push_back(example_tokens(ex));
  return TokenVocab::build(lists);
}

}  // namespace

TEST_CASE("string accuracy") {
  std::vector<Yield> golds{{"a", "b"}, {"c"}};
  std::vector<std::optional<Yield>> same{Yield{"a", "b"}, Yield{"c"}};
  CHECK(string_accuracy(same, golds) == 1.0);
  std::vector<std::optional<Yield>> one_off{Yield{"a", "b"}, Yield{"d"}};
  CHECK(string_accuracy(one_off, golds) == 0.5);
  std::vector<std::optional<Yield>> failed{Yield{"a", "b"}, std::nullopt};
  CHECK(string_accuracy(failed, golds) == 0.5);
  std::vector<std::optional<Yield>> short_list{Yield{"a"}};
  CHECK_THROWS_AS(string_accuracy(short_list, golds), InputError);
  CHECK_THROWS_AS(string_accuracy({}, {}), InputError);

  AstNode t = testing::fixture_trees()[0];
  AstNode u = t;
  u.children[0].scope = "other";
  CHECK_FALSE(t == u);
  std::vector<Yield> g1{token_yield(t)};
  std::vector<std::optional<Yield>> p1{token_yield(u)};
  CHECK(string_accuracy(p1, g1) == 1.0);
}

TEST_CASE("BLEU edge cases") {
  std::vector<Yield> golds{{"a", "b", "c", "d", "e"}, {"x", "y"}};
  std::vector<std::optional<Yield>> same{golds[0], golds[1]};
  CHECK(bleu(same, golds) == 1.0);
  std::vector<Yield> one{{"a", "b"}};
  std::vector<std::optional<Yield>> empty{Yield{}};
  CHECK(bleu(empty, one) == 0.0);
  std::vector<std::optional<Yield>> missing{std::nullopt};
  CHECK(bleu(missing, one) == 0.0);
  CHECK(sentence_bleu(golds[0], golds[0]) == 1.0);
  CHECK_THROWS_AS(bleu({}, {}), InputError);
}

TEST_CASE("metrics match the reference fixture") {
  Json fx = Json::parse(read_file(testing::fixture("bleu_fixture.json")));
  std::vector<Yield> golds = fx["golds"].get<std::vector<Yield>>();
  std::vector<std::optional<Yield>> preds;
  for (const auto& p : fx["predictions"]) preds.push_back(p.get<Yield>());
  REQUIRE(golds.size() == 3);
  CHECK(std::abs(bleu(preds, golds) - fx["bleu"].get<double>()) < 1e-4);
  CHECK(std::abs(string_accuracy(preds, golds) - fx["string_accuracy"].get<double>()) < 1e-4);
}

TEST_CASE("initial loss is close to uniform") {
  auto data = read_dataset(testing::fixture("six_trees.jsonl"));
  Model m(tiny(16, 3), induce_grammar(testing::trees_of(data)), vocab_of(data), 1);
  double loss = 0;
  double uniform = 0;
  int steps = 0;
  for (const auto& ex : data) {
    auto ids = m.vocab().encode(example_tokens(ex));
    auto gold = gold_actions(m, ex.ast, ex.slots);
    nn::Graph g(m.params());
    loss += example_loss(g, m, ids, gold, ex.slots, 0.0, 0.0).value()(0, 0);
    DecoderState s = initial_state(m.grammar(), ex.slots);
    for (int a : gold) {
      auto mask = action_mask(m, s);
      uniform += std::log(static_cast<double>(std::count(mask.begin(), mask.end(), true)));
      s = advance(m, s, a);
      ++steps;
    }
  }
  REQUIRE(uniform > 0);
  CHECK(std::abs(loss / steps - uniform / steps) < 0.1 * uniform / steps);
}

TEST_CASE("beam search") {
  auto data = read_dataset(testing::fixture("six_trees.jsonl"));
  Grammar grammar = induce_grammar(testing::trees_of(data));
  TokenVocab vocab = vocab_of(data);
  std::vector<int> ids{2, 3, 4, 5};

  SUBCASE("beam one is greedy and beam five is no worse") {
    for (std::uint64_t seed = 1; seed <= 200; ++seed) {
      Model m(tiny(4, 2), grammar, vocab, seed);
      SearchOptions one{1, 400};
      SearchOptions five{5, 400};
      Hypothesis gr = testing::greedy(m, ids, {}, 400);
      DecodeResult r1 = beam_search(m, ids, {}, one);
      DecodeResult r5 = beam_search(m, ids, {}, five);
      if (!gr.complete()) {
        CHECK(r1.failed());
        continue;
      }
      REQUIRE_FALSE(r1.failed());
      CHECK(r1.hypotheses[0].state.rule_trace == gr.state.rule_trace);
      CHECK(r1.hypotheses[0].log_prob == doctest::Approx(gr.log_prob).epsilon(1e-12));
      REQUIRE_FALSE(r5.failed());
      CHECK(r5.hypotheses[0].log_prob >= gr.log_prob - 1e-12);
      for (const auto& h : r5.hypotheses) {
        double total = 0;
        for (double lp : h.step_log_probs) {
          CHECK(lp <= 0.0);
          total += lp;
        }
        CHECK(total == doctest::Approx(h.log_prob).epsilon(1e-9));
        CHECK(encode_to_rules(h.state.partial_ast.root(), grammar) == h.state.rule_trace);
      }
      for (std::size_t i = 1; i < r5.hypotheses.size(); ++i) {
        CHECK(r5.hypotheses[i - 1].log_prob >= r5.hypotheses[i].log_prob);
      }
    }
  }
  SUBCASE("one rule per symbol forces the derivation") {
    std::vector<AstNode> corpus{testing::fixture_trees()[0]};
    Grammar forced = induce_grammar(corpus);
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      ModelConfig cfg = tiny(4, 2);
      cfg.copy_mechanism = false;
      Model m(cfg, forced, vocab, seed);
      DecodeResult r = beam_search(m, ids, {}, SearchOptions{});
      REQUIRE_FALSE(r.failed());
      CHECK(r.hypotheses[0].state.partial_ast.root() == corpus[0]);
      CHECK(r.hypotheses[0].log_prob == 0.0);
    }
  }
  SUBCASE("step budget exhaustion is a reported failure") {
    Model m(tiny(4, 2), grammar, vocab, 1);
    DecodeResult r = beam_search(m, ids, {}, SearchOptions{5, 2});
    CHECK(r.failed());
    CHECK(r.diagnostic.find("no complete hypothesis") != std::string::npos);
    CHECK_THROWS_AS(beam_search(m, ids, {}, SearchOptions{0, 10}), InputError);
  }
}

TEST_CASE("reports are recomputable from records") {
  std::vector<ExampleRecord> recs{{"a", {"x", "y"}, Yield{"x", "y"}, true, 1.0, ""},
                                  {"b", {"p", "q", "r"}, std::nullopt, false, 0.0, "failed"}};
  EvalReport r = make_report(recs);
  CHECK(r.string_accuracy == 0.5);
  CHECK(r.failures == 1);
  std::vector<std::optional<Yield>> preds{Yield{"x", "y"}, std::nullopt};
  std::vector<Yield> golds{{"x", "y"}, {"p", "q", "r"}};
  CHECK(r.bleu == bleu(preds, golds));
}

TEST_CASE("a single example is memorized") {
  auto data = read_dataset(testing::fixture("six_trees.jsonl"));
  std::vector<Example> one{data[2]};
  Model m(tiny(16, 2), induce_grammar(testing::trees_of(one)), vocab_of(one), 4);
  TrainConfig cfg;
  cfg.epochs = 300;
  cfg.accumulation = 1;
  cfg.dropout = 0.0;
  cfg.adam.lr = 5e-3;
  cfg.patience = 1000;
  cfg.stop_on_perfect_dev = false;
  cfg.eval_interval = 50;
  TrainResult res = train(m, one, one, cfg, {});
  CHECK(res.best_dev_accuracy == 1.0);
  auto ids = m.vocab().encode(example_tokens(one[0]));
  nn::Graph g(m.params());
  const double loss = example_loss(g, m, ids, gold_actions(m, one[0].ast, one[0].slots),
                                   one[0].slots, 0.0, 0.0)
                          .value()(0, 0);
  CHECK(loss < 0.05);
  Hypothesis h = testing::greedy(m, ids, one[0].slots, 200);
  REQUIRE(h.complete());
  CHECK(token_yield(h.state.partial_ast.root()) == token_yield(one[0].ast));
}

TEST_CASE("training is deterministic and skips underivable examples") {
  auto data = read_dataset(testing::fixture("six_trees.jsonl"));
  std::vector<Example> train_set(data.begin(), data.begin() + 4);
  Grammar grammar = induce_grammar(testing::trees_of(train_set));

  TrainConfig cfg;
  cfg.epochs = 2;
  cfg.accumulation = 2;
  std::string logs[2];
  std::string ckpts[2];
  for (int run = 0; run < 2; ++run) {
    Model m(tiny(8, 2), grammar, vocab_of(train_set), 11);
    auto dir = testing::scratch("train_run" + std::to_string(run));
    std::ostringstream sink;
    TrainResult res = train(m, train_set, train_set, cfg, dir, &sink);
    CHECK(res.epochs == 2);
    CHECK(res.skipped == 0);
    logs[run] = testing::slurp(dir / "train.log");
    ckpts[run] = testing::slurp(dir / "last.ckpt");
    CHECK(std::filesystem::exists(dir / "best.ckpt"));
    CHECK(sink.str() == logs[run]);
  }
  CHECK(logs[0] == logs[1]);
  CHECK(ckpts[0] == ckpts[1]);
  CHECK(logs[0].find("epoch 1 loss ") == 0);

  std::vector<Example> mixed = train_set;
  Example odd = data[4];  // print(a): its Expr/Call shape is absent from the first four
  odd.id = "odd";
  mixed.push_back(odd);
  Model m(tiny(8, 2), grammar, vocab_of(train_set), 11);
  TrainConfig one_epoch = cfg;
  one_epoch.epochs = 1;
  TrainResult res = train(m, mixed, train_set, one_epoch, {});
  CHECK(res.skipped == 1);
  REQUIRE_FALSE(res.log.empty());
  CHECK(res.log[0].rfind("skip odd: ", 0) == 0);
}

TEST_CASE("train config validation") {
  TrainConfig cfg;
  cfg.accumulation = 0;
  CHECK_THROWS_AS(cfg.validate(), InputError);
  cfg = TrainConfig{};
  cfg.dropout = 1.0;
  CHECK_THROWS_AS(cfg.validate(), InputError);
}
