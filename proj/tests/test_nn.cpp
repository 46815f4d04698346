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

#include "gcnn/error.hpp"
#include "gcnn/gradcheck.hpp"
#include "gcnn/nn/graph.hpp"
#include "gcnn/nn/params.hpp"

using namespace gcnn;
using namespace gcnn::nn;

namespace {

Tensor row(std::initializer_list<double> v) {
  Tensor t(1, static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) t(0, i++) = x;
  return t;
}

std::filesystem::path temp_file(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "gcnn_test_nn";
  std::filesystem::create_directories(dir);
  return dir / name;
}

bool read_bytes_equal(const std::filesystem::path& a, const std::filesystem::path& b) {
  std::ifstream fa(a, std::ios::binary), fb(b, std::ios::binary);
  std::string sa((std::istreambuf_iterator<char>(fa)), {});
  std::string sb((std::istreambuf_iterator<char>(fb)), {});
  return sa == sb;
}

}  // namespace

TEST_CASE("forward op examples") {
  ParamStore store(64);
  Graph g(store);
  CHECK(relu(g.constant(row({-1, 0, 2}))).value() == row({0, 0, 2}));
  CHECK(softmax(g.constant(row({0, 0}))).value().isApprox(row({0.5, 0.5})));
  Tensor eye = Tensor::Identity(2, 2);
  Var b = bilinear(g.constant(row({1, 0})), g.constant(eye), g.constant(row({1, 0})));
  CHECK(b.value()(0, 0) == 1.0);
  CHECK(max_over_rows(g.constant((Tensor(2, 2) << 1, 5, 3, 2).finished())).value() ==
        row({3, 5}));
}

TEST_CASE("shape and numeric faults") {
  ParamStore store(64);
  Graph g(store);
  CHECK_THROWS_AS(matmul(g.constant(Tensor::Zero(2, 3)), g.constant(Tensor::Zero(2, 3))),
                  ShapeError);
  CHECK_THROWS_AS(g.constant(row({1.0, std::nan("")})), NumericFault);
  CHECK_THROWS_AS(scale(g.constant(row({1e308})), 1e10), NumericFault);
}

TEST_CASE("backward of sum(relu(x))") {
  ParamStore store(64);
  int x = store.add("x", ParamKind::weight, row({1, -1}));
  Graph g(store);
  Gradients grads(store);
  g.backward(sum(relu(g.param(x))), grads);
  CHECK(grads.peek(x) == row({1, 0}));
  CHECK_THROWS_AS(g.backward(sum(relu(g.param(x))), grads), LifecycleError);
}

TEST_CASE("gradients of a reused parameter add up") {
  ParamStore store(64);
  int x = store.add("x", ParamKind::weight, row({2, 3}));
  Graph g(store);
  Gradients grads(store);
  Var p = g.param(x);
  g.backward(sum(add(p, scale(p, 3.0))), grads);
  CHECK(grads.peek(x) == row({4, 4}));

  Graph g2(store);
  g2.backward(sum(g2.param(x)), grads);
  CHECK(grads.peek(x) == row({5, 5}));
}

TEST_CASE("cross-entropy gradient is probabilities minus one-hot") {
  ParamStore store(64);
  int z = store.add("z", ParamKind::weight, row({0.3, -1.2, 2.0, 0.5}));
  const std::vector<bool> mask{true, true, true, true};
  Graph g(store);
  Gradients grads(store);
  g.backward(masked_nll(g.param(z), mask, 2), grads);
  Tensor p = store.at(z).value.array().exp();
  p /= p.sum();
  Tensor expected = p;
  expected(0, 2) -= 1.0;
  CHECK((grads.peek(z) - expected).cwiseAbs().maxCoeff() < 1e-12);

  GradcheckOptions opts;
  auto report = check_gradients(
      store, [&](Graph& gg) { return masked_nll(gg.param(z), mask, 2); }, opts);
  CHECK(report.max_error() < 1e-6);
}

TEST_CASE("masked entries get no probability and no gradient") {
  ParamStore store(64);
  int z = store.add("z", ParamKind::weight, row({0.3, 5.0, 2.0}));
  const std::vector<bool> mask{true, false, true};
  Graph g(store);
  Gradients grads(store);
  Var loss = masked_nll(g.param(z), mask, 0);
  g.backward(loss, grads);
  CHECK(grads.peek(z)(0, 1) == 0.0);
  const double expected = -(0.3 - std::log(std::exp(0.3) + std::exp(2.0)));
  CHECK(loss.value()(0, 0) == doctest::Approx(expected).epsilon(1e-12));
  Tensor lp = masked_log_softmax(store.at(z).value, mask);
  CHECK(std::isinf(lp(0, 1)));
  CHECK(std::exp(lp(0, 0)) + std::exp(lp(0, 2)) == doctest::Approx(1.0));
}

TEST_CASE("every op passes the finite-difference check") {
  GradcheckOptions opts;
  auto report = gradcheck_ops(opts);
  CHECK(report.rows.size() >= 10);
  for (const auto& r : report.rows) {
    INFO(r.group);
    CHECK(r.max_error < 1e-4);
  }
}

TEST_CASE("a corrupted gradient fails the check") {
  GradcheckOptions opts;
  opts.corrupt = true;
  CHECK_FALSE(gradcheck_ops(opts).passed(opts.tolerance));
}

TEST_CASE("dropout") {
  ParamStore store(64);
  Tensor ones = Tensor::Ones(1, 100000);
  {
    Graph g(store, {.training = true, .record = true, .seed = 3});
    Tensor out = dropout(g.constant(ones), 0.5).value();
    double kept = 0;
    for (Eigen::Index i = 0; i < out.size(); ++i) {
      if (out(0, i) != 0.0) {
        kept += 1;
        CHECK(out(0, i) == 2.0);
      }
    }
    CHECK(std::abs(kept / 100000.0 - 0.5) < 0.02);
  }
  {
    Graph g(store, {.training = false});
    CHECK(dropout(g.constant(ones), 0.5).value() == ones);
  }
  Graph g(store);
  CHECK_THROWS_AS(dropout(g.constant(ones), 1.0), InputError);
}

TEST_CASE("adam") {
  AdamConfig cfg;
  SUBCASE("zero gradient leaves the parameter alone") {
    ParamStore store(64);
    int p = store.add("p", ParamKind::weight, row({0.25, -1.5}));
    Gradients grads(store);
    grads.at(p) = Tensor::Zero(1, 2);
    adam_step(store, grads, cfg);
    CHECK(store.at(p).value == row({0.25, -1.5}));
  }
  SUBCASE("first step moves by lr and moments follow the recurrence") {
    ParamStore store(64);
    int p = store.add("p", ParamKind::weight, row({0.0}));
    Gradients grads(store);
    grads.at(p) = row({1.0});
    adam_step(store, grads, cfg);
    CHECK(store.step() == 1);
    CHECK(store.at(p).value(0, 0) == doctest::Approx(-cfg.lr).epsilon(1e-6));

    double m = 0, v = 0, x = 0;
    for (int t = 1; t <= 2; ++t) {
      m = cfg.beta1 * m + (1 - cfg.beta1) * 1.0;
      v = cfg.beta2 * v + (1 - cfg.beta2) * 1.0;
      const double mh = m / (1 - std::pow(cfg.beta1, t));
      const double vh = v / (1 - std::pow(cfg.beta2, t));
      x -= cfg.lr * mh / (std::sqrt(vh) + cfg.eps);
    }
    adam_step(store, grads, cfg);
    CHECK(store.step() == 2);
    CHECK(store.at(p).first_moment(0, 0) == doctest::Approx(m).epsilon(1e-12));
    CHECK(store.at(p).second_moment(0, 0) == doctest::Approx(v).epsilon(1e-12));
    CHECK(store.at(p).value(0, 0) == doctest::Approx(x).epsilon(1e-12));
  }
}

TEST_CASE("32-bit storage rounds to binary32") {
  ParamStore store(32);
  int p = store.add("p", ParamKind::weight, row({0.1}));
  CHECK(store.at(p).value(0, 0) == static_cast<double>(0.1f));
}

TEST_CASE("checkpoint round trip and corruption") {
  for (int precision : {32, 64}) {
    ParamStore store(precision);
    std::mt19937_64 rng(1);
    store.add("a", ParamKind::mlp_weight, glorot_uniform(3, 4, rng));
    store.add("b", ParamKind::bias, Tensor::Zero(1, 4));
    store.add("c", ParamKind::embedding, uniform(5, 2, 0.05, rng));
    Gradients grads(store);
    for (int i = 0; i < store.size(); ++i) grads.at(i).setConstant(0.5);
    adam_step(store, grads, AdamConfig{});

    auto path = temp_file("store" + std::to_string(precision) + ".ckpt");
    CheckpointMeta meta{42, "0123456789abcdef", "{\"k\":1}"};
    save_params(store, path, meta);
    LoadedCheckpoint back = load_params(path);
    CHECK(back.store == store);
    CHECK(back.has_optimizer);
    CHECK(back.meta.seed == 42);
    CHECK(back.meta.config_hash == meta.config_hash);
    CHECK(back.store.names() == std::vector<std::string>{"a", "b", "c"});

    auto again = temp_file("again" + std::to_string(precision) + ".ckpt");
    save_params(back.store, again, back.meta);
    CHECK(read_bytes_equal(path, again));

    const auto size = std::filesystem::file_size(path);
    std::filesystem::resize_file(path, size - 3);
    CHECK_THROWS_AS(load_params(path), CheckpointIncompatible);
  }
  CHECK_THROWS_AS(load_params(temp_file("does_not_exist.ckpt")), IoError);
}
