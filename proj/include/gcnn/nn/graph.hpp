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
#include <deque>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "gcnn/nn/params.hpp"
#include "gcnn/nn/tensor.hpp"

namespace gcnn::nn {

class Graph;

// Handle to a node in a Graph.
struct Var {
  Graph* graph = nullptr;
  int id = -1;

  const Tensor& value() const;
  Eigen::Index rows() const { return value().rows(); }
  Eigen::Index cols() const { return value().cols(); }
  bool valid() const { return graph != nullptr; }
};

struct GraphOptions {
  // Dropout is active only in training mode.
  bool training = false;
  // Keep backward closures; off for pure inference.
  bool record = true;
  std::uint64_t seed = 0;
};

// Tape of forward operations. Nodes are appended in creation order, which is
// a topological order, and backward() walks them in reverse.
class Graph {
 public:
  using Backward = std::function<void(Graph&, const Tensor& grad_out, Gradients&)>;

  explicit Graph(const ParamStore& store, GraphOptions options = {});

  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  // Leaf holding a parameter. Requested repeatedly, the same node comes back.
  Var param(int index);
  Var param(std::string_view name) { return param(store_->index(name)); }
  Var constant(Tensor value);

  // Accumulates d(loss)/d(param) into grads. The loss must be 1 x 1.
  void backward(Var loss, Gradients& grads);

  bool training() const { return options_.training; }
  bool recording() const { return options_.record; }
  std::mt19937_64& rng() { return rng_; }
  const ParamStore& store() const { return *store_; }
  std::size_t size() const { return nodes_.size(); }

  // Op plumbing.
  Var push(Tensor value, Backward backward, std::string_view op);
  const Tensor& value(int id) const { return nodes_[static_cast<std::size_t>(id)].value; }
  void accumulate(int id, const Tensor& grad);
  template <typename Fn>
  void accumulate_with(int id, Fn&& fn) {
    fn(grad_buffer(id));
  }

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    Backward backward;
    int param = -1;
  };

  Tensor& grad_buffer(int id);

  const ParamStore* store_;
  GraphOptions options_;
  std::mt19937_64 rng_;
  // A deque keeps value references valid while the tape grows.
  std::deque<Node> nodes_;
  std::vector<int> param_nodes_;
  bool backward_done_ = false;
};

// --- forward ops -----------------------------------------------------------
// All inputs must come from the same graph. Shape mismatches throw ShapeError.

Var matmul(Var a, Var b);
Var add(Var a, Var b);
// Adds a 1 x n row to every row of a.
Var add_row(Var a, Var row);
Var scale(Var a, double factor);
Var transpose(Var a);
Var concat_cols(std::span<const Var> parts);
Var concat_rows(std::span<const Var> parts);
Var relu(Var a);
// Softmax over all entries of a row or column vector.
Var softmax(Var v);
// Rows of table selected by index; gradients scatter into the table.
Var embedding_lookup(Graph& g, int table, std::span<const int> rows);
Var gather_rows(Var a, std::span<const int> rows);
// Elementwise max over rows: n x d -> 1 x d.
Var max_over_rows(Var a);
// Inverted dropout: identity outside training.
Var dropout(Var a, double rate);
// logits[i] = y_i^T W c for every row y_i of y; c is 1 x m. Result is n x 1.
Var bilinear(Var y, Var w, Var c);
Var sum(Var a);
Var sum_squares(Var a);
// -log softmax(logits)[target] with masked entries excluded from the
// normalizer. logits is 1 x K.
Var masked_nll(Var logits, const std::vector<bool>& mask, int target);

// Offset of the shortcut term in a convolution layer: the residual added at
// position i comes from position i - kShortcutOffset of layer l-2.
inline constexpr int kShortcutOffset = 0;

// One layer of the windowed convolution with optional shortcut:
//   y_i = ReLU(shortcut_{i - kShortcutOffset} + W [x_{i+lo}; ...; x_{i+lo+k-1}])
// with lo = -floor((k-1)/2) and zero padding outside the sequence.
Var conv_layer(Var input, Var weight, std::optional<Var> shortcut, int window);

// Window offset of the first position read by a window of size k.
int window_start(int window);

// Non-differentiable helpers on plain tensors.
Tensor masked_log_softmax(const Tensor& logits, const std::vector<bool>& mask);

}  // namespace gcnn::nn
