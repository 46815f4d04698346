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

#include "gcnn/nn/graph.hpp"

#include <cmath>
#include <limits>

#include "gcnn/error.hpp"

namespace gcnn::nn {

const Tensor& Var::value() const { return graph->value(id); }

Graph::Graph(const ParamStore& store, GraphOptions options)
    : store_(&store), options_(options), rng_(options.seed),
      param_nodes_(static_cast<std::size_t>(store.size()), -1) {}

Var Graph::param(int index) {
  int& node = param_nodes_.at(static_cast<std::size_t>(index));
  if (node < 0) {
    node = static_cast<int>(nodes_.size());
    Node n;
    n.value = store_->at(index).value;
    n.param = index;
    nodes_.push_back(std::move(n));
  }
  return Var{this, node};
}

Var Graph::constant(Tensor value) {
  check_finite(value, "constant");
  Node n;
  n.value = std::move(value);
  nodes_.push_back(std::move(n));
  return Var{this, static_cast<int>(nodes_.size()) - 1};
}

Var Graph::push(Tensor value, Backward backward, std::string_view op) {
  check_finite(value, op);
  Node n;
  n.value = std::move(value);
  if (options_.record) n.backward = std::move(backward);
  nodes_.push_back(std::move(n));
  return Var{this, static_cast<int>(nodes_.size()) - 1};
}

Tensor& Graph::grad_buffer(int id) {
  Node& n = nodes_[static_cast<std::size_t>(id)];
  if (n.grad.size() == 0) n.grad = Tensor::Zero(n.value.rows(), n.value.cols());
  return n.grad;
}

void Graph::accumulate(int id, const Tensor& grad) { grad_buffer(id) += grad; }

void Graph::backward(Var loss, Gradients& grads) {
  if (backward_done_) throw LifecycleError("backward already ran on this graph");
  if (!options_.record) throw LifecycleError("backward on a non-recording graph");
  if (nodes_.empty() || loss.graph != this || loss.id < 0) {
    throw LifecycleError("backward needs a completed forward pass on this graph");
  }
  if (loss.rows() != 1 || loss.cols() != 1) {
    throw LifecycleError("backward needs a scalar loss, got " + shape_string(loss.value()));
  }
  backward_done_ = true;
  grad_buffer(loss.id).setOnes();
  for (int id = loss.id; id >= 0; --id) {
    Node& n = nodes_[static_cast<std::size_t>(id)];
    if (n.grad.size() == 0) continue;
    if (n.backward) n.backward(*this, n.grad, grads);
    if (n.param >= 0) grads.at(n.param) += n.grad;
  }
}

namespace {

Graph& graph_of(Var a, Var b) {
  if (a.graph == nullptr || a.graph != b.graph) {
    throw LifecycleError("operands belong to different graphs");
  }
  return *a.graph;
}

bool is_vector(const Tensor& t) { return t.rows() == 1 || t.cols() == 1; }

}  // namespace

Var matmul(Var a, Var b) {
  Graph& g = graph_of(a, b);
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  if (av.cols() != bv.rows()) shape_mismatch("matmul", av, bv);
  return g.push(
      av * bv,
      [ia = a.id, ib = b.id](Graph& g, const Tensor& grad, Gradients&) {
        g.accumulate_with(ia, [&](Tensor& da) { da.noalias() += grad * g.value(ib).transpose(); });
        g.accumulate_with(ib, [&](Tensor& db) { db.noalias() += g.value(ia).transpose() * grad; });
      },
      "matmul");
}

Var add(Var a, Var b) {
  Graph& g = graph_of(a, b);
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  if (av.rows() != bv.rows() || av.cols() != bv.cols()) shape_mismatch("add", av, bv);
  return g.push(
      av + bv,
      [ia = a.id, ib = b.id](Graph& g, const Tensor& grad, Gradients&) {
        g.accumulate(ia, grad);
        g.accumulate(ib, grad);
      },
      "add");
}

Var add_row(Var a, Var row) {
  Graph& g = graph_of(a, row);
  const Tensor& av = a.value();
  const Tensor& rv = row.value();
  if (rv.rows() != 1 || rv.cols() != av.cols()) shape_mismatch("add_row", av, rv);
  Tensor out = av;
  out.rowwise() += rv.row(0);
  return g.push(
      std::move(out),
      [ia = a.id, ir = row.id](Graph& g, const Tensor& grad, Gradients&) {
        g.accumulate(ia, grad);
        g.accumulate_with(ir, [&](Tensor& dr) { dr += grad.colwise().sum(); });
      },
      "add_row");
}

Var scale(Var a, double factor) {
  Graph& g = *a.graph;
  return g.push(
      a.value() * factor,
      [ia = a.id, factor](Graph& g, const Tensor& grad, Gradients&) {
        g.accumulate_with(ia, [&](Tensor& da) { da += factor * grad; });
      },
      "scale");
}

Var transpose(Var a) {
  Graph& g = *a.graph;
  return g.push(
      a.value().transpose(),
      [ia = a.id](Graph& g, const Tensor& grad, Gradients&) {
        g.accumulate_with(ia, [&](Tensor& da) { da += grad.transpose(); });
      },
      "transpose");
}

Var concat_cols(std::span<const Var> parts) {
  if (parts.empty()) throw ShapeError("concat_cols: no inputs");
  Graph& g = *parts[0].graph;
  const Eigen::Index rows = parts[0].rows();
  Eigen::Index cols = 0;
  std::vector<int> ids;
  for (const Var& p : parts) {
    graph_of(parts[0], p);
    if (p.rows() != rows) shape_mismatch("concat_cols", parts[0].value(), p.value());
    cols += p.cols();
    ids.push_back(p.id);
  }
  Tensor out(rows, cols);
  Eigen::Index at = 0;
  for (const Var& p : parts) {
    out.middleCols(at, p.cols()) = p.value();
    at += p.cols();
  }
  return g.push(
      std::move(out),
      [ids](Graph& g, const Tensor& grad, Gradients&) {
        Eigen::Index at = 0;
        for (int id : ids) {
          const Eigen::Index c = g.value(id).cols();
          g.accumulate_with(id, [&](Tensor& d) { d += grad.middleCols(at, c); });
          at += c;
        }
      },
      "concat_cols");
}

Var concat_rows(std::span<const Var> parts) {
  if (parts.empty()) throw ShapeError("concat_rows: no inputs");
  Graph& g = *parts[0].graph;
  const Eigen::Index cols = parts[0].cols();
  Eigen::Index rows = 0;
  std::vector<int> ids;
  for (const Var& p : parts) {
    graph_of(parts[0], p);
    if (p.cols() != cols) shape_mismatch("concat_rows", parts[0].value(), p.value());
    rows += p.rows();
    ids.push_back(p.id);
  }
  Tensor out(rows, cols);
  Eigen::Index at = 0;
  for (const Var& p : parts) {
    out.middleRows(at, p.rows()) = p.value();
    at += p.rows();
  }
  return g.push(
      std::move(out),
      [ids](Graph& g, const Tensor& grad, Gradients&) {
        Eigen::Index at = 0;
        for (int id : ids) {
          const Eigen::Index r = g.value(id).rows();
          g.accumulate_with(id, [&](Tensor& d) { d += grad.middleRows(at, r); });
          at += r;
        }
      },
      "concat_rows");
}

Var relu(Var a) {
  Graph& g = *a.graph;
  return g.push(
      a.value().cwiseMax(0.0),
      [ia = a.id](Graph& g, const Tensor& grad, Gradients&) {
        g.accumulate_with(ia, [&](Tensor& da) {
          da.array() += (g.value(ia).array() > 0.0).select(grad.array(), 0.0);
        });
      },
      "relu");
}

Var softmax(Var v) {
  Graph& g = *v.graph;
  const Tensor& x = v.value();
  if (!is_vector(x) || x.size() == 0) throw ShapeError("softmax: expected a vector, got " + shape_string(x));
  Tensor s = (x.array() - x.maxCoeff()).exp();
  s /= s.sum();
  const int out_id = static_cast<int>(g.size());
  return g.push(
      std::move(s),
      [iv = v.id, out_id](Graph& g, const Tensor& grad, Gradients&) {
        const Tensor& s = g.value(out_id);
        const double dot = grad.cwiseProduct(s).sum();
        g.accumulate_with(iv, [&](Tensor& dv) { dv.array() += s.array() * (grad.array() - dot); });
      },
      "softmax");
}

Var embedding_lookup(Graph& g, int table, std::span<const int> rows) {
  const Tensor& t = g.store().at(table).value;
  Tensor out(static_cast<Eigen::Index>(rows.size()), t.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] < 0 || rows[i] >= t.rows()) {
      throw ShapeError("embedding_lookup(" + g.store().at(table).name + "): row " +
                       std::to_string(rows[i]) + " outside " + shape_string(t));
    }
    out.row(static_cast<Eigen::Index>(i)) = t.row(rows[i]);
  }
  return g.push(
      std::move(out),
      [table, idx = std::vector<int>(rows.begin(), rows.end())](Graph&, const Tensor& grad,
                                                                 Gradients& grads) {
        Tensor& d = grads.at(table);
        for (std::size_t i = 0; i < idx.size(); ++i) d.row(idx[i]) += grad.row(static_cast<Eigen::Index>(i));
      },
      "embedding_lookup");
}

Var gather_rows(Var a, std::span<const int> rows) {
  Graph& g = *a.graph;
  const Tensor& x = a.value();
  Tensor out(static_cast<Eigen::Index>(rows.size()), x.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] < 0 || rows[i] >= x.rows()) {
      throw ShapeError("gather_rows: row " + std::to_string(rows[i]) + " outside " +
                       shape_string(x));
    }
    out.row(static_cast<Eigen::Index>(i)) = x.row(rows[i]);
  }
  return g.push(
      std::move(out),
      [ia = a.id, idx = std::vector<int>(rows.begin(), rows.end())](Graph& g, const Tensor& grad,
                                                                     Gradients&) {
        g.accumulate_with(ia, [&](Tensor& d) {
          for (std::size_t i = 0; i < idx.size(); ++i) d.row(idx[i]) += grad.row(static_cast<Eigen::Index>(i));
        });
      },
      "gather_rows");
}

Var max_over_rows(Var a) {
  Graph& g = *a.graph;
  const Tensor& x = a.value();
  if (x.rows() == 0) throw ShapeError("max_over_rows: empty input");
  Tensor out(1, x.cols());
  std::vector<Eigen::Index> arg(static_cast<std::size_t>(x.cols()));
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    Eigen::Index r = 0;
    out(0, c) = x.col(c).maxCoeff(&r);
    arg[static_cast<std::size_t>(c)] = r;
  }
  return g.push(
      std::move(out),
      [ia = a.id, arg = std::move(arg)](Graph& g, const Tensor& grad, Gradients&) {
        g.accumulate_with(ia, [&](Tensor& d) {
          for (std::size_t c = 0; c < arg.size(); ++c) {
            d(arg[c], static_cast<Eigen::Index>(c)) += grad(0, static_cast<Eigen::Index>(c));
          }
        });
      },
      "max_over_rows");
}

Var dropout(Var a, double rate) {
  if (!(rate >= 0.0 && rate < 1.0)) throw InputError("dropout rate must be in [0, 1)");
  Graph& g = *a.graph;
  if (!g.training() || rate == 0.0) return a;
  std::bernoulli_distribution keep(1.0 - rate);
  Tensor mask(a.rows(), a.cols());
  const double survivor = 1.0 / (1.0 - rate);
  for (Eigen::Index i = 0; i < mask.size(); ++i) mask.data()[i] = keep(g.rng()) ? survivor : 0.0;
  Tensor out = a.value().cwiseProduct(mask);
  return g.push(
      std::move(out),
      [ia = a.id, mask = std::move(mask)](Graph& g, const Tensor& grad, Gradients&) {
        g.accumulate_with(ia, [&](Tensor& d) { d += grad.cwiseProduct(mask); });
      },
      "dropout");
}

Var bilinear(Var y, Var w, Var c) {
  Graph& g = graph_of(y, w);
  graph_of(w, c);
  const Tensor& yv = y.value();
  const Tensor& wv = w.value();
  const Tensor& cv = c.value();
  if (yv.cols() != wv.rows()) shape_mismatch("bilinear(y, W)", yv, wv);
  if (cv.rows() != 1 || cv.cols() != wv.cols()) shape_mismatch("bilinear(W, c)", wv, cv);
  Tensor u = wv * cv.transpose();
  return g.push(
      yv * u,
      [iy = y.id, iw = w.id, ic = c.id](Graph& g, const Tensor& grad, Gradients&) {
        const Tensor& yv = g.value(iy);
        const Tensor& wv = g.value(iw);
        const Tensor& cv = g.value(ic);
        const Tensor u = wv * cv.transpose();
        const Tensor ytg = yv.transpose() * grad;  // d x 1
        g.accumulate_with(iy, [&](Tensor& d) { d.noalias() += grad * u.transpose(); });
        g.accumulate_with(iw, [&](Tensor& d) { d.noalias() += ytg * cv; });
        g.accumulate_with(ic, [&](Tensor& d) { d.noalias() += ytg.transpose() * wv; });
      },
      "bilinear");
}

Var sum(Var a) {
  Graph& g = *a.graph;
  Tensor out(1, 1);
  out(0, 0) = a.value().sum();
  return g.push(
      std::move(out),
      [ia = a.id](Graph& g, const Tensor& grad, Gradients&) {
        g.accumulate_with(ia, [&](Tensor& d) { d.array() += grad(0, 0); });
      },
      "sum");
}

Var sum_squares(Var a) {
  Graph& g = *a.graph;
  Tensor out(1, 1);
  out(0, 0) = a.value().squaredNorm();
  return g.push(
      std::move(out),
      [ia = a.id](Graph& g, const Tensor& grad, Gradients&) {
        g.accumulate_with(ia, [&](Tensor& d) { d += (2.0 * grad(0, 0)) * g.value(ia); });
      },
      "sum_squares");
}

Tensor masked_log_softmax(const Tensor& logits, const std::vector<bool>& mask) {
  if (logits.rows() != 1 || static_cast<std::size_t>(logits.cols()) != mask.size()) {
    throw ShapeError("masked_log_softmax: logits " + shape_string(logits) + " vs mask of " +
                     std::to_string(mask.size()));
  }
  double hi = -std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < logits.cols(); ++j) {
    if (mask[static_cast<std::size_t>(j)]) hi = std::max(hi, logits(0, j));
  }
  if (!std::isfinite(hi)) throw DeadEndError("every entry of the distribution is masked");
  double z = 0.0;
  for (Eigen::Index j = 0; j < logits.cols(); ++j) {
    if (mask[static_cast<std::size_t>(j)]) z += std::exp(logits(0, j) - hi);
  }
  const double lse = hi + std::log(z);
  Tensor out(1, logits.cols());
  for (Eigen::Index j = 0; j < logits.cols(); ++j) {
    out(0, j) = mask[static_cast<std::size_t>(j)] ? logits(0, j) - lse
                                                  : -std::numeric_limits<double>::infinity();
  }
  return out;
}

Var masked_nll(Var logits, const std::vector<bool>& mask, int target) {
  Graph& g = *logits.graph;
  if (target < 0 || static_cast<std::size_t>(target) >= mask.size() ||
      !mask[static_cast<std::size_t>(target)]) {
    throw InputError("masked_nll: target " + std::to_string(target) + " is not a valid entry");
  }
  Tensor logp = masked_log_softmax(logits.value(), mask);
  Tensor out(1, 1);
  out(0, 0) = -logp(0, target);
  return g.push(
      std::move(out),
      [il = logits.id, mask, target, logp = std::move(logp)](Graph& g, const Tensor& grad,
                                                             Gradients&) {
        g.accumulate_with(il, [&](Tensor& d) {
          for (Eigen::Index j = 0; j < logp.cols(); ++j) {
            if (!mask[static_cast<std::size_t>(j)]) continue;
            d(0, j) += grad(0, 0) * (std::exp(logp(0, j)) - (j == target ? 1.0 : 0.0));
          }
        });
      },
      "masked_nll");
}

int window_start(int window) { return -((window - 1) / 2); }

namespace {

Tensor window_matrix(const Tensor& x, int window) {
  const Eigen::Index n = x.rows();
  const Eigen::Index d = x.cols();
  const int lo = window_start(window);
  Tensor out = Tensor::Zero(n, d * window);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (int o = 0; o < window; ++o) {
      const Eigen::Index src = r + lo + o;
      if (src >= 0 && src < n) out.block(r, o * d, 1, d) = x.row(src);
    }
  }
  return out;
}

}  // namespace

Var conv_layer(Var input, Var weight, std::optional<Var> shortcut, int window) {
  Graph& g = graph_of(input, weight);
  if (window < 1) throw InputError("convolution window must be positive");
  const Tensor& x = input.value();
  const Tensor& w = weight.value();
  if (w.rows() != x.cols() * window) shape_mismatch("conv_layer(window(x), W)", x, w);
  Tensor z = window_matrix(x, window) * w;
  int shortcut_id = -1;
  if (shortcut) {
    graph_of(input, *shortcut);
    const Tensor& s = shortcut->value();
    if (s.rows() != z.rows() || s.cols() != z.cols()) shape_mismatch("conv_layer(shortcut)", z, s);
    for (Eigen::Index r = 0; r < z.rows(); ++r) {
      const Eigen::Index src = r - kShortcutOffset;
      if (src >= 0 && src < s.rows()) z.row(r) += s.row(src);
    }
    shortcut_id = shortcut->id;
  }
  const int out_id = static_cast<int>(g.size());
  return g.push(
      z.cwiseMax(0.0),
      [ix = input.id, iw = weight.id, shortcut_id, window, out_id](Graph& g, const Tensor& grad,
                                                                    Gradients&) {
        const Tensor& y = g.value(out_id);
        const Tensor gz = (y.array() > 0.0).select(grad.array(), 0.0).matrix();
        const Tensor& x = g.value(ix);
        const Tensor& w = g.value(iw);
        g.accumulate_with(iw, [&](Tensor& dw) { dw.noalias() += window_matrix(x, window).transpose() * gz; });
        const Tensor dxw = gz * w.transpose();
        const Eigen::Index n = x.rows();
        const Eigen::Index d = x.cols();
        const int lo = window_start(window);
        g.accumulate_with(ix, [&](Tensor& dx) {
          for (Eigen::Index r = 0; r < n; ++r) {
            for (int o = 0; o < window; ++o) {
              const Eigen::Index src = r + lo + o;
              if (src >= 0 && src < n) dx.row(src) += dxw.block(r, o * d, 1, d);
            }
          }
        });
        if (shortcut_id >= 0) {
          g.accumulate_with(shortcut_id, [&](Tensor& ds) {
            for (Eigen::Index r = 0; r < gz.rows(); ++r) {
              const Eigen::Index src = r - kShortcutOffset;
              if (src >= 0 && src < ds.rows()) ds.row(src) += gz.row(r);
            }
          });
        }
      },
      "conv_layer");
}

}  // namespace gcnn::nn
