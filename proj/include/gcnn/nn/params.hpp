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
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "gcnn/nn/tensor.hpp"

namespace gcnn::nn {

enum class ParamKind {
  weight,       // convolution / attention kernels
  mlp_weight,   // fully connected weights; the only kind that gets L2
  bias,
  embedding,
};

std::string_view to_string(ParamKind kind);
ParamKind parse_param_kind(std::string_view text);

struct Parameter {
  std::string name;
  ParamKind kind = ParamKind::weight;
  Tensor value;
  // Adam moments, same shape as value.
  Tensor first_moment;
  Tensor second_moment;
};

// Named parameters in registration order plus optimizer state.
class ParamStore {
 public:
  explicit ParamStore(int precision = 32);

  int add(std::string name, ParamKind kind, Tensor init);
  int index(std::string_view name) const;
  std::optional<int> find(std::string_view name) const;

  Parameter& at(int i) { return params_.at(static_cast<std::size_t>(i)); }
  const Parameter& at(int i) const { return params_.at(static_cast<std::size_t>(i)); }
  Parameter& operator[](std::string_view name) { return at(index(name)); }
  int size() const { return static_cast<int>(params_.size()); }
  std::vector<std::string> names() const;
  std::size_t scalar_count() const;

  long step() const { return step_; }
  void set_step(long step) { step_ = step; }
  int precision() const { return precision_; }

  // Rounds values (and moments) to the storage precision.
  void quantize();

  bool operator==(const ParamStore& other) const;

 private:
  int precision_;
  long step_ = 0;
  std::vector<Parameter> params_;
  std::unordered_map<std::string, int> index_;
};

// Glorot/Xavier uniform in +-sqrt(6 / (fan_in + fan_out)).
Tensor glorot_uniform(int rows, int cols, std::mt19937_64& rng);
Tensor uniform(int rows, int cols, double bound, std::mt19937_64& rng);

// Per-parameter gradient buffers, allocated on first touch.
class Gradients {
 public:
  explicit Gradients(const ParamStore& store);

  Tensor& at(int param);
  // Empty when the parameter was never reached.
  const Tensor& peek(int param) const { return grads_.at(static_cast<std::size_t>(param)); }
  bool touched(int param) const { return peek(param).size() > 0; }
  int size() const { return static_cast<int>(grads_.size()); }

  void add(const Gradients& other);
  void scale(double factor);
  void clear();

 private:
  const ParamStore* store_;
  std::vector<Tensor> grads_;
};

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// One bias-corrected Adam update; untouched gradients count as zero.
void adam_step(ParamStore& store, const Gradients& grads, const AdamConfig& cfg);

// Checkpoint: a text header line, a one-line JSON manifest (format version,
// parameter names/kinds/shapes, precision, optimizer step, caller metadata)
// and then little-endian IEEE-754 values in manifest order: all values, then
// first moments, then second moments when optimizer state is included.
// Precision 32 writes binary32, precision 64 writes binary64.
struct CheckpointMeta {
  std::uint64_t seed = 0;
  std::string config_hash;
  // Free-form JSON text stored verbatim in the manifest.
  std::string extra_json = "{}";
};

void save_params(const ParamStore& store, const std::filesystem::path& path,
                 const CheckpointMeta& meta, bool include_optimizer = true);

struct LoadedCheckpoint {
  ParamStore store;
  CheckpointMeta meta;
  bool has_optimizer = false;
};

// Throws CheckpointIncompatible on version, manifest or size problems and
// IoError when the file cannot be read.
LoadedCheckpoint load_params(const std::filesystem::path& path);

}  // namespace gcnn::nn
