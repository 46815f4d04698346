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
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "gcnn/decoder.hpp"
#include "gcnn/search.hpp"
#include "gcnn/example.hpp"
#include "gcnn/metrics.hpp"
#include "gcnn/model.hpp"
#include "gcnn/nn/graph.hpp"
#include "gcnn/nn/params.hpp"

namespace gcnn {

struct TrainConfig {
  int epochs = 100;
  // Examples per optimizer update.
  int accumulation = 16;
  double dropout = 0.5;
  // Applied to perceptron weights only.
  double l2 = 1e-4;
  nn::AdamConfig adam;
  std::uint64_t seed = 1;
  // Epochs between dev evaluations.
  int eval_interval = 1;
  // Dev evaluations without improvement before stopping.
  int patience = 10;
  int max_decode_steps = 800;
  int beam = 5;
  // Stop after this many updates; 0 means unlimited.
  long max_updates = 0;
  // Stop as soon as dev string accuracy reaches 1.
  bool stop_on_perfect_dev = true;

  // Throws InputError.
  void validate() const;

  bool operator==(const TrainConfig& o) const;
};

// Teacher-forced negative log-likelihood of the action sequence plus the L2
// penalty. Runs the encoder once.
nn::Var example_loss(nn::Graph& g, const Model& model, std::span<const int> token_ids,
                     std::span<const int> actions, const std::vector<Slot>& slots,
                     double dropout, double l2);

struct ExampleRecord {
  std::string id;
  Yield gold;
  std::optional<Yield> predicted;  // none on decode failure
  bool match = false;
  double sentence_bleu = 0.0;
  std::string diagnostic;

  bool operator==(const ExampleRecord&) const = default;
};

struct EvalReport {
  double string_accuracy = 0.0;
  double bleu = 0.0;
  int failures = 0;
  std::vector<ExampleRecord> records;

  bool operator==(const EvalReport&) const = default;
};

// Corpus metrics recomputed from the records.
EvalReport make_report(std::vector<ExampleRecord> records);

EvalReport evaluate(const Model& model, std::span<const Example> data,
                    const SearchOptions& options);

struct TrainResult {
  int epochs = 0;
  long updates = 0;
  double best_dev_accuracy = -1.0;
  int best_epoch = 0;
  int skipped = 0;
  std::vector<std::string> log;
};

// Writes best.ckpt, last.ckpt and train.log into out_dir when it is non-empty.
// Log lines are also streamed to log_sink.
TrainResult train(Model& model, std::span<const Example> train_set,
                  std::span<const Example> dev_set, const TrainConfig& cfg,
                  const std::filesystem::path& out_dir, std::ostream* log_sink = nullptr);

}  // namespace gcnn
