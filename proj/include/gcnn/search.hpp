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

#include <span>
#include <string>
#include <vector>

#include "gcnn/decoder.hpp"

namespace gcnn {

struct Hypothesis {
  DecoderState state;
  double log_prob = 0.0;
  std::vector<double> step_log_probs;

  bool complete() const { return state.partial_ast.complete(); }
};

struct SearchOptions {
  int beam = 5;
  int max_steps = 800;
};

struct DecodeResult {
  // Complete hypotheses, best first. Empty when decoding failed.
  std::vector<Hypothesis> hypotheses;
  std::string diagnostic;

  bool failed() const { return hypotheses.empty(); }
};

DecodeResult beam_search(const Model& model, std::span<const int> token_ids,
                         std::vector<Slot> slots, const SearchOptions& options);

}  // namespace gcnn
