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
#include <vector>

#include "gcnn/example.hpp"

namespace gcnn {

// Random toy language. Every rule has a keyword and the description lists the
// keywords of a pre-order derivation with terminal values inline, so the
// program is recoverable from the text. Slots hold the distinct variable
// values in order of first occurrence.
struct SynthOptions {
  // Nonterminals per level.
  int grammar_size = 3;
  // Levels of nonterminals between a function body and its variables.
  int depth = 2;
  int count = 20;
  std::uint64_t seed = 1;
  // Function definitions per module, at most.
  int functions = 1;
  // Size of each identifier pool.
  int identifiers = 8;
};

std::vector<Example> synth_dataset(const SynthOptions& opts);

struct SynthSplit {
  std::vector<Example> train;
  std::vector<Example> test;
};

// A fixed set of program templates instantiated with variable names from two
// disjoint pools: training names never occur in the test half.
SynthSplit synth_copy_split(const SynthOptions& opts, int templates, int train_count,
                            int test_count);

}  // namespace gcnn
