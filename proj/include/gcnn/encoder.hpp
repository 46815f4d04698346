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
#include <vector>

#include "gcnn/model.hpp"
#include "gcnn/nn/graph.hpp"

namespace gcnn {

// Deep convolution with shortcuts on even layers. Returns layers 0..L, where
// layer 0 is the input itself.
std::vector<nn::Var> shortcut_cnn_layers(nn::Var input, const CnnParams& params,
                                         int window);
// Top layer only.
nn::Var shortcut_cnn(nn::Var input, const CnnParams& params, int window);

struct EncoderOutput {
  nn::Var features;    // I x d
  nn::Var controller;  // 1 x d, max over positions
};

EncoderOutput encode(nn::Graph& g, const Model& model, std::span<const int> token_ids);

// Encoder results detached from any graph, for decoding.
struct EncodedInput {
  nn::Tensor features;
  nn::Tensor controller;
};

EncodedInput encode_input(const Model& model, std::span<const int> token_ids);

// Re-enters the detached encoding as constants of g.
EncoderOutput as_constants(nn::Graph& g, const EncodedInput& in);

}  // namespace gcnn
