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


#include "gcnn/encoder.hpp"

#include "gcnn/error.hpp"

namespace gcnn {

std::vector<nn::Var> shortcut_cnn_layers(nn::Var input, const CnnParams& params,
                                         int window) {
  std::vector<nn::Var> ys{input};
  nn::Graph& g = *input.graph;
  for (std::size_t l = 1; l <= params.layers.size(); ++l) {
    std::optional<nn::Var> shortcut;
    if (l % 2 == 0) shortcut = ys[l - 2];
    ys.push_back(nn::conv_layer(ys[l - 1], g.param(params.layers[l - 1]), shortcut, window));
  }
  return ys;
}

nn::Var shortcut_cnn(nn::Var input, const CnnParams& params, int window) {
  if (params.layers.empty()) return input;
  return shortcut_cnn_layers(input, params, window).back();
}

EncoderOutput encode(nn::Graph& g, const Model& model, std::span<const int> token_ids) {
  if (token_ids.empty()) throw InputError("encoder input is empty");
  for (int t : token_ids) {
    if (t < 0 || t >= model.vocab().size()) {
      throw InputError("token id " + std::to_string(t) + " outside the vocabulary");
    }
  }
  nn::Var x = nn::embedding_lookup(g, model.encoder_embed(), token_ids);
  nn::Var y = shortcut_cnn(x, model.encoder_cnn(), model.config().window);
  return {y, nn::max_over_rows(y)};
}

EncodedInput encode_input(const Model& model, std::span<const int> token_ids) {
  nn::Graph g(model.params(), {.training = false, .record = false});
  auto out = encode(g, model, token_ids);
  return {out.features.value(), out.controller.value()};
}

EncoderOutput as_constants(nn::Graph& g, const EncodedInput& in) {
  return {g.constant(in.features), g.constant(in.controller)};
}

}  // namespace gcnn
