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

#include "gcnn/nn/tensor.hpp"

#include "gcnn/error.hpp"

namespace gcnn::nn {

std::vector<int> shape_of(const Tensor& t) {
  return {static_cast<int>(t.rows()), static_cast<int>(t.cols())};
}

std::string shape_string(const Tensor& t) {
  return "(" + std::to_string(t.rows()) + ", " + std::to_string(t.cols()) + ")";
}

void check_finite(const Tensor& t, std::string_view op) {
  if (!t.allFinite()) {
    throw NumericFault("non-finite value produced by " + std::string(op) + " " +
                       shape_string(t));
  }
}

void shape_mismatch(std::string_view op, const Tensor& a, const Tensor& b) {
  throw ShapeError(std::string(op) + ": incompatible shapes " + shape_string(a) +
                   " and " + shape_string(b));
}

}  // namespace gcnn::nn
