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

#include <Eigen/Core>
#include <string>
#include <string_view>
#include <vector>

namespace gcnn::nn {

// Dense row-major matrix. Vectors are 1 x n rows. Arithmetic is carried out
// in double precision; 32-bit parameter storage is emulated by rounding (see
// ParamStore).
using Tensor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

std::vector<int> shape_of(const Tensor& t);
std::string shape_string(const Tensor& t);

// Throws NumericFault naming the op when any value is NaN or infinite.
void check_finite(const Tensor& t, std::string_view op);

// Throws ShapeError naming both shapes.
[[noreturn]] void shape_mismatch(std::string_view op, const Tensor& a, const Tensor& b);

}  // namespace gcnn::nn
