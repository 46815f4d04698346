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
#include <functional>
#include <string>
#include <vector>

#include "gcnn/model.hpp"
#include "gcnn/nn/graph.hpp"

namespace gcnn {

struct GradcheckOptions {
  int dim = 4;
  int layers = 3;
  std::uint64_t seed = 7;
  double eps = 1e-5;
  double tolerance = 1e-4;
  // Test hook: perturbs analytic gradients so the check must fail.
  bool corrupt = false;
};

struct GradcheckRow {
  std::string group;
  double max_error = 0.0;
  int checked = 0;
};

struct GradcheckReport {
  std::vector<GradcheckRow> rows;

  double max_error() const;
  bool passed(double tolerance) const { return max_error() < tolerance; }
};

// |a - n| / max(|a|, |n|, floor).
double relative_error(double analytic, double numeric);

// Central differences over every scalar of every parameter. The loss builder
// is invoked on fresh graphs with the same seed, so dropout masks repeat.
GradcheckReport check_gradients(nn::ParamStore& store,
                                const std::function<nn::Var(nn::Graph&)>& loss,
                                const GradcheckOptions& opts, const std::string& prefix = "");

// Single-op checks on random inputs.
GradcheckReport gradcheck_ops(const GradcheckOptions& opts);

// Full teacher-forced loss with dropout on a program touching every head.
GradcheckReport gradcheck_model(const GradcheckOptions& opts, const Ablation& ablation);

}  // namespace gcnn
