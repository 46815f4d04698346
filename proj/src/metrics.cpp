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


#include "gcnn/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>

#include "gcnn/error.hpp"

namespace gcnn {
namespace {

constexpr int kMaxOrder = 4;

struct Counts {
  std::array<double, kMaxOrder> matches{};
  std::array<double, kMaxOrder> totals{};
  double cand_len = 0;
  double ref_len = 0;
};

void count_pair(const Yield& cand, const Yield& ref, Counts& c) {
  c.cand_len += static_cast<double>(cand.size());
  c.ref_len += static_cast<double>(ref.size());
  for (int n = 1; n <= kMaxOrder; ++n) {
    std::map<std::vector<std::string>, int> ref_grams;
    for (std::size_t i = 0; i + n <= ref.size(); ++i) {
      ++ref_grams[Yield(ref.begin() + i, ref.begin() + i + n)];
    }
    std::map<std::vector<std::string>, int> cand_grams;
    for (std::size_t i = 0; i + n <= cand.size(); ++i) {
      ++cand_grams[Yield(cand.begin() + i, cand.begin() + i + n)];
    }
    for (const auto& [gram, k] : cand_grams) {
      auto it = ref_grams.find(gram);
      if (it != ref_grams.end()) c.matches[n - 1] += std::min(k, it->second);
      c.totals[n - 1] += k;
    }
  }
}

double score(const Counts& c) {
  if (c.cand_len == 0) return c.ref_len == 0 ? 1.0 : 0.0;
  if (c.matches[0] == 0) return 0.0;
  double log_sum = std::log(c.matches[0] / c.totals[0]);
  for (int n = 2; n <= kMaxOrder; ++n) {
    log_sum += std::log((c.matches[n - 1] + 1.0) / (c.totals[n - 1] + 1.0));
  }
  double bp = c.cand_len < c.ref_len ? std::exp(1.0 - c.ref_len / c.cand_len) : 1.0;
  return bp * std::exp(log_sum / kMaxOrder);
}

void check_aligned(std::size_t a, std::size_t b) {
  if (a != b) {
    throw InputError("metric inputs differ in length: " + std::to_string(a) + " predictions, " +
                     std::to_string(b) + " references");
  }
}

}  // namespace

double string_accuracy(std::span<const std::optional<Yield>> predictions,
                       std::span<const Yield> golds) {
  check_aligned(predictions.size(), golds.size());
  if (golds.empty()) throw InputError("string accuracy of an empty corpus");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < golds.size(); ++i) {
    if (predictions[i] && *predictions[i] == golds[i]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(golds.size());
}

double bleu(std::span<const std::optional<Yield>> predictions, std::span<const Yield> golds) {
  check_aligned(predictions.size(), golds.size());
  if (golds.empty()) throw InputError("BLEU of an empty corpus");
  Counts c;
  static const Yield kEmpty;
  for (std::size_t i = 0; i < golds.size(); ++i) {
    count_pair(predictions[i] ? *predictions[i] : kEmpty, golds[i], c);
  }
  return score(c);
}

double sentence_bleu(const Yield& candidate, const Yield& reference) {
  Counts c;
  count_pair(candidate, reference, c);
  return score(c);
}

}  // namespace gcnn
