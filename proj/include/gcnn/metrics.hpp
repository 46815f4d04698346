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

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace gcnn {

using Yield = std::vector<std::string>;

// Fraction of exact yield matches. A missing prediction (decode failure)
// counts as a miss. Throws InputError on length mismatch.
double string_accuracy(std::span<const std::optional<Yield>> predictions,
                       std::span<const Yield> golds);

// Corpus BLEU-4 with counts pooled over the corpus, uniform weights, add-one
// smoothing for n >= 2 and the brevity penalty. Missing predictions count as
// empty candidates. Throws InputError for an empty corpus or length mismatch.
double bleu(std::span<const std::optional<Yield>> predictions, std::span<const Yield> golds);

double sentence_bleu(const Yield& candidate, const Yield& reference);

}  // namespace gcnn
