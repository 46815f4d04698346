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


#include "gcnn/search.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "gcnn/error.hpp"

namespace gcnn {
namespace {

struct Candidate {
  int parent;  // index into the current beam
  int action;  // -1 keeps a complete hypothesis
  double log_prob;
  double step;
};

}  // namespace

DecodeResult beam_search(const Model& model, std::span<const int> token_ids,
                         std::vector<Slot> slots, const SearchOptions& options) {
  if (options.beam < 1) throw InputError("beam size must be positive");
  if (options.max_steps < 1) throw InputError("max_steps must be positive");
  const EncodedInput enc = encode_input(model, token_ids);
  std::vector<Hypothesis> beam{{initial_state(model.grammar(), std::move(slots)), 0.0, {}}};
  // The greedy path runs next to the beam so the result is never worse than
  // stepwise argmax.
  std::optional<Hypothesis> greedy = beam.front();
  int dead_ends = 0;
  const auto beam_size = static_cast<std::size_t>(options.beam);

  for (int step = 0; step < options.max_steps; ++step) {
    if (greedy && !greedy->complete()) {
      try {
        RuleDistribution dist = predict(model, greedy->state, enc);
        const auto best = static_cast<std::size_t>(
            std::max_element(dist.probs.begin(), dist.probs.end()) - dist.probs.begin());
        greedy->state = advance(model, greedy->state, static_cast<int>(best));
        greedy->log_prob += dist.log_probs[best];
        greedy->step_log_probs.push_back(dist.log_probs[best]);
      } catch (const DeadEndError&) {
        ++dead_ends;
        greedy.reset();
      }
    }
    if (std::all_of(beam.begin(), beam.end(), [](const Hypothesis& h) { return h.complete(); })) {
      if (!greedy || greedy->complete()) break;
      continue;
    }
    std::vector<Candidate> cands;
    for (std::size_t i = 0; i < beam.size(); ++i) {
      const Hypothesis& h = beam[i];
      if (h.complete()) {
        cands.push_back({static_cast<int>(i), -1, h.log_prob, 0.0});
        continue;
      }
      RuleDistribution dist;
      try {
        dist = predict(model, h.state, enc);
      } catch (const DeadEndError&) {
        ++dead_ends;
        continue;
      }
      std::vector<Candidate> local;
      for (std::size_t a = 0; a < dist.probs.size(); ++a) {
        if (dist.probs[a] <= 0.0) continue;
        local.push_back({static_cast<int>(i), static_cast<int>(a),
                         h.log_prob + dist.log_probs[a], dist.log_probs[a]});
      }
      std::stable_sort(local.begin(), local.end(), [](const Candidate& x, const Candidate& y) {
        return x.log_prob > y.log_prob;
      });
      if (local.size() > beam_size) local.resize(beam_size);
      cands.insert(cands.end(), local.begin(), local.end());
    }
    std::stable_sort(cands.begin(), cands.end(), [](const Candidate& x, const Candidate& y) {
      return x.log_prob > y.log_prob;
    });
    if (cands.size() > beam_size) cands.resize(beam_size);
    if (cands.empty()) {
      beam.clear();
      continue;
    }
    std::vector<Hypothesis> next;
    next.reserve(cands.size());
    for (const auto& c : cands) {
      const Hypothesis& parent = beam[static_cast<std::size_t>(c.parent)];
      if (c.action < 0) {
        next.push_back(parent);
        continue;
      }
      Hypothesis h{advance(model, parent.state, c.action), c.log_prob, parent.step_log_probs};
      h.step_log_probs.push_back(c.step);
      next.push_back(std::move(h));
    }
    beam = std::move(next);
  }

  DecodeResult out;
  for (auto& h : beam) {
    if (h.complete()) out.hypotheses.push_back(std::move(h));
  }
  if (greedy && greedy->complete() &&
      std::none_of(out.hypotheses.begin(), out.hypotheses.end(), [&](const Hypothesis& h) {
        return h.state.rule_trace == greedy->state.rule_trace;
      })) {
    out.hypotheses.push_back(std::move(*greedy));
    std::stable_sort(out.hypotheses.begin(), out.hypotheses.end(),
                     [](const Hypothesis& x, const Hypothesis& y) { return x.log_prob > y.log_prob; });
  }
  if (out.hypotheses.empty()) {
    out.diagnostic = beam.empty() && !greedy
                         ? std::string("every hypothesis reached a dead end")
                         : "no complete hypothesis within " + std::to_string(options.max_steps) +
                               " steps";
    if (dead_ends > 0) out.diagnostic += " (" + std::to_string(dead_ends) + " dead ends pruned)";
  }
  return out;
}

}  // namespace gcnn
