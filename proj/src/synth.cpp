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


#include "gcnn/synth.hpp"

#include <algorithm>
#include <random>
#include <string>

#include "gcnn/ast_node.hpp"
#include "gcnn/error.hpp"

namespace gcnn {
namespace {

// rhs entries: >= 0 is a nonterminal of the next level, -1 is a variable.
using Rhs = std::vector<int>;

struct ToyGrammar {
  int levels = 0;
  int width = 0;
  // alternatives[level][k]
  std::vector<std::vector<std::vector<Rhs>>> alternatives;
};

int pick(std::mt19937_64& rng, int n) {
  return static_cast<int>(std::uniform_int_distribution<int>(0, n - 1)(rng));
}

ToyGrammar make_grammar(const SynthOptions& o, std::mt19937_64& rng) {
  ToyGrammar g;
  g.levels = o.depth;
  g.width = o.grammar_size;
  g.alternatives.resize(static_cast<std::size_t>(o.depth));
  for (int l = 0; l < o.depth; ++l) {
    for (int k = 0; k < o.grammar_size; ++k) {
      std::vector<Rhs> alts;
      for (int a = 0; a < 2; ++a) {
        Rhs rhs;
        const int len = 1 + pick(rng, 2);
        for (int i = 0; i < len; ++i) {
          const bool var = l + 1 == o.depth || pick(rng, 3) == 0;
          rhs.push_back(var ? -1 : pick(rng, o.grammar_size));
        }
        alts.push_back(std::move(rhs));
      }
      g.alternatives[static_cast<std::size_t>(l)].push_back(std::move(alts));
    }
  }
  return g;
}

std::string nt_name(int level, int k) {
  return "N" + std::to_string(level) + "_" + std::to_string(k);
}

std::string keyword(int level, int k, int alt) {
  return "k" + std::to_string(level) + std::to_string(k) + std::to_string(alt);
}

// Skeleton variables are numbered by first occurrence.
struct Skeleton {
  AstNode tree;
  std::vector<std::string> description;  // "$i" marks variable i
  int variables = 0;
  std::string function;
};

AstNode skeleton_nt(const ToyGrammar& g, int level, int k, std::mt19937_64& rng,
                    std::vector<std::string>& desc, int& vars) {
  const auto& alts = g.alternatives[static_cast<std::size_t>(level)][static_cast<std::size_t>(k)];
  const int alt = pick(rng, static_cast<int>(alts.size()));
  desc.push_back(keyword(level, k, alt));
  AstNode node = make_nonterminal(nt_name(level, k), NodeClass::structural);
  for (int c : alts[static_cast<std::size_t>(alt)]) {
    if (c >= 0) {
      node.children.push_back(skeleton_nt(g, level + 1, c, rng, desc, vars));
      continue;
    }
    // Reuse an earlier variable now and then.
    int v = vars > 0 && pick(rng, 3) == 0 ? pick(rng, vars) : vars++;
    desc.push_back("$" + std::to_string(v));
    AstNode var = make_nonterminal("Var", NodeClass::variable,
                                   {make_terminal("identifier", "$" + std::to_string(v))});
    node.children.push_back(std::move(var));
  }
  return node;
}

Skeleton make_skeleton(const ToyGrammar& g, const SynthOptions& o, std::mt19937_64& rng) {
  Skeleton s;
  const int funcs = 1 + pick(rng, o.functions);
  std::vector<AstNode> defs;
  s.description.push_back("module" + std::to_string(funcs));
  for (int f = 0; f < funcs; ++f) {
    const std::string fname = "f" + std::to_string(pick(rng, 4));
    s.description.push_back("def");
    s.description.push_back(fname);
    const int top = pick(rng, g.width);
    AstNode body = skeleton_nt(g, 0, top, rng, s.description, s.variables);
    AstNode def = make_nonterminal(
        "FunctionDef", NodeClass::structural,
        {make_nonterminal("FuncName", NodeClass::function_name, {make_terminal("name", fname)}),
         std::move(body)});
    def.scope = fname;
    defs.push_back(std::move(def));
  }
  s.tree = make_nonterminal("Module", NodeClass::structural, std::move(defs));
  return s;
}

void bind_values(AstNode& n, const std::vector<std::string>& values) {
  if (n.terminal && n.symbol.name == "identifier") {
    n.terminal = values[static_cast<std::size_t>(std::stoi(n.terminal->substr(1)))];
  }
  for (auto& c : n.children) bind_values(c, values);
}

Example instantiate(const Skeleton& s, const std::string& id,
                    const std::vector<std::string>& pool, std::mt19937_64& rng) {
  if (static_cast<int>(pool.size()) < s.variables) {
    throw InputError("identifier pool smaller than the variables of a program");
  }
  std::vector<std::string> shuffled = pool;
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  shuffled.resize(static_cast<std::size_t>(s.variables));
  Example ex;
  ex.id = id;
  ex.ast = s.tree;
  bind_values(ex.ast, shuffled);
  std::string text;
  for (const auto& w : s.description) {
    if (!text.empty()) text += ' ';
    text += w[0] == '$' ? shuffled[static_cast<std::size_t>(std::stoi(w.substr(1)))] : w;
  }
  ex.description = std::move(text);
  for (int v = 0; v < s.variables; ++v) {
    ex.slots.push_back({"var" + std::to_string(v), shuffled[static_cast<std::size_t>(v)]});
  }
  return ex;
}

std::vector<std::string> pool(const std::string& prefix, int n) {
  std::vector<std::string> out;
  for (int i = 0; i < n; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

void check(const SynthOptions& o) {
  if (o.grammar_size < 1 || o.depth < 1 || o.count < 0 || o.functions < 1 ||
      o.identifiers < 1) {
    throw InputError("synthetic data sizes must be positive");
  }
}

}  // namespace

std::vector<Example> synth_dataset(const SynthOptions& opts) {
  check(opts);
  std::mt19937_64 rng(opts.seed);
  const ToyGrammar g = make_grammar(opts, rng);
  const auto names = pool("v", opts.identifiers);
  std::vector<Example> out;
  for (int i = 0; i < opts.count; ++i) {
    Skeleton s;
    do {
      s = make_skeleton(g, opts, rng);
    } while (s.variables > opts.identifiers);
    out.push_back(instantiate(s, "synth-" + std::to_string(i), names, rng));
  }
  return out;
}

SynthSplit synth_copy_split(const SynthOptions& opts, int templates, int train_count,
                            int test_count) {
  check(opts);
  if (templates < 1 || train_count < 0 || test_count < 0) {
    throw InputError("copy split sizes must be positive");
  }
  std::mt19937_64 rng(opts.seed);
  const ToyGrammar g = make_grammar(opts, rng);
  std::vector<Skeleton> skeletons;
  while (static_cast<int>(skeletons.size()) < templates) {
    Skeleton s = make_skeleton(g, opts, rng);
    if (s.variables <= opts.identifiers) skeletons.push_back(std::move(s));
  }
  const auto train_names = pool("a", opts.identifiers);
  const auto test_names = pool("b", opts.identifiers);
  SynthSplit out;
  for (int i = 0; i < train_count; ++i) {
    const auto& s = skeletons[static_cast<std::size_t>(i % templates)];
    out.train.push_back(instantiate(s, "train-" + std::to_string(i), train_names, rng));
  }
  for (int i = 0; i < test_count; ++i) {
    const auto& s = skeletons[static_cast<std::size_t>(i % templates)];
    out.test.push_back(instantiate(s, "test-" + std::to_string(i), test_names, rng));
  }
  return out;
}

}  // namespace gcnn
