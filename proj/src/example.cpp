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


#include "gcnn/example.hpp"

#include "gcnn/vocab.hpp"

namespace gcnn {

std::vector<std::string> flatten_fields(std::span<const Field> fields) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) out.emplace_back(kFieldSeparator);
    for (const auto* text : {&fields[i].name, &fields[i].value}) {
      auto toks = tokenize(*text);
      if (toks.size() == 1 && toks[0] == TokenVocab::kPadToken) continue;
      out.insert(out.end(), toks.begin(), toks.end());
    }
  }
  if (out.empty()) out.emplace_back(TokenVocab::kPadToken);
  return out;
}

std::vector<std::string> example_tokens(const Example& ex) {
  if (!ex.fields.empty()) return flatten_fields(ex.fields);
  return tokenize(ex.description);
}

}  // namespace gcnn
