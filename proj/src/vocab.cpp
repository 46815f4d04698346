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


#include "gcnn/vocab.hpp"

#include <cctype>
#include <fstream>

#include "gcnn/error.hpp"

namespace gcnn {

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (char raw : text) {
    auto c = static_cast<unsigned char>(raw);
    if (std::isspace(c) || std::ispunct(c)) {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
      continue;
    }
    cur.push_back(static_cast<char>(std::tolower(c)));
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  if (out.empty()) out.emplace_back(TokenVocab::kPadToken);
  return out;
}

TokenVocab::TokenVocab() {
  add(std::string(kPadToken));
  add(std::string(kUnkToken));
}

void TokenVocab::add(const std::string& token) {
  if (index_.contains(token)) return;
  index_.emplace(token, size());
  tokens_.push_back(token);
}

TokenVocab TokenVocab::build(std::span<const std::vector<std::string>> token_lists) {
  TokenVocab v;
  for (const auto& list : token_lists) {
    for (const auto& t : list) v.add(t);
  }
  return v;
}

TokenVocab TokenVocab::from_tokens(std::vector<std::string> tokens) {
  if (tokens.size() < 2 || tokens[0] != kPadToken || tokens[1] != kUnkToken) {
    throw InputError("vocabulary must start with " + std::string(kPadToken) +
                     " and " + std::string(kUnkToken));
  }
  TokenVocab v;
  for (std::size_t i = 2; i < tokens.size(); ++i) {
    if (tokens[i].empty()) throw InputError("empty vocabulary token at line " + std::to_string(i + 1));
    if (v.index_.contains(tokens[i])) {
      throw InputError("duplicate vocabulary token '" + tokens[i] + "'");
    }
    v.add(tokens[i]);
  }
  return v;
}

int TokenVocab::index(std::string_view token) const {
  auto it = index_.find(std::string(token));
  return it == index_.end() ? kUnk : it->second;
}

std::vector<int> TokenVocab::encode(std::span<const std::string> tokens) const {
  std::vector<int> ids;
  ids.reserve(tokens.size());
  for (const auto& t : tokens) ids.push_back(index(t));
  if (ids.empty()) ids.push_back(kPad);
  return ids;
}

void TokenVocab::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  for (const auto& t : tokens_) out << t << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

TokenVocab TokenVocab::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(in, line)) tokens.push_back(line);
  return from_tokens(std::move(tokens));
}

}  // namespace gcnn
