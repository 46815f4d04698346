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

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace gcnn {

// Lowercases ASCII letters, turns ASCII punctuation into spaces and splits on
// whitespace. Input without any token yields the single PAD token.
std::vector<std::string> tokenize(std::string_view text);

// Input-token vocabulary. Index 0 is PAD and index 1 is UNK.
class TokenVocab {
 public:
  static constexpr int kPad = 0;
  static constexpr int kUnk = 1;
  static constexpr std::string_view kPadToken = "<pad>";
  static constexpr std::string_view kUnkToken = "<unk>";

  TokenVocab();

  // Tokens in first-occurrence order.
  static TokenVocab build(std::span<const std::vector<std::string>> token_lists);
  static TokenVocab from_tokens(std::vector<std::string> tokens);

  // UNK for unknown tokens.
  int index(std::string_view token) const;
  std::vector<int> encode(std::span<const std::string> tokens) const;

  const std::vector<std::string>& tokens() const { return tokens_; }
  int size() const { return static_cast<int>(tokens_.size()); }

  // One token per line in index order.
  void save(const std::filesystem::path& path) const;
  static TokenVocab load(const std::filesystem::path& path);

  bool operator==(const TokenVocab& other) const { return tokens_ == other.tokens_; }

 private:
  void add(const std::string& token);

  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> index_;
};

}  // namespace gcnn
