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

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gcnn/ast_node.hpp"

namespace gcnn {

// Named value the variable head may copy into a terminal leaf.
struct Slot {
  std::string name;
  std::string value;

  bool operator==(const Slot&) const = default;
};

// One field of a semi-structured description (card name, cost, text, ...).
struct Field {
  std::string name;
  std::string value;

  bool operator==(const Field&) const = default;
};

// Reserved token between flattened fields.
inline constexpr std::string_view kFieldSeparator = "<sep>";

// Field names and values tokenized in field order, fields separated by
// kFieldSeparator.
std::vector<std::string> flatten_fields(std::span<const Field> fields);

struct Example {
  std::string id;
  std::string description;
  // When non-empty, the encoder reads the flattened fields instead of the
  // description.
  std::vector<Field> fields;
  std::vector<Slot> slots;
  AstNode ast;

  bool operator==(const Example&) const = default;
};

std::vector<std::string> example_tokens(const Example& ex);

}  // namespace gcnn
