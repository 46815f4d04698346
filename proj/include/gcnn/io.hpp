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
#include <vector>

#include <json.hpp>

#include "gcnn/ast_node.hpp"
#include "gcnn/example.hpp"
#include "gcnn/grammar.hpp"
#include "gcnn/model.hpp"
#include "gcnn/train.hpp"

namespace gcnn {

using Json = nlohmann::ordered_json;

// Parse and schema failures throw InputError; unreadable or unwritable files
// throw IoError.

Json ast_to_json(const AstNode& node);
AstNode ast_from_json(const Json& j);

Json example_to_json(const Example& ex);
Example example_from_json(const Json& j);

// One record per line, optionally preceded by a header line.
std::vector<Example> read_dataset(const std::filesystem::path& path);
void write_dataset(const std::filesystem::path& path, std::span<const Example> examples);

std::string grammar_to_text(const Grammar& g);
Grammar grammar_from_text(const std::string& text);
void save_grammar(const Grammar& g, const std::filesystem::path& path);
Grammar load_grammar(const std::filesystem::path& path);

struct RunConfig {
  ModelConfig model;
  TrainConfig train;

  bool operator==(const RunConfig&) const = default;
};

// Flat key-value document. Missing keys keep their defaults; unknown keys are
// rejected.
Json config_to_json(const RunConfig& cfg);
RunConfig config_from_json(const Json& j);
RunConfig load_config(const std::filesystem::path& path);
void save_config(const RunConfig& cfg, const std::filesystem::path& path);

Json report_to_json(const EvalReport& report);
EvalReport report_from_json(const Json& j);

// Checkpoint with the run config and vocabulary embedded in the manifest.
void save_model(const Model& model, const std::filesystem::path& path,
                const TrainConfig& train);

struct LoadedModel {
  Model model;
  RunConfig config;
};

// Throws CheckpointIncompatible when the grammar does not match the one the
// checkpoint was trained with.
LoadedModel load_model(const std::filesystem::path& path, const Grammar& grammar);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& content);

}  // namespace gcnn
