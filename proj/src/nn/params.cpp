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

#include "gcnn/nn/params.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <json.hpp>

#include "gcnn/error.hpp"

namespace gcnn::nn {

namespace {

constexpr std::string_view kCheckpointHeader = "gcnn-checkpoint 1";

void round_to_float(Tensor& t) {
  for (Eigen::Index i = 0; i < t.size(); ++i) {
    t.data()[i] = static_cast<double>(static_cast<float>(t.data()[i]));
  }
}

void write_values(std::string& out, const Tensor& t, int precision) {
  for (Eigen::Index i = 0; i < t.size(); ++i) {
    if (precision == 32) {
      auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(t.data()[i]));
      for (int b = 0; b < 4; ++b) out.push_back(static_cast<char>((bits >> (8 * b)) & 0xff));
    } else {
      auto bits = std::bit_cast<std::uint64_t>(t.data()[i]);
      for (int b = 0; b < 8; ++b) out.push_back(static_cast<char>((bits >> (8 * b)) & 0xff));
    }
  }
}

void read_values(const std::string& in, std::size_t& pos, Tensor& t, int precision) {
  for (Eigen::Index i = 0; i < t.size(); ++i) {
    if (precision == 32) {
      std::uint32_t bits = 0;
      for (int b = 0; b < 4; ++b) {
        bits |= static_cast<std::uint32_t>(static_cast<unsigned char>(in[pos++])) << (8 * b);
      }
      t.data()[i] = static_cast<double>(std::bit_cast<float>(bits));
    } else {
      std::uint64_t bits = 0;
      for (int b = 0; b < 8; ++b) {
        bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[pos++])) << (8 * b);
      }
      t.data()[i] = std::bit_cast<double>(bits);
    }
  }
}

}  // namespace

std::string_view to_string(ParamKind kind) {
  switch (kind) {
    case ParamKind::weight:
      return "weight";
    case ParamKind::mlp_weight:
      return "mlp_weight";
    case ParamKind::bias:
      return "bias";
    case ParamKind::embedding:
      return "embedding";
  }
  return "weight";
}

ParamKind parse_param_kind(std::string_view text) {
  if (text == "weight") return ParamKind::weight;
  if (text == "mlp_weight") return ParamKind::mlp_weight;
  if (text == "bias") return ParamKind::bias;
  if (text == "embedding") return ParamKind::embedding;
  throw CheckpointIncompatible("unknown parameter kind '" + std::string(text) + "'");
}

ParamStore::ParamStore(int precision) : precision_(precision) {
  if (precision != 32 && precision != 64) {
    throw InputError("precision must be 32 or 64");
  }
}

int ParamStore::add(std::string name, ParamKind kind, Tensor init) {
  if (index_.count(name)) throw InputError("duplicate parameter '" + name + "'");
  const int id = static_cast<int>(params_.size());
  index_.emplace(name, id);
  Parameter p;
  p.name = std::move(name);
  p.kind = kind;
  p.first_moment = Tensor::Zero(init.rows(), init.cols());
  p.second_moment = Tensor::Zero(init.rows(), init.cols());
  p.value = std::move(init);
  if (precision_ == 32) round_to_float(p.value);
  params_.push_back(std::move(p));
  return id;
}

int ParamStore::index(std::string_view name) const {
  auto id = find(name);
  if (!id) throw InputError("unknown parameter '" + std::string(name) + "'");
  return *id;
}

std::optional<int> ParamStore::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::string> ParamStore::names() const {
  std::vector<std::string> out;
  out.reserve(params_.size());
  for (const auto& p : params_) out.push_back(p.name);
  return out;
}

std::size_t ParamStore::scalar_count() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += static_cast<std::size_t>(p.value.size());
  return n;
}

void ParamStore::quantize() {
  if (precision_ != 32) return;
  for (auto& p : params_) {
    round_to_float(p.value);
    round_to_float(p.first_moment);
    round_to_float(p.second_moment);
  }
}

bool ParamStore::operator==(const ParamStore& other) const {
  if (precision_ != other.precision_ || step_ != other.step_ ||
      params_.size() != other.params_.size()) {
    return false;
  }
  for (std::size_t i = 0; i < params_.size(); ++i) {
    const auto& a = params_[i];
    const auto& b = other.params_[i];
    if (a.name != b.name || a.kind != b.kind || a.value != b.value ||
        a.first_moment != b.first_moment || a.second_moment != b.second_moment) {
      return false;
    }
  }
  return true;
}

Tensor glorot_uniform(int rows, int cols, std::mt19937_64& rng) {
  return uniform(rows, cols, std::sqrt(6.0 / static_cast<double>(rows + cols)), rng);
}

Tensor uniform(int rows, int cols, double bound, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-bound, bound);
  Tensor t(rows, cols);
  for (Eigen::Index i = 0; i < t.size(); ++i) t.data()[i] = dist(rng);
  return t;
}

Gradients::Gradients(const ParamStore& store)
    : store_(&store), grads_(static_cast<std::size_t>(store.size())) {}

Tensor& Gradients::at(int param) {
  Tensor& g = grads_.at(static_cast<std::size_t>(param));
  if (g.size() == 0) {
    const Tensor& v = store_->at(param).value;
    g = Tensor::Zero(v.rows(), v.cols());
  }
  return g;
}

void Gradients::add(const Gradients& other) {
  for (int i = 0; i < size(); ++i) {
    if (other.touched(i)) at(i) += other.peek(i);
  }
}

void Gradients::scale(double factor) {
  for (auto& g : grads_) {
    if (g.size()) g *= factor;
  }
}

void Gradients::clear() {
  for (auto& g : grads_) g.resize(0, 0);
}

void adam_step(ParamStore& store, const Gradients& grads, const AdamConfig& cfg) {
  const long t = store.step() + 1;
  const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(t));
  const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(t));
  for (int i = 0; i < store.size(); ++i) {
    Parameter& p = store.at(i);
    if (grads.touched(i)) {
      const Tensor& g = grads.peek(i);
      if (g.rows() != p.value.rows() || g.cols() != p.value.cols()) {
        shape_mismatch("adam_step(" + p.name + ")", p.value, g);
      }
      p.first_moment = cfg.beta1 * p.first_moment + (1.0 - cfg.beta1) * g;
      p.second_moment =
          cfg.beta2 * p.second_moment + (1.0 - cfg.beta2) * g.cwiseProduct(g);
    } else {
      p.first_moment *= cfg.beta1;
      p.second_moment *= cfg.beta2;
    }
    p.value.array() -= cfg.lr * (p.first_moment.array() / c1) /
                       ((p.second_moment.array() / c2).sqrt() + cfg.eps);
  }
  store.set_step(t);
  store.quantize();
}

void save_params(const ParamStore& store, const std::filesystem::path& path,
                 const CheckpointMeta& meta, bool include_optimizer) {
  nlohmann::json manifest;
  manifest["format"] = "gcnn-checkpoint";
  manifest["version"] = 1;
  manifest["precision"] = store.precision();
  manifest["seed"] = meta.seed;
  manifest["config_hash"] = meta.config_hash;
  manifest["step"] = store.step();
  manifest["optimizer"] = include_optimizer;
  manifest["params"] = nlohmann::json::array();
  for (int i = 0; i < store.size(); ++i) {
    const auto& p = store.at(i);
    manifest["params"].push_back({{"name", p.name},
                                  {"kind", to_string(p.kind)},
                                  {"shape", shape_of(p.value)}});
  }
  try {
    manifest["extra"] = nlohmann::json::parse(meta.extra_json);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("checkpoint metadata is not JSON: ") + e.what());
  }

  std::string blob;
  blob.append(kCheckpointHeader);
  blob.push_back('\n');
  blob.append(manifest.dump());
  blob.push_back('\n');
  for (int i = 0; i < store.size(); ++i) write_values(blob, store.at(i).value, store.precision());
  if (include_optimizer) {
    for (int i = 0; i < store.size(); ++i) {
      write_values(blob, store.at(i).first_moment, store.precision());
    }
    for (int i = 0; i < store.size(); ++i) {
      write_values(blob, store.at(i).second_moment, store.precision());
    }
  }

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write checkpoint " + path.string());
  out.write(blob.data(), static_cast<std::streamsize>(blob.size()));
  if (!out) throw IoError("failed writing checkpoint " + path.string());
}

LoadedCheckpoint load_params(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read checkpoint " + path.string());
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  const auto header_end = data.find('\n');
  if (header_end == std::string::npos ||
      std::string_view(data).substr(0, header_end) != kCheckpointHeader) {
    throw CheckpointIncompatible(path.string() + ": not a version-1 gcnn checkpoint");
  }
  const auto manifest_end = data.find('\n', header_end + 1);
  if (manifest_end == std::string::npos) {
    throw CheckpointIncompatible(path.string() + ": truncated manifest");
  }

  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(data.substr(header_end + 1, manifest_end - header_end - 1));
  } catch (const nlohmann::json::exception& e) {
    throw CheckpointIncompatible(path.string() + ": bad manifest: " + e.what());
  }

  try {
    if (manifest.at("format") != "gcnn-checkpoint" || manifest.at("version") != 1) {
      throw CheckpointIncompatible(path.string() + ": unsupported format/version");
    }
    const int precision = manifest.at("precision").get<int>();
    if (precision != 32 && precision != 64) {
      throw CheckpointIncompatible(path.string() + ": bad precision");
    }
    LoadedCheckpoint out{ParamStore(precision), {}, manifest.at("optimizer").get<bool>()};
    out.meta.seed = manifest.at("seed").get<std::uint64_t>();
    out.meta.config_hash = manifest.at("config_hash").get<std::string>();
    out.meta.extra_json = manifest.value("extra", nlohmann::json::object()).dump();
    out.store.set_step(manifest.at("step").get<long>());

    std::size_t scalars = 0;
    for (const auto& entry : manifest.at("params")) {
      auto shape = entry.at("shape").get<std::vector<int>>();
      if (shape.size() != 2 || shape[0] <= 0 || shape[1] <= 0) {
        throw CheckpointIncompatible(path.string() + ": bad shape in manifest");
      }
      out.store.add(entry.at("name").get<std::string>(),
                    parse_param_kind(entry.at("kind").get<std::string>()),
                    Tensor::Zero(shape[0], shape[1]));
      scalars += static_cast<std::size_t>(shape[0]) * static_cast<std::size_t>(shape[1]);
    }
    const std::size_t width = precision == 32 ? 4 : 8;
    const std::size_t expected = scalars * width * (out.has_optimizer ? 3 : 1);
    std::size_t pos = manifest_end + 1;
    if (data.size() - pos != expected) {
      throw CheckpointIncompatible(path.string() + ": expected " + std::to_string(expected) +
                                   " payload bytes, found " + std::to_string(data.size() - pos));
    }
    for (int i = 0; i < out.store.size(); ++i) read_values(data, pos, out.store.at(i).value, precision);
    if (out.has_optimizer) {
      for (int i = 0; i < out.store.size(); ++i) {
        read_values(data, pos, out.store.at(i).first_moment, precision);
      }
      for (int i = 0; i < out.store.size(); ++i) {
        read_values(data, pos, out.store.at(i).second_moment, precision);
      }
    }
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw CheckpointIncompatible(path.string() + ": malformed manifest: " + e.what());
  } catch (const InputError& e) {
    throw CheckpointIncompatible(path.string() + ": " + e.what());
  }
}

}  // namespace gcnn::nn
