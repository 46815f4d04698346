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


#include "gcnn/io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "gcnn/error.hpp"

namespace gcnn {
namespace {

constexpr std::string_view kDatasetFormat = "gcnn-dataset";
constexpr std::string_view kGrammarFormat = "gcnn-grammar";
constexpr std::string_view kReportFormat = "gcnn-report";
constexpr int kVersion = 1;

[[noreturn]] void bad(const std::string& what) { throw InputError(what); }

const Json& field(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object()) bad(where + ": expected an object");
  auto it = j.find(key);
  if (it == j.end()) bad(where + ": missing '" + key + "'");
  return *it;
}

std::string str(const Json& j, const std::string& where) {
  if (!j.is_string()) bad(where + ": expected a string");
  return j.get<std::string>();
}

void check_keys(const Json& j, std::initializer_list<std::string_view> allowed,
                const std::string& where) {
  if (!j.is_object()) bad(where + ": expected an object");
  for (const auto& [k, v] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), k) == allowed.end()) {
      bad(where + ": unknown key '" + k + "'");
    }
  }
}

void check_header(const Json& j, std::string_view format, const std::string& where) {
  if (str(field(j, "format", where), where + ".format") != format) {
    bad(where + ": format is not " + std::string(format));
  }
  const Json& v = field(j, "version", where);
  if (!v.is_number_integer() || v.get<int>() != kVersion) {
    bad(where + ": unsupported version");
  }
}

AstNode ast_from(const Json& j, const std::string& where) {
  check_keys(j, {"symbol", "node_class", "terminal", "scope", "children"}, where);
  AstNode n;
  n.symbol.name = str(field(j, "symbol", where), where + ".symbol");
  if (n.symbol.name.empty()) bad(where + ": empty symbol name");
  if (auto it = j.find("node_class"); it != j.end()) {
    try {
      n.symbol.node_class = parse_node_class(str(*it, where + ".node_class"));
    } catch (const StructuralInputError& e) {
      bad(where + ": " + e.what());
    }
  }
  if (auto it = j.find("terminal"); it != j.end() && !it->is_null()) {
    n.symbol.kind = SymbolKind::terminal;
    n.terminal = str(*it, where + ".terminal");
  }
  if (auto it = j.find("scope"); it != j.end() && !it->is_null()) {
    n.scope = str(*it, where + ".scope");
  }
  if (auto it = j.find("children"); it != j.end()) {
    if (!it->is_array()) bad(where + ".children: expected an array");
    if (n.symbol.kind == SymbolKind::terminal && !it->empty()) {
      bad(where + ": terminal node has children");
    }
    for (std::size_t i = 0; i < it->size(); ++i) {
      n.children.push_back(ast_from((*it)[i], where + "/" + std::to_string(i)));
    }
  }
  return n;
}

Example example_from(const Json& j, const std::string& where) {
  check_keys(j, {"id", "description", "fields", "slots", "ast"}, where);
  Example ex;
  ex.id = str(field(j, "id", where), where + ".id");
  if (auto it = j.find("description"); it != j.end()) {
    ex.description = str(*it, where + ".description");
  }
  if (auto it = j.find("fields"); it != j.end()) {
    if (!it->is_array()) bad(where + ".fields: expected an array");
    for (const auto& f : *it) {
      check_keys(f, {"name", "value"}, where + ".fields");
      ex.fields.push_back({str(field(f, "name", where), where + ".fields.name"),
                           str(field(f, "value", where), where + ".fields.value")});
    }
  }
  if (auto it = j.find("slots"); it != j.end()) {
    if (!it->is_array()) bad(where + ".slots: expected an array");
    std::set<std::string> names;
    for (const auto& s : *it) {
      check_keys(s, {"name", "value"}, where + ".slots");
      Slot slot{str(field(s, "name", where), where + ".slots.name"),
                str(field(s, "value", where), where + ".slots.value")};
      if (!names.insert(slot.name).second) bad(where + ": duplicate slot '" + slot.name + "'");
      ex.slots.push_back(std::move(slot));
    }
  }
  ex.ast = ast_from(field(j, "ast", where), where + ".ast");
  return ex;
}

Json parse_json(const std::string& text, const std::string& where) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    bad(where + ": " + e.what());
  }
}

}  // namespace

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("read failed: " + path.string());
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << content;
  if (!out) throw IoError("write failed: " + path.string());
}

Json ast_to_json(const AstNode& node) {
  Json j;
  j["symbol"] = node.symbol.name;
  j["node_class"] = std::string(to_string(node.symbol.node_class));
  if (node.terminal) j["terminal"] = *node.terminal;
  if (node.scope) j["scope"] = *node.scope;
  Json kids = Json::array();
  for (const auto& c : node.children) kids.push_back(ast_to_json(c));
  j["children"] = std::move(kids);
  return j;
}

AstNode ast_from_json(const Json& j) { return ast_from(j, "ast"); }

Json example_to_json(const Example& ex) {
  Json j;
  j["id"] = ex.id;
  j["description"] = ex.description;
  if (!ex.fields.empty()) {
    Json fs = Json::array();
    for (const auto& f : ex.fields) fs.push_back({{"name", f.name}, {"value", f.value}});
    j["fields"] = std::move(fs);
  }
  Json slots = Json::array();
  for (const auto& s : ex.slots) slots.push_back({{"name", s.name}, {"value", s.value}});
  j["slots"] = std::move(slots);
  j["ast"] = ast_to_json(ex.ast);
  return j;
}

Example example_from_json(const Json& j) { return example_from(j, "record"); }

std::vector<Example> read_dataset(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  if (text.empty()) bad(path.string() + ": empty dataset file");
  std::vector<Example> out;
  std::set<std::string> ids;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = path.filename().string() + ":" + std::to_string(lineno);
    Json j = parse_json(line, where);
    if (j.is_object() && j.contains("format")) {
      if (lineno != 1) bad(where + ": header must be the first line");
      check_keys(j, {"format", "version"}, where);
      check_header(j, kDatasetFormat, where);
      continue;
    }
    Example ex = example_from(j, where);
    if (!ids.insert(ex.id).second) bad(where + ": duplicate id '" + ex.id + "'");
    out.push_back(std::move(ex));
  }
  return out;
}

void write_dataset(const std::filesystem::path& path, std::span<const Example> examples) {
  std::string text = Json{{"format", kDatasetFormat}, {"version", kVersion}}.dump() + "\n";
  for (const auto& ex : examples) text += example_to_json(ex).dump() + "\n";
  write_file(path, text);
}

std::string grammar_to_text(const Grammar& g) {
  Json j;
  j["format"] = kGrammarFormat;
  j["version"] = kVersion;
  j["start"] = g.symbol(g.start_symbol()).name;
  j["scope_vocab"] = g.scope_vocab();
  Json syms = Json::array();
  for (const auto& s : g.symbols()) {
    syms.push_back({{"name", s.symbol.name},
                    {"kind", std::string(to_string(s.symbol.kind))},
                    {"node_class", std::string(to_string(s.symbol.node_class))},
                    {"introduces_scope", s.introduces_scope}});
  }
  j["symbols"] = std::move(syms);
  Json rules = Json::array();
  for (const auto& r : g.rules()) {
    Json rj;
    rj["id"] = r.id;
    rj["lhs"] = g.symbol(r.lhs).name;
    Json rhs = Json::array();
    for (int s : r.rhs) rhs.push_back(g.symbol(s).name);
    rj["rhs"] = std::move(rhs);
    if (r.terminal_value) rj["terminal"] = *r.terminal_value;
    rules.push_back(std::move(rj));
  }
  j["rules"] = std::move(rules);
  return j.dump(1) + "\n";
}

Grammar grammar_from_text(const std::string& text) {
  const std::string where = "grammar";
  Json j = parse_json(text, where);
  check_keys(j, {"format", "version", "start", "scope_vocab", "symbols", "rules"}, where);
  check_header(j, kGrammarFormat, where);
  std::vector<SymbolInfo> symbols;
  std::unordered_map<std::string, int> ids;
  const Json& sj = field(j, "symbols", where);
  if (!sj.is_array()) bad(where + ".symbols: expected an array");
  try {
    for (const auto& s : sj) {
      check_keys(s, {"name", "kind", "node_class", "introduces_scope"}, where + ".symbols");
      SymbolInfo info;
      info.symbol.name = str(field(s, "name", where), where + ".symbols.name");
      info.symbol.kind = parse_symbol_kind(str(field(s, "kind", where), where + ".symbols.kind"));
      info.symbol.node_class =
          parse_node_class(str(field(s, "node_class", where), where + ".symbols.node_class"));
      const Json& scope = field(s, "introduces_scope", where);
      if (!scope.is_boolean()) bad(where + ".symbols.introduces_scope: expected a boolean");
      info.introduces_scope = scope.get<bool>();
      ids.emplace(info.symbol.name, static_cast<int>(symbols.size()));
      symbols.push_back(std::move(info));
    }
  } catch (const StructuralInputError& e) {
    bad(where + ": " + e.what());
  }
  auto symbol_ref = [&](const Json& name) {
    std::string n = str(name, where + ".rules");
    auto it = ids.find(n);
    if (it == ids.end()) bad(where + ": unknown symbol '" + n + "'");
    return it->second;
  };
  std::vector<GrammarRule> rules;
  const Json& rj = field(j, "rules", where);
  if (!rj.is_array()) bad(where + ".rules: expected an array");
  for (const auto& r : rj) {
    check_keys(r, {"id", "lhs", "rhs", "terminal"}, where + ".rules");
    GrammarRule rule;
    const Json& id = field(r, "id", where);
    if (!id.is_number_integer()) bad(where + ".rules.id: expected an integer");
    rule.id = id.get<int>();
    rule.lhs = symbol_ref(field(r, "lhs", where));
    const Json& rhs = field(r, "rhs", where);
    if (!rhs.is_array()) bad(where + ".rules.rhs: expected an array");
    for (const auto& s : rhs) rule.rhs.push_back(symbol_ref(s));
    if (auto it = r.find("terminal"); it != r.end()) {
      rule.terminal_value = str(*it, where + ".rules.terminal");
    }
    rules.push_back(std::move(rule));
  }
  std::vector<std::string> scopes;
  const Json& sv = field(j, "scope_vocab", where);
  if (!sv.is_array()) bad(where + ".scope_vocab: expected an array");
  for (const auto& s : sv) scopes.push_back(str(s, where + ".scope_vocab"));
  const int start = symbol_ref(field(j, "start", where));
  try {
    return Grammar::from_parts(std::move(symbols), std::move(rules), std::move(scopes), start);
  } catch (const StructuralInputError& e) {
    bad(where + ": " + e.what());
  }
}

void save_grammar(const Grammar& g, const std::filesystem::path& path) {
  write_file(path, grammar_to_text(g));
}

Grammar load_grammar(const std::filesystem::path& path) {
  return grammar_from_text(read_file(path));
}

Json config_to_json(const RunConfig& cfg) {
  const ModelConfig& m = cfg.model;
  const Ablation& a = m.ablation;
  const TrainConfig& t = cfg.train;
  Json j;
  j["dim"] = m.dim;
  j["layers"] = m.layers;
  j["window"] = m.window;
  j["mlp_hidden"] = m.mlp_hidden;
  j["max_slots"] = m.max_slots;
  j["copy_mechanism"] = m.copy_mechanism;
  j["precision"] = m.precision;
  j["no_rule_cnn"] = a.no_rule_cnn;
  j["no_preorder_cnn"] = a.no_preorder_cnn;
  j["no_tree_conv"] = a.no_tree_conv;
  j["no_treepath_cnn"] = a.no_treepath_cnn;
  j["attention_to_maxpool"] = a.attention_to_maxpool;
  j["no_scope"] = a.no_scope;
  j["extra_treeconv_pool"] = a.extra_treeconv_pool;
  j["share_heads"] = a.share_heads;
  j["epochs"] = t.epochs;
  j["accumulation"] = t.accumulation;
  j["dropout"] = t.dropout;
  j["l2"] = t.l2;
  j["lr"] = t.adam.lr;
  j["beta1"] = t.adam.beta1;
  j["beta2"] = t.adam.beta2;
  j["eps"] = t.adam.eps;
  j["seed"] = t.seed;
  j["eval_interval"] = t.eval_interval;
  j["patience"] = t.patience;
  j["max_decode_steps"] = t.max_decode_steps;
  j["beam"] = t.beam;
  j["max_updates"] = t.max_updates;
  j["stop_on_perfect_dev"] = t.stop_on_perfect_dev;
  return j;
}

RunConfig config_from_json(const Json& j) {
  const std::string where = "config";
  if (!j.is_object()) bad(where + ": expected an object");
  RunConfig cfg;
  ModelConfig& m = cfg.model;
  Ablation& a = m.ablation;
  TrainConfig& t = cfg.train;
  for (const auto& [key, v] : j.items()) {
    const std::string w = where + "." + key;
    auto integer = [&](auto& dst) {
      if (!v.is_number_integer()) bad(w + ": expected an integer");
      dst = v.get<std::remove_reference_t<decltype(dst)>>();
    };
    auto flag = [&](bool& dst) {
      if (!v.is_boolean()) bad(w + ": expected a boolean");
      dst = v.get<bool>();
    };
    auto real = [&](double& dst) {
      if (!v.is_number()) bad(w + ": expected a number");
      dst = v.get<double>();
    };
    if (key == "dim") integer(m.dim);
    else if (key == "layers") integer(m.layers);
    else if (key == "window") integer(m.window);
    else if (key == "mlp_hidden") integer(m.mlp_hidden);
    else if (key == "max_slots") integer(m.max_slots);
    else if (key == "copy_mechanism") flag(m.copy_mechanism);
    else if (key == "precision") integer(m.precision);
    else if (key == "no_rule_cnn") flag(a.no_rule_cnn);
    else if (key == "no_preorder_cnn") flag(a.no_preorder_cnn);
    else if (key == "no_tree_conv") flag(a.no_tree_conv);
    else if (key == "no_treepath_cnn") flag(a.no_treepath_cnn);
    else if (key == "attention_to_maxpool") flag(a.attention_to_maxpool);
    else if (key == "no_scope") flag(a.no_scope);
    else if (key == "extra_treeconv_pool") flag(a.extra_treeconv_pool);
    else if (key == "share_heads") flag(a.share_heads);
    else if (key == "epochs") integer(t.epochs);
    else if (key == "accumulation") integer(t.accumulation);
    else if (key == "dropout") real(t.dropout);
    else if (key == "l2") real(t.l2);
    else if (key == "lr") real(t.adam.lr);
    else if (key == "beta1") real(t.adam.beta1);
    else if (key == "beta2") real(t.adam.beta2);
    else if (key == "eps") real(t.adam.eps);
    else if (key == "seed") {
      if (!v.is_number_unsigned()) bad(w + ": expected a nonnegative integer");
      t.seed = v.get<std::uint64_t>();
    }
    else if (key == "eval_interval") integer(t.eval_interval);
    else if (key == "patience") integer(t.patience);
    else if (key == "max_decode_steps") integer(t.max_decode_steps);
    else if (key == "beam") integer(t.beam);
    else if (key == "max_updates") integer(t.max_updates);
    else if (key == "stop_on_perfect_dev") flag(t.stop_on_perfect_dev);
    else bad(where + ": unknown key '" + key + "'");
  }
  m.validate();
  t.validate();
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  return config_from_json(parse_json(read_file(path), path.string()));
}

void save_config(const RunConfig& cfg, const std::filesystem::path& path) {
  write_file(path, config_to_json(cfg).dump(1) + "\n");
}

Json report_to_json(const EvalReport& report) {
  Json j;
  j["format"] = kReportFormat;
  j["version"] = kVersion;
  j["string_accuracy"] = report.string_accuracy;
  j["bleu"] = report.bleu;
  j["failures"] = report.failures;
  Json recs = Json::array();
  for (const auto& r : report.records) {
    Json rj;
    rj["id"] = r.id;
    rj["gold"] = r.gold;
    rj["predicted"] = r.predicted ? Json(*r.predicted) : Json(nullptr);
    rj["match"] = r.match;
    rj["sentence_bleu"] = r.sentence_bleu;
    if (!r.diagnostic.empty()) rj["diagnostic"] = r.diagnostic;
    recs.push_back(std::move(rj));
  }
  j["examples"] = std::move(recs);
  return j;
}

EvalReport report_from_json(const Json& j) {
  const std::string where = "report";
  check_keys(j, {"format", "version", "string_accuracy", "bleu", "failures", "examples"}, where);
  check_header(j, kReportFormat, where);
  auto yield = [&](const Json& v) {
    if (!v.is_array()) bad(where + ": expected a token array");
    Yield y;
    for (const auto& t : v) y.push_back(str(t, where));
    return y;
  };
  auto number = [&](const Json& v) {
    if (!v.is_number()) bad(where + ": expected a number");
    return v.get<double>();
  };
  EvalReport r;
  r.string_accuracy = number(field(j, "string_accuracy", where));
  r.bleu = number(field(j, "bleu", where));
  const Json& f = field(j, "failures", where);
  if (!f.is_number_integer()) bad(where + ".failures: expected an integer");
  r.failures = f.get<int>();
  const Json& ex = field(j, "examples", where);
  if (!ex.is_array()) bad(where + ".examples: expected an array");
  for (const auto& e : ex) {
    check_keys(e, {"id", "gold", "predicted", "match", "sentence_bleu", "diagnostic"}, where);
    ExampleRecord rec;
    rec.id = str(field(e, "id", where), where + ".id");
    rec.gold = yield(field(e, "gold", where));
    const Json& p = field(e, "predicted", where);
    if (!p.is_null()) rec.predicted = yield(p);
    const Json& m = field(e, "match", where);
    if (!m.is_boolean()) bad(where + ".match: expected a boolean");
    rec.match = m.get<bool>();
    rec.sentence_bleu = number(field(e, "sentence_bleu", where));
    if (auto it = e.find("diagnostic"); it != e.end()) rec.diagnostic = str(*it, where);
    r.records.push_back(std::move(rec));
  }
  return r;
}

void save_model(const Model& model, const std::filesystem::path& path,
                const TrainConfig& train) {
  Json extra;
  extra["config"] = config_to_json({model.config(), train});
  extra["vocab"] = model.vocab().tokens();
  nn::CheckpointMeta meta{train.seed, model.hash(), extra.dump()};
  nn::save_params(model.params(), path, meta);
}

LoadedModel load_model(const std::filesystem::path& path, const Grammar& grammar) {
  nn::LoadedCheckpoint ck = nn::load_params(path);
  Json extra;
  RunConfig cfg;
  std::vector<std::string> tokens;
  try {
    extra = Json::parse(ck.meta.extra_json);
    cfg = config_from_json(field(extra, "config", "manifest"));
    for (const auto& t : field(extra, "vocab", "manifest")) tokens.push_back(t.get<std::string>());
  } catch (const std::exception& e) {
    throw CheckpointIncompatible(path.string() + ": bad manifest: " + e.what());
  }
  TokenVocab vocab = TokenVocab::from_tokens(std::move(tokens));
  const std::string hash = config_hash(cfg.model, grammar, vocab);
  if (hash != ck.meta.config_hash) {
    throw CheckpointIncompatible(path.string() + ": config hash " + ck.meta.config_hash +
                                 " does not match grammar and config (" + hash + ")");
  }
  Model model(cfg.model, grammar, std::move(vocab), std::move(ck.store));
  return {std::move(model), cfg};
}

}  // namespace gcnn
