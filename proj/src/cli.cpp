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


#include "gcnn/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <optional>

#include "gcnn/error.hpp"
#include "gcnn/gradcheck.hpp"
#include "gcnn/io.hpp"
#include "gcnn/search.hpp"
#include "gcnn/synth.hpp"
#include "gcnn/train.hpp"

namespace gcnn {
namespace {

class DecodeFailure : public Error {
 public:
  using Error::Error;
};

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string join(const Yield& y) {
  std::string s;
  for (const auto& t : y) {
    if (!s.empty()) s += ' ';
    s += t;
  }
  return s;
}

struct ExtractArgs {
  std::string data;
  std::string out;
};

int extract_grammar(const ExtractArgs& a, std::ostream& out) {
  auto examples = read_dataset(a.data);
  if (examples.empty()) throw InputError(a.data + ": no records");
  std::vector<AstNode> corpus;
  for (auto& ex : examples) corpus.push_back(std::move(ex.ast));
  Grammar g = induce_grammar(corpus);
  save_grammar(g, a.out);
  out << "rules " << g.rule_count() << "\nsymbols " << g.symbols().size() << "\nscopes "
      << g.scope_vocab().size() << "\n";
  return kExitOk;
}

struct TrainArgs {
  std::string data;
  std::string dev;
  std::string grammar;
  std::string config;
  std::string out_dir;
};

int train_cmd(const TrainArgs& a, std::ostream& out) {
  RunConfig cfg = a.config.empty() ? RunConfig{} : load_config(a.config);
  Grammar grammar = load_grammar(a.grammar);
  auto train_set = read_dataset(a.data);
  std::vector<Example> dev_set;
  if (!a.dev.empty()) dev_set = read_dataset(a.dev);
  std::vector<std::vector<std::string>> tokens;
  for (const auto& ex : train_set) tokens.push_back(example_tokens(ex));
  Model model(cfg.model, grammar, TokenVocab::build(tokens), cfg.train.seed);
  const std::filesystem::path dir(a.out_dir);
  std::filesystem::create_directories(dir);
  save_config(cfg, dir / "config.json");
  model.vocab().save(dir / "vocab.txt");
  TrainResult r = train(model, train_set, dev_set, cfg.train, dir, &out);
  out << "epochs " << r.epochs << " updates " << r.updates << " skipped " << r.skipped;
  if (r.best_dev_accuracy >= 0) out << " best_dev_str_acc " << fixed(r.best_dev_accuracy, 4);
  out << "\n";
  return kExitOk;
}

Example parse_input(const std::string& input, const std::vector<std::string>& slot_args) {
  Example ex;
  if (!input.empty() && input.front() == '{') {
    Json j;
    try {
      j = Json::parse(input);
    } catch (const Json::parse_error& e) {
      throw InputError(std::string("input record: ") + e.what());
    }
    if (!j.contains("ast")) {
      Json copy = j;
      copy["ast"] = {{"symbol", "_"}};
      if (!copy.contains("id")) copy["id"] = "input";
      ex = example_from_json(copy);
    } else {
      if (!j.contains("id")) j["id"] = "input";
      ex = example_from_json(j);
    }
  } else {
    ex.id = "input";
    ex.description = input;
  }
  for (const auto& s : slot_args) {
    auto eq = s.find('=');
    if (eq == std::string::npos) throw InputError("slot '" + s + "' is not name=value");
    ex.slots.push_back({s.substr(0, eq), s.substr(eq + 1)});
  }
  return ex;
}

struct GenerateArgs {
  std::string checkpoint;
  std::string grammar;
  std::string input;
  std::vector<std::string> slots;
  int beam = 5;
  int max_steps = 800;
  bool ast = false;
};

int generate_cmd(const GenerateArgs& a, std::ostream& out) {
  Grammar grammar = load_grammar(a.grammar);
  LoadedModel lm = load_model(a.checkpoint, grammar);
  Example ex = parse_input(a.input, a.slots);
  auto ids = lm.model.vocab().encode(example_tokens(ex));
  DecodeResult res = beam_search(lm.model, ids, ex.slots, {a.beam, a.max_steps});
  if (res.failed()) throw DecodeFailure("decode failed: " + res.diagnostic);
  const Hypothesis& best = res.hypotheses.front();
  out << join(token_yield(best.state.partial_ast.root())) << "\n";
  if (a.ast) {
    Json doc;
    doc["log_prob"] = best.log_prob;
    doc["ast"] = ast_to_json(best.state.partial_ast.root());
    Json trace = Json::array();
    const int r = grammar.rule_count();
    for (std::size_t i = 0; i < best.state.rule_trace.size(); ++i) {
      const int act = best.state.rule_trace[i];
      Json step;
      step["action"] = act;
      step["rule"] = act < r ? grammar.describe_rule(act) : "copy slot " + std::to_string(act - r);
      step["log_prob"] = best.step_log_probs[i];
      trace.push_back(std::move(step));
    }
    doc["trace"] = std::move(trace);
    out << doc.dump(1) << "\n";
  }
  return kExitOk;
}

struct EvaluateArgs {
  std::string checkpoint;
  std::string grammar;
  std::string data;
  std::string report;
  int beam = 5;
  int max_steps = 800;
  bool gold = false;
};

int evaluate_cmd(const EvaluateArgs& a, std::ostream& out) {
  auto data = read_dataset(a.data);
  if (data.empty()) throw InputError(a.data + ": no records");
  EvalReport rep;
  if (a.gold) {
    std::vector<ExampleRecord> recs;
    for (const auto& ex : data) {
      ExampleRecord r;
      r.id = ex.id;
      r.gold = token_yield(ex.ast);
      r.predicted = r.gold;
      recs.push_back(std::move(r));
    }
    rep = make_report(std::move(recs));
  } else {
    if (a.checkpoint.empty() || a.grammar.empty()) {
      throw InputError("--checkpoint and --grammar are required unless --gold is given");
    }
    Grammar grammar = load_grammar(a.grammar);
    LoadedModel lm = load_model(a.checkpoint, grammar);
    rep = evaluate(lm.model, data, {a.beam, a.max_steps});
  }
  if (!a.report.empty()) write_file(a.report, report_to_json(rep).dump(1) + "\n");
  out << "string_accuracy " << fixed(rep.string_accuracy, 4) << "\nbleu " << fixed(rep.bleu, 4)
      << "\nfailures " << rep.failures << "\n";
  return kExitOk;
}

struct SynthArgs {
  SynthOptions opts;
  std::string out;
  std::string grammar_out;
  bool copy_split = false;
  std::string test_out;
  int templates = 6;
  int test_count = 20;
};

int synth_cmd(const SynthArgs& a, std::ostream& out) {
  std::vector<Example> train_set;
  if (a.copy_split) {
    if (a.test_out.empty()) throw InputError("--copy-split needs --test-out");
    SynthSplit split = synth_copy_split(a.opts, a.templates, a.opts.count, a.test_count);
    write_dataset(a.test_out, split.test);
    train_set = std::move(split.train);
  } else {
    train_set = synth_dataset(a.opts);
  }
  write_dataset(a.out, train_set);
  if (!a.grammar_out.empty()) {
    if (train_set.empty()) throw InputError("cannot induce a grammar from zero examples");
    std::vector<AstNode> corpus;
    for (const auto& ex : train_set) corpus.push_back(ex.ast);
    save_grammar(induce_grammar(corpus), a.grammar_out);
  }
  out << "examples " << train_set.size() << "\n";
  return kExitOk;
}

struct GradcheckArgs {
  GradcheckOptions opts;
};

int gradcheck_cmd(const GradcheckArgs& a, std::ostream& out, std::ostream& err) {
  std::vector<std::pair<std::string, Ablation>> variants{{"full", {}}};
  auto toggle = [&](const char* name, bool Ablation::*member) {
    Ablation ab;
    ab.*member = true;
    variants.emplace_back(name, ab);
  };
  toggle("no_rule_cnn", &Ablation::no_rule_cnn);
  toggle("no_preorder_cnn", &Ablation::no_preorder_cnn);
  toggle("no_tree_conv", &Ablation::no_tree_conv);
  toggle("no_treepath_cnn", &Ablation::no_treepath_cnn);
  toggle("attention_to_maxpool", &Ablation::attention_to_maxpool);
  toggle("no_scope", &Ablation::no_scope);
  toggle("extra_treeconv_pool", &Ablation::extra_treeconv_pool);
  toggle("share_heads", &Ablation::share_heads);

  std::vector<GradcheckRow> offenders;
  auto report = [&](const std::string& title, const GradcheckReport& rep) {
    out << "[" << title << "] max " << std::scientific << rep.max_error() << std::defaultfloat
        << "\n";
    for (const auto& row : rep.rows) {
      out << "  " << row.group << " " << std::scientific << row.max_error << std::defaultfloat
          << " (" << row.checked << ")\n";
      if (!(row.max_error < a.opts.tolerance)) {
        offenders.push_back({title + ":" + row.group, row.max_error, row.checked});
      }
    }
  };
  report("ops", gradcheck_ops(a.opts));
  for (const auto& [name, ab] : variants) report(name, gradcheck_model(a.opts, ab));
  if (!offenders.empty()) {
    err << "gradcheck exceeded tolerance " << a.opts.tolerance << ":\n";
    for (const auto& o : offenders) err << "  " << o.group << " " << o.max_error << "\n";
    return kExitGradcheck;
  }
  out << "gradcheck passed\n";
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Grammar-based convolutional code generator", "gcnn"};
  app.require_subcommand(1);

  ExtractArgs ea;
  auto* extract = app.add_subcommand("extract-grammar", "Induce a grammar from a dataset");
  extract->add_option("--data", ea.data, "Dataset file")->required();
  extract->add_option("--out", ea.out, "Grammar output file")->required();

  TrainArgs ta;
  auto* trn = app.add_subcommand("train", "Train a model");
  trn->add_option("--data", ta.data, "Training dataset")->required();
  trn->add_option("--dev", ta.dev, "Development dataset");
  trn->add_option("--grammar", ta.grammar, "Grammar file")->required();
  trn->add_option("--config", ta.config, "Run configuration");
  trn->add_option("--out-dir", ta.out_dir, "Output directory")->required();

  GenerateArgs ga;
  auto* gen = app.add_subcommand("generate", "Decode one description");
  gen->add_option("--checkpoint", ga.checkpoint, "Checkpoint file")->required();
  gen->add_option("--grammar", ga.grammar, "Grammar file")->required();
  gen->add_option("--input", ga.input, "Description text or JSON record")->required();
  gen->add_option("--slot", ga.slots, "Slot as name=value");
  gen->add_option("--beam", ga.beam, "Beam size")->check(CLI::PositiveNumber);
  gen->add_option("--max-steps", ga.max_steps, "Decode step limit")->check(CLI::PositiveNumber);
  gen->add_flag("--ast", ga.ast, "Also print the tree and rule trace");

  EvaluateArgs va;
  auto* ev = app.add_subcommand("evaluate", "Decode a dataset and score it");
  ev->add_option("--checkpoint", va.checkpoint, "Checkpoint file");
  ev->add_option("--grammar", va.grammar, "Grammar file");
  ev->add_option("--data", va.data, "Dataset file")->required();
  ev->add_option("--report", va.report, "Report output file");
  ev->add_option("--beam", va.beam, "Beam size")->check(CLI::PositiveNumber);
  ev->add_option("--max-steps", va.max_steps, "Decode step limit")->check(CLI::PositiveNumber);
  ev->add_flag("--gold", va.gold, "Score the gold trees against themselves");

  SynthArgs sa;
  auto* syn = app.add_subcommand("synth-data", "Write a synthetic dataset");
  syn->add_option("--grammar-size", sa.opts.grammar_size, "Nonterminals per level")
      ->check(CLI::PositiveNumber);
  syn->add_option("--depth", sa.opts.depth, "Nonterminal levels")->check(CLI::PositiveNumber);
  syn->add_option("--count", sa.opts.count, "Examples")->check(CLI::NonNegativeNumber);
  syn->add_option("--seed", sa.opts.seed, "Random seed");
  syn->add_option("--functions", sa.opts.functions, "Functions per program, at most")
      ->check(CLI::PositiveNumber);
  syn->add_option("--identifiers", sa.opts.identifiers, "Identifier pool size")
      ->check(CLI::PositiveNumber);
  syn->add_option("--out", sa.out, "Dataset output file")->required();
  syn->add_option("--grammar-out", sa.grammar_out, "Also write the induced grammar");
  syn->add_flag("--copy-split", sa.copy_split, "Templates with disjoint train/test names");
  syn->add_option("--test-out", sa.test_out, "Test split output file");
  syn->add_option("--templates", sa.templates, "Program templates")->check(CLI::PositiveNumber);
  syn->add_option("--test-count", sa.test_count, "Test examples")->check(CLI::NonNegativeNumber);

  GradcheckArgs ka;
  auto* gc = app.add_subcommand("gradcheck", "Finite-difference gradient check");
  gc->add_option("--dims", ka.opts.dim, "Feature dimension")->check(CLI::PositiveNumber);
  gc->add_option("--layers", ka.opts.layers, "CNN layers")->check(CLI::PositiveNumber);
  gc->add_option("--seed", ka.opts.seed, "Random seed");
  gc->add_flag("--corrupt", ka.opts.corrupt, "Perturb analytic gradients (test hook)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  }

  try {
    if (*extract) return extract_grammar(ea, out);
    if (*trn) return train_cmd(ta, out);
    if (*gen) return generate_cmd(ga, out);
    if (*ev) return evaluate_cmd(va, out);
    if (*syn) return synth_cmd(sa, out);
    if (*gc) return gradcheck_cmd(ka, out, err);
  } catch (const DecodeFailure& e) {
    err << "error: " << e.what() << "\n";
    return kExitDecode;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitValidation;
}

}  // namespace gcnn
