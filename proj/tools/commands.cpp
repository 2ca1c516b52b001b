#include "commands.hpp"

#include <filesystem>
#include <iostream>
#include <utility>

#include <json.hpp>

#include "coannot/cotrain.hpp"
#include "coannot/error.hpp"
#include "coannot/io.hpp"

namespace coannot::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

constexpr const char* kVersion = "0.1.0";

// Input problem with the offending file named.
class InputError : public Error {
 public:
  using Error::Error;
};

struct InputFile {
  std::string path;
  std::string bytes;
};

InputFile load(const std::string& path) {
  try {
    return {path, read_file(path)};
  } catch (const Error& e) {
    throw InputError(e.what());
  }
}

template <typename Parse>
auto parse_input(const InputFile& f, Parse parse) {
  try {
    return parse(f.bytes);
  } catch (const ParseError& e) {
    throw InputError(f.path + ": " + e.what());
  } catch (const UnknownClassError& e) {
    throw InputError(f.path + ": " + e.what());
  } catch (const ConfigError& e) {
    throw InputError(f.path + ": " + e.what());
  }
}

ordered_json train_config_json(const TrainConfig& c) {
  ordered_json j;
  j["epochs"] = c.epochs;
  j["learning_rate"] = c.learning_rate;
  j["l2_weight"] = c.l2_weight;
  j["rmsprop_decay"] = c.rmsprop_decay;
  j["rmsprop_epsilon"] = c.rmsprop_epsilon;
  j["batch_size"] = c.batch_size;
  j["seed"] = c.seed;
  j["lr_schedule"] = to_string(c.lr_schedule);
  j["optimizer"] = to_string(c.optimizer);
  return j;
}

ordered_json cotrain_config_json(const CoTrainConfig& c) {
  ordered_json j;
  j["n_iter"] = c.n_iter;
  j["tau"] = c.tau;
  j["strategy"] = to_string(c.strategy);
  j["seed"] = c.seed;
  j["main"] = train_config_json(c.main_cfg);
  j["aux"] = train_config_json(c.aux_cfg);
  j["extra_labeled_samples"] = c.extra_labeled ? c.extra_labeled->size() : 0;
  return j;
}

ordered_json synth_config_json(const SynthConfig& c) {
  ordered_json j;
  j["n_classes"] = c.n_classes;
  j["n_samples"] = c.n_samples;
  j["feature_dim"] = c.feature_dim;
  j["dag_depth"] = c.dag_depth;
  j["synonyms_per_class"] = c.synonyms_per_class;
  j["held_out_synonym_fraction"] = c.held_out_synonym_fraction;
  j["ambiguity_fraction"] = c.ambiguity_fraction;
  j["missing_text_fraction"] = c.missing_text_fraction;
  j["feature_noise_sigma"] = c.feature_noise_sigma;
  j["seed"] = c.seed;
  return j;
}

ordered_json manifest(const std::string& command, ordered_json config, const std::vector<const InputFile*>& inputs,
                      const std::vector<std::string>& outputs) {
  ordered_json j;
  j["tool"] = "coannot";
  j["version"] = kVersion;
  j["command"] = command;
  j["config"] = std::move(config);
  ordered_json in = ordered_json::array();
  for (const InputFile* f : inputs) in.push_back({{"path", f->path}, {"fnv1a64", digest_hex(f->bytes)}});
  j["inputs"] = std::move(in);
  j["outputs"] = outputs;
  return j;
}

// Buffers outputs so nothing is written unless the whole command succeeded.
class OutputSet {
 public:
  void add(std::string path, std::string content) { files_.emplace_back(std::move(path), std::move(content)); }
  std::vector<std::string> paths() const {
    std::vector<std::string> p;
    for (const auto& [path, content] : files_) p.push_back(path);
    return p;
  }
  // Output names relative to `dir`, so manifests do not depend on where they were written.
  std::vector<std::string> names_in(const std::string& dir) const {
    std::vector<std::string> p;
    for (const auto& [path, content] : files_) p.push_back(fs::path(path).lexically_relative(dir).generic_string());
    return p;
  }
  void commit() const {
    for (const auto& [path, content] : files_) write_file_atomic(path, content);
  }

 private:
  std::vector<std::pair<std::string, std::string>> files_;
};

Strategy strategy_arg(const std::string& name) {
  if (auto s = parse_strategy(name)) return *s;
  throw InputError("unknown --resolve strategy \"" + name + "\"");
}

CoTrainConfig loop_config(const std::string& resolve, int iters, double threshold, std::uint64_t seed) {
  CoTrainConfig cfg;
  cfg.strategy = strategy_arg(resolve);
  cfg.n_iter = iters;
  cfg.tau = threshold;
  cfg.seed = seed;
  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    throw InputError(e.what());
  }
  return cfg;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw InputError("cannot create directory " + dir);
}

std::string join(const std::string& dir, const char* name) { return (fs::path(dir) / name).string(); }

SynthCorpus make_corpus(const SynthConfig& cfg) {
  try {
    return gen_synthetic(cfg);
  } catch (const ConfigError& e) {
    throw InputError(std::string("invalid synthetic config: ") + e.what());
  }
}

int write_experiment(const std::string& command, const ExperimentArgs& args, const CoTrainConfig& cfg,
                     const ExperimentReport& report) {
  ensure_dir(args.out_dir);
  OutputSet out;
  out.add(join(args.out_dir, "report.json"), report_to_json(report));
  out.add(join(args.out_dir, "report.tsv"), report_to_tsv(report));
  ordered_json config;
  config["synth"] = synth_config_json(args.synth);
  config["cotrain"] = cotrain_config_json(cfg);
  config["fractions"] = args.fractions;
  config["repeats"] = args.repeats;
  auto paths = out.names_in(args.out_dir);
  out.add(join(args.out_dir, "manifest.json"), manifest(command, std::move(config), {}, paths).dump(2) + "\n");
  out.commit();
  return kOk;
}

}  // namespace

int report_error(const std::exception& e) {
  std::cerr << "coannot: " << e.what() << "\n";
  if (dynamic_cast<const NoSupervisionError*>(&e)) return kNoSupervision;
  if (dynamic_cast<const DivergenceError*>(&e)) return kDivergence;
  if (dynamic_cast<const EmptyTrainingSetError*>(&e)) return kEmptyIteration;
  return kInputError;
}

int cmd_annotate(const AnnotateArgs& args) {
  const InputFile samples_file = load(args.samples);
  const InputFile onto_file = load(args.ontology.empty() ? args.obo : args.ontology);
  const Corpus corpus = parse_input(samples_file, parse_samples_jsonl);
  if (corpus.empty()) throw InputError(args.samples + ": no samples");
  const Ontology o = parse_input(onto_file, [&](std::string_view t) {
    return args.ontology.empty() ? parse_obo_subset(t) : parse_ontology_tsv(t);
  });

  std::optional<InputFile> lex_file, labels_file;
  Lexicon lex;
  if (!args.lexicon.empty()) {
    lex_file = load(args.lexicon);
    lex = parse_input(*lex_file, [&](std::string_view t) { return load_lexicon_tsv(t, o); });
  } else {
    lex = lexicon_from_ontology(o);
  }

  CoTrainConfig cfg = loop_config(args.resolve, args.iters, args.threshold, args.seed);
  if (!args.labels.empty()) {
    labels_file = load(args.labels);
    const GoldLabels extra = parse_input(*labels_file, [&](std::string_view t) { return parse_gold_tsv(t, o); });
    TrainingSet set;
    for (const auto& [id, classes] : extra)
      for (ClassIndex c : classes) set[id][c] = 1.0;
    cfg.extra_labeled = std::move(set);
  }

  CoTrainResult result;
  try {
    result = run(corpus, o, lex, cfg);
  } catch (const ConfigError& e) {
    throw InputError(e.what());
  }

  OutputSet out;
  TrainingSet labels = annotate(result.main, corpus, cfg.tau);
  out.add(args.out, annotations_to_tsv(labels, o));
  if (!args.model_out.empty()) {
    ensure_dir(args.model_out);
    out.add(join(args.model_out, "main.json"), model_to_json(result.main));
    out.add(join(args.model_out, "aux.json"), model_to_json(result.aux));
  }
  if (!args.history.empty()) out.add(args.history, history_to_json(result.history));

  ordered_json config;
  config["samples"] = args.samples;
  config[args.ontology.empty() ? "obo" : "ontology"] = onto_file.path;
  config["lexicon"] = args.lexicon.empty() ? ordered_json("<ontology names and synonyms>") : ordered_json(args.lexicon);
  config["labels"] = args.labels.empty() ? ordered_json(nullptr) : ordered_json(args.labels);
  config["cotrain"] = cotrain_config_json(cfg);
  std::vector<const InputFile*> inputs{&samples_file, &onto_file};
  if (lex_file) inputs.push_back(&*lex_file);
  if (labels_file) inputs.push_back(&*labels_file);
  auto paths = out.paths();
  out.add(args.out + ".manifest.json", manifest("annotate", std::move(config), inputs, paths).dump(2) + "\n");
  out.commit();
  return kOk;
}

int cmd_evaluate(const EvaluateArgs& args) {
  const InputFile onto_file = load(args.ontology);
  const InputFile pred_file = load(args.pred);
  const InputFile gold_file = load(args.gold);
  const Ontology o = parse_input(onto_file, [](std::string_view t) { return parse_ontology_auto(t); });
  const TrainingSet pred = parse_input(pred_file, [&](std::string_view t) { return parse_annotations_tsv(t, o); });
  const GoldLabels gold = parse_input(gold_file, [&](std::string_view t) { return parse_gold_tsv(t, o); });

  const PRCurve curve = pr_curve(pred, gold, o);
  const EvalSummary s = evaluate(pred, gold, o);
  ordered_json report;
  report["auprc"] = s.auprc;
  report["precision_at_0.5"] = s.precision_at_half.precision;
  report["precision_at_0.5_reached"] = s.precision_at_half.reached;
  report["max_achieved_recall"] = s.max_achieved_recall;
  report["n_samples"] = s.n_samples;
  report["n_classes_predicted"] = s.n_classes_predicted;
  report["ignored_samples"] = curve.ignored_samples;
  const std::string report_text = report.dump(2) + "\n";

  OutputSet out;
  if (!args.curve.empty()) out.add(args.curve, curve_to_tsv(curve));
  if (!args.report.empty()) out.add(args.report, report_text);
  if (!out.paths().empty()) {
    ordered_json config{{"pred", args.pred}, {"gold", args.gold}, {"ontology", args.ontology}};
    auto paths = out.paths();
    const std::string anchor = args.report.empty() ? args.curve : args.report;
    out.add(anchor + ".manifest.json", manifest("evaluate", std::move(config), {&onto_file, &pred_file, &gold_file},
                                                paths).dump(2) + "\n");
  }
  out.commit();
  if (args.report.empty()) std::cout << report_text;
  return kOk;
}

int cmd_synth(const ExperimentArgs& args) {
  const SynthCorpus corpus = make_corpus(args.synth);
  ensure_dir(args.out_dir);
  OutputSet out;
  out.add(join(args.out_dir, "ontology.tsv"), corpus.ontology.to_tsv());
  out.add(join(args.out_dir, "lexicon.tsv"), corpus.lexicon.to_tsv(corpus.ontology));
  out.add(join(args.out_dir, "samples.jsonl"), samples_to_jsonl(corpus.samples));
  out.add(join(args.out_dir, "gold.tsv"), gold_to_tsv(corpus.gold, corpus.ontology));
  ordered_json config;
  config["synth"] = synth_config_json(args.synth);
  config["held_out_terms"] = corpus.held_out_terms.size();
  auto paths = out.names_in(args.out_dir);
  out.add(join(args.out_dir, "manifest.json"), manifest("synth", std::move(config), {}, paths).dump(2) + "\n");
  out.commit();
  return kOk;
}

int cmd_strategy_compare(const ExperimentArgs& args) {
  const SynthCorpus corpus = make_corpus(args.synth);
  const CoTrainConfig cfg = loop_config(args.resolve, args.iters, args.threshold, args.synth.seed);
  return write_experiment("strategy-compare", args, cfg, run_strategy_comparison(corpus, cfg));
}

int cmd_noise_sweep(const ExperimentArgs& args) {
  const SynthCorpus corpus = make_corpus(args.synth);
  const CoTrainConfig cfg = loop_config(args.resolve, args.iters, args.threshold, args.synth.seed);
  try {
    return write_experiment("noise-sweep", args, cfg, run_noise_sweep(corpus, cfg, args.fractions, args.repeats));
  } catch (const ConfigError& e) {
    throw InputError(e.what());
  }
}

int cmd_data_scaling(const ExperimentArgs& args) {
  const SynthCorpus corpus = make_corpus(args.synth);
  const CoTrainConfig cfg = loop_config(args.resolve, args.iters, args.threshold, args.synth.seed);
  try {
    return write_experiment("data-scaling", args, cfg, run_data_scaling(corpus, cfg, args.fractions, args.repeats));
  } catch (const ConfigError& e) {
    throw InputError(e.what());
  }
}

}  // namespace coannot::cli
