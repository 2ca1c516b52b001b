#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"

using namespace coannot::cli;

namespace {

void add_loop_flags(CLI::App* app, ExperimentArgs& a) {
  app->add_option("--resolve", a.resolve, "standard|predict|union|intersect|relation")->capture_default_str();
  app->add_option("--iters", a.iters, "Co-training iterations")->capture_default_str();
  app->add_option("--threshold", a.threshold, "Confidence threshold")->capture_default_str();
}

void add_synth_flags(CLI::App* app, ExperimentArgs& a) {
  auto& s = a.synth;
  app->add_option("--n-classes", s.n_classes)->capture_default_str();
  app->add_option("--n-samples", s.n_samples)->capture_default_str();
  app->add_option("--feature-dim", s.feature_dim)->capture_default_str();
  app->add_option("--dag-depth", s.dag_depth)->capture_default_str();
  app->add_option("--synonyms-per-class", s.synonyms_per_class)->capture_default_str();
  app->add_option("--held-out", s.held_out_synonym_fraction, "Fraction of synonyms absent from the lexicon")
      ->capture_default_str();
  app->add_option("--ambiguity", s.ambiguity_fraction, "Fraction of texts using a shared synonym")->capture_default_str();
  app->add_option("--missing-text", s.missing_text_fraction)->capture_default_str();
  app->add_option("--noise-sigma", s.feature_noise_sigma)->capture_default_str();
  app->add_option("--seed", s.seed, "Seeds both the corpus and the training loop")->capture_default_str();
  app->add_option("--out-dir", a.out_dir)->required();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weakly supervised ontology annotation by co-training"};
  app.require_subcommand(1);

  AnnotateArgs ann;
  auto* annotate = app.add_subcommand("annotate", "Annotate samples with ontology classes");
  annotate->add_option("--samples", ann.samples, "Samples JSONL")->required();
  auto* onto = annotate->add_option("--ontology", ann.ontology, "Ontology TSV");
  auto* obo = annotate->add_option("--obo", ann.obo, "Ontology in OBO format");
  onto->excludes(obo);
  annotate->add_option("--lexicon", ann.lexicon, "Lexicon TSV (default: ontology names and synonyms)");
  annotate->add_option("--labels", ann.labels, "Extra labeled samples (sample_id<TAB>class_id)");
  annotate->add_option("--out", ann.out, "Annotations TSV")->required();
  annotate->add_option("--resolve", ann.resolve)->capture_default_str();
  annotate->add_option("--iters", ann.iters)->capture_default_str();
  annotate->add_option("--threshold", ann.threshold)->capture_default_str();
  annotate->add_option("--seed", ann.seed)->capture_default_str();
  annotate->add_option("--model-out", ann.model_out, "Directory for model JSON");
  annotate->add_option("--history", ann.history, "Per-iteration history JSON");

  EvaluateArgs ev;
  auto* evaluate = app.add_subcommand("evaluate", "Score annotations against gold labels");
  evaluate->add_option("--pred", ev.pred)->required();
  evaluate->add_option("--gold", ev.gold)->required();
  evaluate->add_option("--ontology", ev.ontology)->required();
  evaluate->add_option("--curve", ev.curve, "PR curve TSV");
  evaluate->add_option("--report", ev.report, "Report JSON (default: stdout)");

  ExperimentArgs synth_args;
  auto* synth = app.add_subcommand("synth", "Write a synthetic corpus");
  add_synth_flags(synth, synth_args);

  ExperimentArgs cmp_args;
  auto* compare = app.add_subcommand("strategy-compare", "Compare resolution strategies");
  add_synth_flags(compare, cmp_args);
  add_loop_flags(compare, cmp_args);

  ExperimentArgs noise_args;
  noise_args.fractions = {0.0, 0.2, 0.4, 0.6, 0.8, 0.95};
  auto* noise = app.add_subcommand("noise-sweep", "Perturb initial labels and measure accuracy");
  add_synth_flags(noise, noise_args);
  add_loop_flags(noise, noise_args);
  noise->add_option("--fractions", noise_args.fractions)->delimiter(',')->capture_default_str();
  noise->add_option("--repeats", noise_args.repeats)->capture_default_str();

  ExperimentArgs scale_args;
  scale_args.fractions = {0.1, 0.3, 1.0};
  auto* scaling = app.add_subcommand("data-scaling", "Train on subsamples of the corpus");
  add_synth_flags(scaling, scale_args);
  add_loop_flags(scaling, scale_args);
  scaling->add_option("--fractions", scale_args.fractions)->delimiter(',')->capture_default_str();
  scaling->add_option("--repeats", scale_args.repeats)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInputError;
  }

  try {
    if (*annotate) {
      if (ann.ontology.empty() == ann.obo.empty()) {
        std::cerr << "coannot: exactly one of --ontology or --obo is required\n";
        return kInputError;
      }
      return cmd_annotate(ann);
    }
    if (*evaluate) return cmd_evaluate(ev);
    if (*synth) return cmd_synth(synth_args);
    if (*compare) return cmd_strategy_compare(cmp_args);
    if (*noise) return cmd_noise_sweep(noise_args);
    if (*scaling) return cmd_data_scaling(scale_args);
  } catch (const std::exception& e) {
    return report_error(e);
  }
  return kInputError;
}
