#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "coannot/cotrain.hpp"
#include "coannot/labels.hpp"
#include "coannot/lexicon.hpp"
#include "coannot/ontology.hpp"

namespace coannot {

struct SynthConfig {
  std::size_t n_classes = 30;
  std::size_t n_samples = 6000;
  std::size_t feature_dim = 16;
  std::size_t dag_depth = 3;
  std::size_t synonyms_per_class = 5;
  double held_out_synonym_fraction = 0.4;
  double ambiguity_fraction = 0.2;
  double missing_text_fraction = 0.3;
  double feature_noise_sigma = 0.35;
  std::uint64_t seed = 7;

  void validate() const;  // throws ConfigError
};

struct SynthCorpus {
  Ontology ontology;
  Lexicon lexicon;
  Corpus samples;
  GoldLabels gold;
  std::vector<std::string> held_out_terms;  // used in text, absent from the lexicon
};

// Levelled random DAG (each node below the top level takes one parent from the
// level above, a second one with probability 0.3); gold classes are leaves.
// Every leaf owns synonyms of three kinds: plain lexicon terms, held-out
// terms, and ambiguous terms shared with a sibling leaf. Each text mentions
// one synonym of its gold class, picked held-out / ambiguous / plain with the
// configured fractions.
SynthCorpus gen_synthetic(const SynthConfig& cfg);

// Replaces the labels of floor(fraction * |d0|) uniformly chosen samples
// with one uniformly random class at score 1.0.
TrainingSet perturb_labels(const TrainingSet& d0, double fraction, const Ontology& o, std::uint64_t seed);

struct ExperimentRow {
  std::string label;
  double param = 0.0;                 // fraction swept, 0 for strategy rows
  double auprc = 0.0;                 // mean over repeats
  std::optional<double> precision_at_half;  // mean over repeats that reached recall 0.5
  double distinct_classes = 0.0;      // mean high-confidence classes (score >= tau)
  std::vector<double> auprc_per_repeat;
  std::vector<std::size_t> classes_per_repeat;
  std::vector<std::string> notes;     // e.g. early stop of a repeat
};

struct ExperimentReport {
  std::string experiment;
  std::vector<ExperimentRow> rows;

  const ExperimentRow* find(const std::string& label) const;
};

// Final main model of a run, scored on the whole corpus against gold.
EvalSummary evaluate_main(const Model& main, const SynthCorpus& corpus, double tau);

// One full loop per resolution strategy on identical inputs.
ExperimentReport run_strategy_comparison(const SynthCorpus& corpus, const CoTrainConfig& cfg);

// For each fraction, perturbs D0 and runs the loop; repeat r uses
// perturbation and training seeds derived from cfg.seed and r.
ExperimentReport run_noise_sweep(const SynthCorpus& corpus, const CoTrainConfig& cfg,
                                 const std::vector<double>& fractions, int repeats = 1);

// Trains on a random subsample per fraction and repeat and evaluates on the
// whole corpus. Repeat 0 at fraction 1.0 is exactly a plain run.
ExperimentReport run_data_scaling(const SynthCorpus& corpus, const CoTrainConfig& cfg,
                                  const std::vector<double>& fractions, int repeats);

std::string report_to_json(const ExperimentReport& report);
// label<TAB>param<TAB>auprc<TAB>precision_at_0.5<TAB>distinct_classes
std::string report_to_tsv(const ExperimentReport& report);

}  // namespace coannot
