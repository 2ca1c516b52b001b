#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "coannot/error.hpp"
#include "coannot/labels.hpp"
#include "coannot/learner.hpp"
#include "coannot/lexicon.hpp"
#include "coannot/metrics.hpp"
#include "coannot/ontology.hpp"
#include "coannot/resolve.hpp"

namespace coannot {

struct CoTrainConfig {
  int n_iter = 5;
  double tau = 0.3;
  Strategy strategy = Strategy::Relation;
  TrainConfig main_cfg = TrainConfig::main_defaults();
  TrainConfig aux_cfg = TrainConfig::aux_defaults();
  std::uint64_t seed = 0;
  // Trusted labels merged into every training set, overriding resolution.
  std::optional<TrainingSet> extra_labeled;

  void validate() const;  // throws ConfigError
};

// Seed used for the classifier of `view` in iteration k (1-based).
std::uint64_t iteration_seed(const CoTrainConfig& cfg, int k, View view);

// One record per half-iteration: the main step (train f on D^{k-1}, produce
// D_T^k) and the aux step (train f_T on D_T^k, produce D^k).
struct IterationRecord {
  int k = 0;
  View view = View::Main;
  std::size_t train_size = 0;
  std::size_t train_classes = 0;
  std::size_t produced_size = 0;
  std::size_t produced_classes = 0;
  double train_loss = 0.0;
  // Distinct classes with score >= tau over the samples this classifier scored.
  std::size_t high_confidence_classes = 0;
  // Fraction of scored samples whose thresholded label set differs from the
  // same classifier's previous iteration. Absent for k = 1.
  std::optional<double> changed_fraction;
  std::optional<EvalSummary> eval;  // when gold labels were supplied
};

struct RunHistory {
  std::vector<IterationRecord> records;

  const IterationRecord* find(int k, View view) const;
};

struct CoTrainResult {
  Model main;
  Model aux;
  RunHistory history;
  TrainingSet initial;  // D0 as used by the loop
};

// Resolution produced an empty training set. Carries what the loop had built
// so far: the main model of iteration k and the history up to that point.
class EmptyTrainingSetError : public Error {
 public:
  EmptyTrainingSetError(int k, Strategy s, View produced_for, CoTrainResult partial);
  int iteration() const noexcept { return k_; }
  Strategy strategy() const noexcept { return strategy_; }
  const CoTrainResult& partial() const noexcept { return partial_; }

 private:
  int k_;
  Strategy strategy_;
  CoTrainResult partial_;
};

// D0 from lexicon matching, then the alternating loop. Throws
// NoSupervisionError when no sample text matches the lexicon.
CoTrainResult run(std::span<const Sample> corpus, const Ontology& o, const Lexicon& lex, const CoTrainConfig& cfg,
                  const GoldLabels* gold = nullptr);

// Same loop with a caller-supplied D0 (e.g. a perturbed one).
CoTrainResult run_with_initial(const FeatureTable& features, const Ontology& o, const TrainingSet& initial,
                               const CoTrainConfig& cfg, const GoldLabels* gold = nullptr);

// Full softmax scores of the main model for every sample.
TrainingSet score_samples(const Model& main, const FeatureTable& features);

// Thresholded main-model labels for every sample; a sample may get none.
TrainingSet annotate(const Model& main, std::span<const Sample> corpus, double tau);

std::string history_to_json(const RunHistory& history);

}  // namespace coannot
