#pragma once

#include <string>
#include <vector>

#include "coannot/labels.hpp"
#include "coannot/ontology.hpp"

namespace coannot {

// Micro-pooled ontology precision/recall. Every predicted and gold class is
// expanded with its ancestors (root excluded) before counting.
struct PrecisionRecall {
  double precision = 1.0;  // 1.0 when nothing is predicted
  double recall = 0.0;     // 0.0 when there is no gold
  std::size_t matched = 0;        // sum |expand(pred) & expand(gold)|
  std::size_t predicted = 0;      // sum |expand(pred)|
  std::size_t relevant = 0;       // sum |expand(gold)|
  std::size_t ignored_samples = 0;  // predicted samples without gold
};

// Gold samples missing from `pred` count as empty predictions.
PrecisionRecall ontology_pr(const Predictions& pred, const GoldLabels& gold, const Ontology& o);

struct PRPoint {
  double recall = 0.0;
  double precision = 1.0;
  double threshold = 1.0;
  bool operator==(const PRPoint&) const = default;
};

struct PRCurve {
  std::vector<PRPoint> points;  // ascending recall, strictly descending threshold
  double max_achieved_recall = 0.0;
  std::size_t ignored_samples = 0;
};

// Sweeps every distinct score in `scored` plus 1.0, from high to low; at
// threshold t a sample predicts {c : score >= t}. Thresholds that predict
// nothing are dropped unless no other point exists.
PRCurve pr_curve(const TrainingSet& scored, const GoldLabels& gold, const Ontology& o);

// Trapezoidal area from recall 0 (first point extended flat) to the largest
// achieved recall. No extrapolation beyond it.
double auprc(const PRCurve& curve);

struct PrecisionAtRecall {
  double precision = 0.0;
  bool reached = false;
};

PrecisionAtRecall precision_at_recall(const PRCurve& curve, double recall);

// threshold<TAB>recall<TAB>precision, one line per point, with a header.
std::string curve_to_tsv(const PRCurve& curve);

struct EvalSummary {
  double auprc = 0.0;
  PrecisionAtRecall precision_at_half;
  double max_achieved_recall = 0.0;
  std::size_t n_samples = 0;
  std::size_t n_classes_predicted = 0;
};

// n_classes_predicted counts distinct classes with score >= min_score.
EvalSummary evaluate(const TrainingSet& scored, const GoldLabels& gold, const Ontology& o, double min_score = 0.0);

}  // namespace coannot
