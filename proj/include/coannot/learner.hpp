#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "coannot/labels.hpp"
#include "coannot/ontology.hpp"
#include "coannot/textfeat.hpp"

namespace coannot {

// Main: dense sample features. Aux: hashed text features.
enum class View { Main, Aux };
enum class LrSchedule { Constant, LinearDecay };
enum class OptimizerKind { RMSProp, SGD };

std::string_view to_string(View v);
std::string_view to_string(LrSchedule s);
std::string_view to_string(OptimizerKind k);

struct TrainConfig {
  int epochs = 20;
  double learning_rate = 0.01;
  double l2_weight = 1e-4;
  double rmsprop_decay = 0.9;
  double rmsprop_epsilon = 1e-8;
  int batch_size = 64;
  std::uint64_t seed = 0;
  LrSchedule lr_schedule = LrSchedule::Constant;
  OptimizerKind optimizer = OptimizerKind::RMSProp;

  // Logistic-regression head: RMSProp, L2 1e-4.
  static TrainConfig main_defaults();
  // Shallow text classifier: 25 epochs of per-sample SGD, learning rate 1.0
  // decayed linearly to zero, no L2.
  static TrainConfig aux_defaults();

  void validate() const;  // throws ConfigError
  bool operator==(const TrainConfig&) const = default;
};

// Per-sample features for both views, computed once per corpus.
class FeatureTable {
 public:
  explicit FeatureTable(std::span<const Sample> corpus);

  std::size_t size() const noexcept { return ids_.size(); }
  std::size_t dim() const noexcept { return dim_; }
  std::optional<std::size_t> row(std::string_view id) const;
  const std::string& id(std::size_t row) const { return ids_[row]; }
  std::span<const double> dense(std::size_t row) const { return {dense_.data() + row * dim_, dim_}; }
  bool has_text(std::size_t row) const { return text_[row].has_value(); }
  // Throws when the sample has no text.
  const SparseVector& text(std::size_t row) const;

 private:
  std::size_t dim_ = 0;
  std::vector<std::string> ids_;
  std::unordered_map<std::string_view, std::size_t> rows_;
  std::vector<double> dense_;
  std::vector<std::optional<SparseVector>> text_;
};

// Linear softmax classifier. Weights are row-major, one row per class, with
// the bias in the last column. Aux models only store the hash buckets seen
// in training (`columns`); every other bucket has weight zero.
class Model {
 public:
  Model() = default;
  Model(View view, std::size_t input_dim, std::vector<std::string> class_ids, std::vector<std::uint32_t> columns = {});

  View view() const noexcept { return view_; }
  std::size_t input_dim() const noexcept { return input_dim_; }
  std::size_t class_count() const noexcept { return class_ids_.size(); }
  const std::vector<std::string>& class_ids() const noexcept { return class_ids_; }
  const std::vector<std::uint32_t>& columns() const noexcept { return columns_; }
  std::size_t stored_columns() const noexcept { return view_ == View::Main ? input_dim_ : columns_.size(); }
  std::size_t stride() const noexcept { return stored_columns() + 1; }
  std::span<const double> weights() const noexcept { return weights_; }
  std::span<double> weights() noexcept { return weights_; }

  std::vector<double> logits(std::span<const double> features) const;
  std::vector<double> logits(const SparseVector& text) const;

  bool operator==(const Model&) const = default;

 private:
  View view_ = View::Main;
  std::size_t input_dim_ = 0;
  std::vector<std::string> class_ids_;
  std::vector<std::uint32_t> columns_;
  std::vector<double> weights_;
};

std::vector<double> softmax(std::span<const double> logits);

// Softmax probabilities over every class. Throws DimensionMismatchError when
// the input does not fit the model's view.
std::vector<double> predict_scores(const Model& m, std::span<const double> features);
std::vector<double> predict_scores(const Model& m, const SparseVector& text);

LabelSet to_label_set(std::span<const double> scores);
// Classes with score >= tau, scores kept.
LabelSet threshold_labels(std::span<const double> scores, double tau);
LabelSet threshold_labels(const LabelSet& scores, double tau);

struct TrainResult {
  Model model;
  std::vector<double> epoch_loss;  // regularized objective after each epoch
  double initial_loss = 0.0;       // objective at the zero model
  int loss_increases = 0;          // epochs whose loss rose by more than 1e-6

  double final_loss() const { return epoch_loss.empty() ? initial_loss : epoch_loss.back(); }
};

// Softmax cross-entropy with L2 on non-bias weights, minimized by mini-batch
// RMSProp or SGD from zero weights. A sample with m labels contributes m
// instances of weight 1/m. Deterministic for a given cfg.seed.
TrainResult train(const TrainingSet& data, const FeatureTable& features, View view, const TrainConfig& cfg,
                  const Ontology& o);
TrainResult train(const TrainingSet& data, std::span<const Sample> corpus, View view, const TrainConfig& cfg,
                  const Ontology& o);

// Small dense problem for checking the analytic gradient.
struct GradientProbe {
  std::size_t class_count = 0;
  std::vector<std::vector<double>> features;
  std::vector<LabelSet> labels;
  std::size_t dim() const { return features.empty() ? 0 : features.front().size(); }
};

GradientProbe random_probe(std::uint64_t seed, std::size_t samples, std::size_t dim, std::size_t classes);

struct LossAndGradient {
  double loss = 0.0;
  std::vector<double> gradient;  // same layout as Model weights
};

// The training objective and its analytic gradient at `weights`
// (class_count x (dim + 1), bias last).
LossAndGradient objective(std::span<const double> weights, const GradientProbe& probe, double l2_weight);

// Max relative error |a - n| / max(|a| + |n|, 1e-8) between the analytic
// gradient and central finite differences (step 1e-5), evaluated at weights
// drawn from N(0, 0.5^2) with cfg.seed.
double gradient_check(const TrainConfig& cfg, const GradientProbe& probe);

// JSON with class ids, view, dimensions and row-major weights. Doubles are
// written in shortest round-trip form, so reading back is exact.
std::string model_to_json(const Model& m);
Model model_from_json(std::string_view json);

}  // namespace coannot
