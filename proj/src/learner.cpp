#include "coannot/learner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <type_traits>

#include <json.hpp>

#include "coannot/error.hpp"
#include "coannot/random.hpp"

namespace coannot {

std::string_view to_string(View v) { return v == View::Main ? "main" : "aux"; }
std::string_view to_string(LrSchedule s) { return s == LrSchedule::Constant ? "constant" : "linear_decay"; }
std::string_view to_string(OptimizerKind k) { return k == OptimizerKind::RMSProp ? "rmsprop" : "sgd"; }

TrainConfig TrainConfig::main_defaults() { return TrainConfig{}; }

TrainConfig TrainConfig::aux_defaults() {
  TrainConfig cfg;
  cfg.epochs = 25;
  cfg.learning_rate = 1.0;
  cfg.l2_weight = 0.0;
  cfg.batch_size = 1;
  cfg.lr_schedule = LrSchedule::LinearDecay;
  cfg.optimizer = OptimizerKind::SGD;
  return cfg;
}

void TrainConfig::validate() const {
  if (epochs < 1) throw ConfigError("epochs must be >= 1");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) throw ConfigError("learning_rate must be > 0");
  if (!(l2_weight >= 0.0) || !std::isfinite(l2_weight)) throw ConfigError("l2_weight must be >= 0");
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (!(rmsprop_decay >= 0.0 && rmsprop_decay < 1.0)) throw ConfigError("rmsprop_decay must be in [0, 1)");
  if (!(rmsprop_epsilon > 0.0)) throw ConfigError("rmsprop_epsilon must be > 0");
}

FeatureTable::FeatureTable(std::span<const Sample> corpus) {
  validate_corpus(corpus);
  dim_ = corpus.empty() ? 0 : corpus.front().features.size();
  ids_.reserve(corpus.size());
  dense_.reserve(corpus.size() * dim_);
  text_.reserve(corpus.size());
  for (const Sample& s : corpus) {
    ids_.push_back(s.id);
    dense_.insert(dense_.end(), s.features.begin(), s.features.end());
    if (s.text) text_.emplace_back(featurize_text(*s.text));
    else text_.emplace_back(std::nullopt);
  }
  for (std::size_t i = 0; i < ids_.size(); ++i) rows_.emplace(ids_[i], i);
}

std::optional<std::size_t> FeatureTable::row(std::string_view id) const {
  auto it = rows_.find(id);
  if (it == rows_.end()) return std::nullopt;
  return it->second;
}

const SparseVector& FeatureTable::text(std::size_t row) const {
  if (!text_[row]) throw ConfigError("sample \"" + ids_[row] + "\" has no text");
  return *text_[row];
}

Model::Model(View view, std::size_t input_dim, std::vector<std::string> class_ids, std::vector<std::uint32_t> columns)
    : view_(view), input_dim_(input_dim), class_ids_(std::move(class_ids)), columns_(std::move(columns)) {
  if (view_ == View::Main && !columns_.empty()) throw ConfigError("main-view model cannot have sparse columns");
  if (!std::is_sorted(columns_.begin(), columns_.end()) ||
      std::adjacent_find(columns_.begin(), columns_.end()) != columns_.end())
    throw ConfigError("model columns must be strictly increasing");
  if (!columns_.empty() && columns_.back() >= input_dim_) throw ConfigError("model column out of range");
  weights_.assign(class_ids_.size() * stride(), 0.0);
}

std::vector<double> Model::logits(std::span<const double> x) const {
  if (view_ != View::Main || x.size() != input_dim_)
    throw DimensionMismatchError("expected " + std::to_string(input_dim_) + " dense features, got " +
                                 std::to_string(x.size()));
  const std::size_t s = stride();
  std::vector<double> z(class_count());
  for (std::size_t c = 0; c < z.size(); ++c) {
    const double* w = weights_.data() + c * s;
    double acc = w[s - 1];
    for (std::size_t j = 0; j < x.size(); ++j) acc += w[j] * x[j];
    z[c] = acc;
  }
  return z;
}

std::vector<double> Model::logits(const SparseVector& x) const {
  if (view_ != View::Aux) throw DimensionMismatchError("text features given to a main-view model");
  if (!x.indices.empty() && x.indices.back() >= input_dim_)
    throw DimensionMismatchError("text feature index beyond model input dimension");
  const std::size_t s = stride();
  std::vector<double> z(class_count());
  for (std::size_t c = 0; c < z.size(); ++c) z[c] = weights_[c * s + s - 1];
  for (std::size_t k = 0; k < x.size(); ++k) {
    auto it = std::lower_bound(columns_.begin(), columns_.end(), x.indices[k]);
    if (it == columns_.end() || *it != x.indices[k]) continue;
    const std::size_t j = static_cast<std::size_t>(it - columns_.begin());
    for (std::size_t c = 0; c < z.size(); ++c) z[c] += weights_[c * s + j] * x.values[k];
  }
  return z;
}

std::vector<double> softmax(std::span<const double> z) {
  std::vector<double> p(z.begin(), z.end());
  if (p.empty()) return p;
  const double mx = *std::max_element(p.begin(), p.end());
  double sum = 0.0;
  for (double& v : p) {
    v = std::exp(v - mx);
    sum += v;
  }
  for (double& v : p) v /= sum;
  return p;
}

std::vector<double> predict_scores(const Model& m, std::span<const double> features) {
  return softmax(m.logits(features));
}

std::vector<double> predict_scores(const Model& m, const SparseVector& text) { return softmax(m.logits(text)); }

LabelSet to_label_set(std::span<const double> scores) {
  LabelSet out;
  for (std::size_t c = 0; c < scores.size(); ++c) out.emplace_hint(out.end(), class_at(c), scores[c]);
  return out;
}

LabelSet threshold_labels(std::span<const double> scores, double tau) {
  LabelSet out;
  for (std::size_t c = 0; c < scores.size(); ++c)
    if (scores[c] >= tau) out.emplace_hint(out.end(), class_at(c), scores[c]);
  return out;
}

LabelSet threshold_labels(const LabelSet& scores, double tau) {
  LabelSet out;
  for (const auto& [c, s] : scores)
    if (s >= tau) out.emplace_hint(out.end(), c, s);
  return out;
}

namespace {

struct Instance {
  std::size_t row;
  std::uint32_t label;
  double weight;
};

struct DenseRow {
  std::span<const double> x;

  double dot(const double* w) const {
    double acc = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) acc += w[j] * x[j];
    return acc;
  }
  void axpy(double* g, double a) const {
    for (std::size_t j = 0; j < x.size(); ++j) g[j] += a * x[j];
  }
};

// Sparse row over a model's compact column space.
struct CompactRow {
  std::vector<std::uint32_t> cols;
  std::vector<double> vals;

  double dot(const double* w) const {
    double acc = 0.0;
    for (std::size_t k = 0; k < cols.size(); ++k) acc += w[cols[k]] * vals[k];
    return acc;
  }
  void axpy(double* g, double a) const {
    for (std::size_t k = 0; k < cols.size(); ++k) g[cols[k]] += a * vals[k];
  }
};

// Mean weighted cross-entropy over `batch`. When `grad` is non-null, adds the
// gradient of that mean (bias in the last column of each row).
template <typename Row>
double data_loss(std::span<const double> w, std::span<const Row> rows, std::span<const Instance> batch,
                 std::size_t classes, std::size_t stride, double* grad, std::vector<double>& z) {
  double wsum = 0.0;
  for (const Instance& in : batch) wsum += in.weight;
  z.resize(classes);
  double loss = 0.0;
  for (const Instance& in : batch) {
    const Row& x = rows[in.row];
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < classes; ++c) {
      const double* wc = w.data() + c * stride;
      z[c] = wc[stride - 1] + x.dot(wc);
      mx = std::max(mx, z[c]);
    }
    double sum = 0.0;
    for (std::size_t c = 0; c < classes; ++c) sum += std::exp(z[c] - mx);
    const double lse = mx + std::log(sum);
    loss += in.weight * (lse - z[in.label]);
    if (grad) {
      const double scale = in.weight / wsum;
      for (std::size_t c = 0; c < classes; ++c) {
        const double p = std::exp(z[c] - lse);
        const double coef = scale * (p - (c == in.label ? 1.0 : 0.0));
        double* gc = grad + c * stride;
        x.axpy(gc, coef);
        gc[stride - 1] += coef;
      }
    }
  }
  return loss / wsum;
}

double l2_penalty(std::span<const double> w, std::size_t stride, double l2) {
  if (l2 == 0.0) return 0.0;
  double sq = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k)
    if (k % stride != stride - 1) sq += w[k] * w[k];
  return 0.5 * l2 * sq;
}

template <typename Row>
TrainResult fit(Model model, const std::vector<Row>& rows, std::vector<Instance> instances, const TrainConfig& cfg,
                bool sparse_updates) {
  const std::size_t classes = model.class_count();
  const std::size_t stride = model.stride();
  std::span<double> w = model.weights();
  std::vector<double> z;
  const std::span<const Row> row_span(rows);

  auto full_loss = [&] {
    return data_loss<Row>(w, row_span, instances, classes, stride, nullptr, z) + l2_penalty(w, stride, cfg.l2_weight);
  };

  TrainResult result;
  result.initial_loss = full_loss();

  std::vector<double> grad(w.size(), 0.0);
  std::vector<double> sq_avg(cfg.optimizer == OptimizerKind::RMSProp ? w.size() : 0, 0.0);
  std::vector<Instance> batch;
  std::vector<std::uint32_t> touched;
  rng::Engine eng(cfg.seed);

  const std::size_t n = instances.size();
  const std::size_t bsz = static_cast<std::size_t>(cfg.batch_size);
  const std::size_t batches = (n + bsz - 1) / bsz;
  const double total_steps = static_cast<double>(batches) * cfg.epochs;
  std::size_t step = 0;
  double previous = result.initial_loss;

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    rng::shuffle(instances, eng);
    for (std::size_t start = 0; start < n; start += bsz, ++step) {
      batch.assign(instances.begin() + start, instances.begin() + std::min(n, start + bsz));
      data_loss<Row>(w, row_span, batch, classes, stride, grad.data(), z);

      double lr = cfg.learning_rate;
      if (cfg.lr_schedule == LrSchedule::LinearDecay) lr *= 1.0 - static_cast<double>(step) / total_steps;

      if (sparse_updates) {
        // Only columns present in the batch carry gradient.
        touched.clear();
        for (const Instance& in : batch) {
          if constexpr (std::is_same_v<Row, CompactRow>)
            touched.insert(touched.end(), rows[in.row].cols.begin(), rows[in.row].cols.end());
        }
        std::sort(touched.begin(), touched.end());
        touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
        touched.push_back(static_cast<std::uint32_t>(stride - 1));
        for (std::size_t c = 0; c < classes; ++c) {
          for (std::uint32_t j : touched) {
            double& g = grad[c * stride + j];
            w[c * stride + j] -= lr * g;
            g = 0.0;
          }
        }
      } else {
        for (std::size_t k = 0; k < w.size(); ++k) {
          double g = grad[k];
          if (k % stride != stride - 1) g += cfg.l2_weight * w[k];
          if (cfg.optimizer == OptimizerKind::RMSProp) {
            sq_avg[k] = cfg.rmsprop_decay * sq_avg[k] + (1.0 - cfg.rmsprop_decay) * g * g;
            w[k] -= lr * g / (std::sqrt(sq_avg[k]) + cfg.rmsprop_epsilon);
          } else {
            w[k] -= lr * g;
          }
          grad[k] = 0.0;
        }
      }
    }

    const double loss = full_loss();
    if (!std::isfinite(loss)) throw DivergenceError("non-finite loss", epoch);
    if (loss > previous + 1e-6) ++result.loss_increases;
    previous = loss;
    result.epoch_loss.push_back(loss);
  }
  result.model = std::move(model);
  return result;
}

std::vector<std::string> class_ids_of(const Ontology& o) {
  std::vector<std::string> ids;
  ids.reserve(o.class_count());
  for (std::size_t i = 0; i < o.class_count(); ++i) ids.push_back(o.id(class_at(i)));
  return ids;
}

}  // namespace

TrainResult train(const TrainingSet& data, const FeatureTable& table, View view, const TrainConfig& cfg,
                  const Ontology& o) {
  cfg.validate();
  if (data.empty()) throw ConfigError("empty training set");
  if (o.class_count() == 0) throw ConfigError("ontology has no classes");

  std::vector<std::size_t> sample_rows;
  std::vector<Instance> instances;
  sample_rows.reserve(data.size());
  for (const auto& [id, labels] : data) {
    const auto r = table.row(id);
    if (!r) throw ConfigError("training set references unknown sample \"" + id + "\"");
    if (labels.empty()) throw ConfigError("training entry \"" + id + "\" has no labels");
    const double weight = 1.0 / static_cast<double>(labels.size());
    for (const auto& [c, score] : labels) {
      o.check(c);
      instances.push_back({sample_rows.size(), to_int(c), weight});
    }
    sample_rows.push_back(*r);
  }

  if (view == View::Main) {
    if (table.dim() == 0) throw DimensionMismatchError("main view needs at least one feature");
    std::vector<DenseRow> rows;
    rows.reserve(sample_rows.size());
    for (std::size_t r : sample_rows) rows.push_back({table.dense(r)});
    return fit(Model(View::Main, table.dim(), class_ids_of(o)), rows, std::move(instances), cfg, false);
  }

  std::vector<std::uint32_t> columns;
  for (std::size_t r : sample_rows) {
    const SparseVector& t = table.text(r);
    columns.insert(columns.end(), t.indices.begin(), t.indices.end());
  }
  std::sort(columns.begin(), columns.end());
  columns.erase(std::unique(columns.begin(), columns.end()), columns.end());

  std::vector<CompactRow> rows;
  rows.reserve(sample_rows.size());
  for (std::size_t r : sample_rows) {
    const SparseVector& t = table.text(r);
    CompactRow row;
    row.vals = t.values;
    row.cols.reserve(t.size());
    for (std::uint32_t idx : t.indices)
      row.cols.push_back(static_cast<std::uint32_t>(std::lower_bound(columns.begin(), columns.end(), idx) -
                                                    columns.begin()));
    rows.push_back(std::move(row));
  }
  const bool sparse = cfg.optimizer == OptimizerKind::SGD && cfg.l2_weight == 0.0;
  return fit(Model(View::Aux, kHashBuckets, class_ids_of(o), std::move(columns)), rows, std::move(instances), cfg,
             sparse);
}

TrainResult train(const TrainingSet& data, std::span<const Sample> corpus, View view, const TrainConfig& cfg,
                  const Ontology& o) {
  return train(data, FeatureTable(corpus), view, cfg, o);
}

GradientProbe random_probe(std::uint64_t seed, std::size_t samples, std::size_t dim, std::size_t classes) {
  rng::Engine eng(seed);
  GradientProbe probe;
  probe.class_count = classes;
  for (std::size_t i = 0; i < samples; ++i) {
    std::vector<double> x(dim);
    for (double& v : x) v = rng::normal(eng);
    probe.features.push_back(std::move(x));
    LabelSet labels;
    labels[class_at(rng::below(eng, classes))] = 1.0;
    if (rng::bernoulli(eng, 0.3)) labels[class_at(rng::below(eng, classes))] = 1.0;
    probe.labels.push_back(std::move(labels));
  }
  return probe;
}

LossAndGradient objective(std::span<const double> weights, const GradientProbe& probe, double l2_weight) {
  const std::size_t stride = probe.dim() + 1;
  if (weights.size() != probe.class_count * stride) throw DimensionMismatchError("weight size does not match probe");
  std::vector<DenseRow> rows;
  std::vector<Instance> instances;
  for (std::size_t i = 0; i < probe.features.size(); ++i) {
    rows.push_back({probe.features[i]});
    const double weight = 1.0 / static_cast<double>(probe.labels[i].size());
    for (const auto& [c, s] : probe.labels[i]) instances.push_back({i, to_int(c), weight});
  }
  LossAndGradient out;
  out.gradient.assign(weights.size(), 0.0);
  std::vector<double> z;
  out.loss = data_loss<DenseRow>(weights, rows, instances, probe.class_count, stride, out.gradient.data(), z) +
             l2_penalty(weights, stride, l2_weight);
  for (std::size_t k = 0; k < weights.size(); ++k)
    if (k % stride != stride - 1) out.gradient[k] += l2_weight * weights[k];
  return out;
}

double gradient_check(const TrainConfig& cfg, const GradientProbe& probe) {
  constexpr double h = 1e-5;
  rng::Engine eng(cfg.seed);
  std::vector<double> w(probe.class_count * (probe.dim() + 1));
  for (double& v : w) v = 0.5 * rng::normal(eng);
  const std::vector<double> analytic = objective(w, probe, cfg.l2_weight).gradient;
  double worst = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) {
    const double saved = w[k];
    w[k] = saved + h;
    const double up = objective(w, probe, cfg.l2_weight).loss;
    w[k] = saved - h;
    const double down = objective(w, probe, cfg.l2_weight).loss;
    w[k] = saved;
    const double numeric = (up - down) / (2.0 * h);
    const double err = std::abs(analytic[k] - numeric) / std::max(std::abs(analytic[k]) + std::abs(numeric), 1e-8);
    worst = std::max(worst, err);
  }
  return worst;
}

std::string model_to_json(const Model& m) {
  nlohmann::json j;
  j["format"] = "coannot-model";
  j["version"] = 1;
  j["view"] = to_string(m.view());
  j["input_dim"] = m.input_dim();
  j["class_ids"] = m.class_ids();
  j["columns"] = m.columns();
  j["rows"] = m.class_count();
  j["cols"] = m.stride();
  j["weights"] = std::vector<double>(m.weights().begin(), m.weights().end());
  return j.dump() + "\n";
}

Model model_from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("model JSON: ") + e.what(), 0);
  }
  try {
    if (j.at("format") != "coannot-model") throw ParseError("not a model file", 0);
    const std::string view = j.at("view");
    if (view != "main" && view != "aux") throw ParseError("unknown view \"" + view + "\"", 0);
    Model m(view == "main" ? View::Main : View::Aux, j.at("input_dim").get<std::size_t>(),
            j.at("class_ids").get<std::vector<std::string>>(), j.at("columns").get<std::vector<std::uint32_t>>());
    const auto weights = j.at("weights").get<std::vector<double>>();
    if (j.at("rows").get<std::size_t>() != m.class_count() || j.at("cols").get<std::size_t>() != m.stride() ||
        weights.size() != m.weights().size())
      throw ParseError("model weight shape mismatch", 0);
    std::copy(weights.begin(), weights.end(), m.weights().begin());
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("model JSON: ") + e.what(), 0);
  }
}

}  // namespace coannot
