#include "coannot/cotrain.hpp"

#include <cmath>

#include <json.hpp>

#include "coannot/random.hpp"

namespace coannot {

void CoTrainConfig::validate() const {
  if (n_iter < 1) throw ConfigError("n_iter must be >= 1");
  if (!(tau > 0.0 && tau <= 1.0)) throw ConfigError("tau must be in (0, 1]");
  main_cfg.validate();
  aux_cfg.validate();
}

std::uint64_t iteration_seed(const CoTrainConfig& cfg, int k, View view) {
  const TrainConfig& tc = view == View::Main ? cfg.main_cfg : cfg.aux_cfg;
  return rng::derive(cfg.seed, 2 * static_cast<std::uint64_t>(k) + (view == View::Aux ? 1 : 0)) ^ tc.seed;
}

const IterationRecord* RunHistory::find(int k, View view) const {
  for (const auto& r : records)
    if (r.k == k && r.view == view) return &r;
  return nullptr;
}

EmptyTrainingSetError::EmptyTrainingSetError(int k, Strategy s, View produced_for, CoTrainResult partial)
    : Error("iteration " + std::to_string(k) + " produced an empty " +
            (produced_for == View::Aux ? "auxiliary" : "main") + " training set (strategy " +
            std::string(to_string(s)) + ")"),
      k_(k),
      strategy_(s),
      partial_(std::move(partial)) {}

TrainingSet score_samples(const Model& main, const FeatureTable& features) {
  TrainingSet out;
  for (std::size_t r = 0; r < features.size(); ++r)
    out.emplace(features.id(r), to_label_set(predict_scores(main, features.dense(r))));
  return out;
}

TrainingSet annotate(const Model& main, std::span<const Sample> corpus, double tau) {
  if (!(tau > 0.0 && tau <= 1.0)) throw ConfigError("tau must be in (0, 1]");
  TrainingSet out;
  for (const Sample& s : corpus) out.emplace(s.id, threshold_labels(predict_scores(main, s.features), tau));
  return out;
}

namespace {

// Overlays trusted labels; only samples accepted by `keep` are touched.
template <typename Keep>
void overlay(TrainingSet& target, const std::optional<TrainingSet>& extra, Keep keep) {
  if (!extra) return;
  for (const auto& [id, labels] : *extra)
    if (keep(id)) target[id] = labels;
}

std::optional<double> changed_fraction(const TrainingSet& now, const TrainingSet* before) {
  if (!before) return std::nullopt;
  std::size_t changed = 0;
  for (const auto& [id, labels] : now) {
    auto it = before->find(id);
    const ClassSet prev = it == before->end() ? ClassSet{} : classes_of(it->second);
    if (classes_of(labels) != prev) ++changed;
  }
  return now.empty() ? 0.0 : static_cast<double>(changed) / static_cast<double>(now.size());
}

}  // namespace

CoTrainResult run_with_initial(const FeatureTable& table, const Ontology& o, const TrainingSet& initial,
                               const CoTrainConfig& cfg, const GoldLabels* gold) {
  cfg.validate();
  if (table.size() == 0) throw ConfigError("empty corpus");
  if (initial.empty()) throw NoSupervisionError("no organic supervision found: no sample text matches the lexicon");
  for (const auto& [id, labels] : initial)
    if (!table.row(id)) throw ConfigError("initial labels reference unknown sample \"" + id + "\"");
  if (cfg.extra_labeled) {
    for (const auto& [id, labels] : *cfg.extra_labeled) {
      if (!table.row(id)) throw ConfigError("extra labels reference unknown sample \"" + id + "\"");
      for (const auto& [c, s] : labels) o.check(c);
    }
  }
  auto has_text = [&](const std::string& id) { return table.has_text(*table.row(id)); };
  auto any = [](const std::string&) { return true; };

  CoTrainResult result;
  result.initial = initial;
  TrainingSet current = initial;
  overlay(current, cfg.extra_labeled, any);

  TrainingSet prev_main_labels, prev_aux_labels;
  for (int k = 1; k <= cfg.n_iter; ++k) {
    // Main view: f <- Train(D^{k-1}); D_T^k <- Resolve(f(X), D0).
    TrainConfig main_cfg = cfg.main_cfg;
    main_cfg.seed = iteration_seed(cfg, k, View::Main);
    TrainResult main = train(current, table, View::Main, main_cfg, o);

    TrainingSet main_scores = score_samples(main.model, table);
    TrainingSet main_labels, text_preds;
    ClassSet main_confident;
    for (const auto& [id, scores] : main_scores) {
      LabelSet labels = threshold_labels(scores, cfg.tau);
      for (const auto& [c, s] : labels) main_confident.insert(c);
      if (has_text(id)) text_preds.emplace_hint(text_preds.end(), id, labels);
      main_labels.emplace_hint(main_labels.end(), id, std::move(labels));
    }
    TrainingSet text_initial;
    for (const auto& [id, labels] : initial)
      if (has_text(id)) text_initial.emplace_hint(text_initial.end(), id, labels);
    TrainingSet aux_set = resolve_all(cfg.strategy, text_initial, text_preds, o);
    overlay(aux_set, cfg.extra_labeled, has_text);

    IterationRecord main_rec;
    main_rec.k = k;
    main_rec.view = View::Main;
    main_rec.train_size = current.size();
    main_rec.train_classes = distinct_classes(current).size();
    main_rec.produced_size = aux_set.size();
    main_rec.produced_classes = distinct_classes(aux_set).size();
    main_rec.train_loss = main.final_loss();
    main_rec.high_confidence_classes = main_confident.size();
    main_rec.changed_fraction = changed_fraction(main_labels, k == 1 ? nullptr : &prev_main_labels);
    if (gold) main_rec.eval = evaluate(main_scores, *gold, o, cfg.tau);
    result.history.records.push_back(main_rec);
    result.main = std::move(main.model);
    prev_main_labels = std::move(main_labels);

    if (aux_set.empty()) throw EmptyTrainingSetError(k, cfg.strategy, View::Aux, result);

    // Aux view: f_T <- Train(D_T^k); D^k <- Resolve(f_T(T), D0). Samples
    // without text pass the main prediction through.
    TrainConfig aux_cfg = cfg.aux_cfg;
    aux_cfg.seed = iteration_seed(cfg, k, View::Aux);
    TrainResult aux = train(aux_set, table, View::Aux, aux_cfg, o);

    TrainingSet aux_scores, aux_labels, next_preds;
    ClassSet aux_confident;
    for (std::size_t r = 0; r < table.size(); ++r) {
      const std::string& id = table.id(r);
      if (!table.has_text(r)) {
        next_preds.emplace_hint(next_preds.end(), id, prev_main_labels.at(id));
        continue;
      }
      LabelSet scores = to_label_set(predict_scores(aux.model, table.text(r)));
      LabelSet labels = threshold_labels(scores, cfg.tau);
      for (const auto& [c, s] : labels) aux_confident.insert(c);
      next_preds.emplace_hint(next_preds.end(), id, labels);
      aux_labels.emplace_hint(aux_labels.end(), id, std::move(labels));
      if (gold) aux_scores.emplace_hint(aux_scores.end(), id, std::move(scores));
    }
    TrainingSet next = resolve_all(cfg.strategy, initial, next_preds, o);
    overlay(next, cfg.extra_labeled, any);

    IterationRecord aux_rec;
    aux_rec.k = k;
    aux_rec.view = View::Aux;
    aux_rec.train_size = aux_set.size();
    aux_rec.train_classes = main_rec.produced_classes;
    aux_rec.produced_size = next.size();
    aux_rec.produced_classes = distinct_classes(next).size();
    aux_rec.train_loss = aux.final_loss();
    aux_rec.high_confidence_classes = aux_confident.size();
    aux_rec.changed_fraction = changed_fraction(aux_labels, k == 1 ? nullptr : &prev_aux_labels);
    if (gold) {
      GoldLabels text_gold;
      for (const auto& [id, classes] : *gold)
        if (auto r = table.row(id); r && table.has_text(*r)) text_gold.emplace(id, classes);
      aux_rec.eval = evaluate(aux_scores, text_gold, o, cfg.tau);
    }
    result.history.records.push_back(aux_rec);
    result.aux = std::move(aux.model);
    prev_aux_labels = std::move(aux_labels);

    if (next.empty()) throw EmptyTrainingSetError(k, cfg.strategy, View::Main, result);
    current = std::move(next);
  }
  return result;
}

CoTrainResult run(std::span<const Sample> corpus, const Ontology& o, const Lexicon& lex, const CoTrainConfig& cfg,
                  const GoldLabels* gold) {
  FeatureTable table(corpus);
  return run_with_initial(table, o, distant_labels(lex, corpus), cfg, gold);
}

std::string history_to_json(const RunHistory& history) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& r : history.records) {
    nlohmann::json j;
    j["k"] = r.k;
    j["view"] = to_string(r.view);
    j["train_size"] = r.train_size;
    j["train_classes"] = r.train_classes;
    j["produced_size"] = r.produced_size;
    j["produced_classes"] = r.produced_classes;
    j["train_loss"] = r.train_loss;
    j["high_confidence_classes"] = r.high_confidence_classes;
    j["changed_fraction"] = r.changed_fraction ? nlohmann::json(*r.changed_fraction) : nlohmann::json(nullptr);
    if (r.eval) {
      j["auprc"] = r.eval->auprc;
      j["precision_at_0.5"] = r.eval->precision_at_half.reached ? nlohmann::json(r.eval->precision_at_half.precision)
                                                                 : nlohmann::json(nullptr);
      j["max_achieved_recall"] = r.eval->max_achieved_recall;
    }
    out.push_back(std::move(j));
  }
  return out.dump(2) + "\n";
}

}  // namespace coannot
