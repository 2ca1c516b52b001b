#include "coannot/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include <json.hpp>

#include "coannot/random.hpp"

namespace coannot {

void SynthConfig::validate() const {
  if (n_classes < 2) throw ConfigError("n_classes must be >= 2");
  if (feature_dim < 2) throw ConfigError("feature_dim must be >= 2");
  if (dag_depth < 1) throw ConfigError("dag_depth must be >= 1");
  if (dag_depth > n_classes) throw ConfigError("dag_depth cannot exceed n_classes");
  if (n_samples < 1) throw ConfigError("n_samples must be >= 1");
  if (synonyms_per_class < 1) throw ConfigError("synonyms_per_class must be >= 1");
  for (double f : {held_out_synonym_fraction, ambiguity_fraction, missing_text_fraction})
    if (!(f >= 0.0 && f <= 1.0)) throw ConfigError("fractions must lie in [0, 1]");
  if (held_out_synonym_fraction + ambiguity_fraction > 1.0 + 1e-12)
    throw ConfigError("held_out_synonym_fraction + ambiguity_fraction must not exceed 1");
  if (!(feature_noise_sigma >= 0.0) || !std::isfinite(feature_noise_sigma))
    throw ConfigError("feature_noise_sigma must be >= 0");
}

namespace {

constexpr double kSecondParentProbability = 0.3;

// Synonym slots per kind; a kind with positive probability gets at least one.
struct SlotCounts {
  std::size_t held_out, ambiguous, plain;
};

SlotCounts slot_counts(const SynthConfig& cfg) {
  auto count = [&](double f) -> std::size_t {
    if (f <= 0.0) return 0;
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(f * cfg.synonyms_per_class)));
  };
  SlotCounts s{count(cfg.held_out_synonym_fraction), count(cfg.ambiguity_fraction), 0};
  const bool needs_plain = cfg.held_out_synonym_fraction + cfg.ambiguity_fraction < 1.0;
  const std::size_t used = s.held_out + s.ambiguous;
  if (used > cfg.synonyms_per_class || (needs_plain && used == cfg.synonyms_per_class))
    throw ConfigError("synonyms_per_class too small for the requested held-out and ambiguous fractions");
  s.plain = cfg.synonyms_per_class - used;
  return s;
}

// Pronounceable consonant-vowel words. None can collide with the filler
// vocabulary, which never ends in a bare vowel after a CV chain.
class WordMaker {
 public:
  explicit WordMaker(rng::Engine& eng) : eng_(eng) {}

  std::string word() {
    static constexpr std::string_view kCons = "bdfgklmnprstvz";
    static constexpr std::string_view kVowels = "aeiou";
    for (;;) {
      std::string w;
      const std::size_t syllables = 2 + rng::below(eng_, 2);
      for (std::size_t i = 0; i < syllables; ++i) {
        w += kCons[rng::below(eng_, kCons.size())];
        w += kVowels[rng::below(eng_, kVowels.size())];
      }
      if (used_.insert(w).second) return w;
    }
  }

  std::string term() {
    std::string t = word();
    if (rng::bernoulli(eng_, 0.3)) t += " " + word();
    return t;
  }

 private:
  rng::Engine& eng_;
  std::set<std::string> used_;
};

constexpr std::string_view kFiller[] = {"sample", "tissue", "patient", "control", "total", "rna",     "extract",
                                        "biopsy", "donor",  "replicate", "batch", "primary", "treated", "untreated",
                                        "adult",  "female", "male",    "pooled",  "profile", "array",   "study"};

std::string make_text(rng::Engine& eng, const std::string& mention) {
  auto filler = [&] { return std::string(kFiller[rng::below(eng, std::size(kFiller))]); };
  switch (rng::below(eng, 4)) {
    case 0: return filler() + " " + mention + " " + filler();
    case 1: return mention + ", " + filler() + " " + std::to_string(1 + rng::below(eng, 40));
    case 2: return filler() + " of " + mention + " (" + filler() + ")";
    default: return filler() + " " + filler() + " from " + mention;
  }
}

}  // namespace

SynthCorpus gen_synthetic(const SynthConfig& cfg) {
  cfg.validate();
  const SlotCounts slots = slot_counts(cfg);
  rng::Engine eng(cfg.seed);
  WordMaker words(eng);

  // Level sizes grow geometrically (1 : 2 : 4 ...), each level non-empty.
  const std::size_t depth = cfg.dag_depth;
  std::vector<std::size_t> level_size(depth, 1);
  {
    double total_weight = std::ldexp(1.0, static_cast<int>(depth)) - 1.0;
    std::size_t assigned = depth;
    for (std::size_t l = 0; l + 1 < depth; ++l) {
      const auto want = static_cast<std::size_t>(
          std::lround(static_cast<double>(cfg.n_classes) * std::ldexp(1.0, static_cast<int>(l)) / total_weight));
      const std::size_t extra = std::min(want > 0 ? want - 1 : 0, cfg.n_classes - assigned);
      level_size[l] += extra;
      assigned += extra;
    }
    level_size[depth - 1] += cfg.n_classes - assigned;
  }

  std::vector<Ontology::NodeSpec> nodes;
  std::vector<std::vector<std::size_t>> levels(depth);
  char idbuf[32];
  for (std::size_t l = 0; l < depth; ++l) {
    for (std::size_t i = 0; i < level_size[l]; ++i) {
      Ontology::NodeSpec spec;
      std::snprintf(idbuf, sizeof idbuf, "SYN:%04zu", nodes.size() + 1);
      spec.id = idbuf;
      spec.name = words.term();
      if (l > 0) {
        const auto& above = levels[l - 1];
        const std::size_t first = above[rng::below(eng, above.size())];
        spec.parents.push_back(nodes[first].id);
        if (above.size() > 1 && rng::bernoulli(eng, kSecondParentProbability)) {
          std::size_t second = first;
          while (second == first) second = above[rng::below(eng, above.size())];
          spec.parents.push_back(nodes[second].id);
        }
      }
      levels[l].push_back(nodes.size());
      nodes.push_back(std::move(spec));
    }
  }

  // Leaves: nodes nobody names as parent.
  std::set<std::string> has_child;
  for (const auto& n : nodes) has_child.insert(n.parents.begin(), n.parents.end());
  std::vector<std::size_t> leaves;
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (!has_child.contains(nodes[i].id)) leaves.push_back(i);

  struct LeafTerms {
    std::vector<std::string> plain, held_out, ambiguous;
  };
  std::vector<LeafTerms> terms(nodes.size());
  std::vector<std::string> held_out_terms;
  for (std::size_t leaf : leaves) {
    LeafTerms& t = terms[leaf];
    for (std::size_t i = 0; i < slots.plain; ++i) {
      t.plain.push_back(words.term());
      nodes[leaf].synonyms.push_back(t.plain.back());
    }
    for (std::size_t i = 0; i < slots.held_out; ++i) {
      t.held_out.push_back(words.term());
      held_out_terms.push_back(t.held_out.back());
    }
  }
  for (std::size_t leaf : leaves) {
    // Partner: a leaf sharing a parent when one exists, else any other leaf.
    std::vector<std::size_t> siblings, others;
    for (std::size_t other : leaves) {
      if (other == leaf) continue;
      others.push_back(other);
      for (const auto& p : nodes[other].parents)
        if (std::find(nodes[leaf].parents.begin(), nodes[leaf].parents.end(), p) != nodes[leaf].parents.end()) {
          siblings.push_back(other);
          break;
        }
    }
    if (nodes[leaf].parents.empty() && siblings.empty())
      for (std::size_t other : others)
        if (nodes[other].parents.empty()) siblings.push_back(other);
    const auto& pool = siblings.empty() ? others : siblings;
    for (std::size_t i = 0; i < slots.ambiguous; ++i) {
      const std::size_t partner = pool[rng::below(eng, pool.size())];
      std::string shared = words.term();
      terms[leaf].ambiguous.push_back(shared);
      nodes[leaf].synonyms.push_back(shared);
      nodes[partner].synonyms.push_back(shared);
    }
  }
  std::sort(held_out_terms.begin(), held_out_terms.end());

  SynthCorpus out;
  std::vector<std::string> leaf_ids;
  for (std::size_t leaf : leaves) leaf_ids.push_back(nodes[leaf].id);
  out.ontology = Ontology::build(nodes);
  out.lexicon = lexicon_from_ontology(out.ontology);
  out.held_out_terms = std::move(held_out_terms);

  std::vector<std::vector<double>> centroids(leaves.size(), std::vector<double>(cfg.feature_dim));
  for (auto& c : centroids)
    for (double& v : c) v = rng::uniform(eng);

  const double p_held = cfg.held_out_synonym_fraction;
  const double p_amb = cfg.ambiguity_fraction;
  char sidbuf[32];
  for (std::size_t i = 0; i < cfg.n_samples; ++i) {
    Sample s;
    std::snprintf(sidbuf, sizeof sidbuf, "s%06zu", i);
    s.id = sidbuf;
    const std::size_t g = rng::below(eng, leaves.size());
    s.features.resize(cfg.feature_dim);
    for (std::size_t j = 0; j < cfg.feature_dim; ++j)
      s.features[j] = centroids[g][j] + cfg.feature_noise_sigma * rng::normal(eng);
    if (!rng::bernoulli(eng, cfg.missing_text_fraction)) {
      const LeafTerms& t = terms[leaves[g]];
      const double u = rng::uniform(eng);
      const std::vector<std::string>* kind = &t.plain;
      if (u < p_held) kind = &t.held_out;
      else if (u < p_held + p_amb) kind = &t.ambiguous;
      if (kind->empty()) kind = !t.plain.empty() ? &t.plain : !t.ambiguous.empty() ? &t.ambiguous : &t.held_out;
      s.text = make_text(eng, (*kind)[rng::below(eng, kind->size())]);
    }
    out.gold.emplace(s.id, ClassSet{out.ontology.index_of(leaf_ids[g])});
    out.samples.push_back(std::move(s));
  }
  return out;
}

TrainingSet perturb_labels(const TrainingSet& d0, double fraction, const Ontology& o, std::uint64_t seed) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) throw ConfigError("perturbation fraction must lie in [0, 1]");
  if (o.class_count() == 0) throw ConfigError("ontology has no classes");
  const auto count = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(d0.size()) + 1e-9));
  std::vector<std::string> ids;
  for (const auto& [id, labels] : d0) ids.push_back(id);
  rng::Engine eng(seed);
  rng::shuffle(ids, eng);
  TrainingSet out = d0;
  for (std::size_t i = 0; i < count; ++i)
    out[ids[i]] = LabelSet{{class_at(rng::below(eng, o.class_count())), 1.0}};
  return out;
}

const ExperimentRow* ExperimentReport::find(const std::string& label) const {
  for (const auto& r : rows)
    if (r.label == label) return &r;
  return nullptr;
}

EvalSummary evaluate_main(const Model& main, const SynthCorpus& corpus, double tau) {
  return evaluate(score_samples(main, FeatureTable(corpus.samples)), corpus.gold, corpus.ontology, tau);
}

namespace {

struct Outcome {
  EvalSummary eval;
  std::string note;
};

// Runs the loop; an early empty-set stop still yields the last main model.
Outcome run_and_score(const FeatureTable& train_table, const TrainingSet& initial, const SynthCorpus& corpus,
                      const FeatureTable& eval_table, const CoTrainConfig& cfg) {
  Outcome out;
  Model main;
  try {
    main = run_with_initial(train_table, corpus.ontology, initial, cfg).main;
  } catch (const EmptyTrainingSetError& e) {
    main = e.partial().main;
    out.note = e.what();
  } catch (const NoSupervisionError& e) {
    out.note = e.what();
    out.eval.n_samples = corpus.gold.size();
    out.eval.precision_at_half = {0.0, false};
    return out;
  }
  out.eval = evaluate(score_samples(main, eval_table), corpus.gold, corpus.ontology, cfg.tau);
  return out;
}

void add_outcome(ExperimentRow& row, const Outcome& o) {
  row.auprc_per_repeat.push_back(o.eval.auprc);
  row.classes_per_repeat.push_back(o.eval.n_classes_predicted);
  if (!o.note.empty()) row.notes.push_back(o.note);
}

void finish_row(ExperimentRow& row, const std::vector<PrecisionAtRecall>& prec) {
  const double n = static_cast<double>(row.auprc_per_repeat.size());
  double a = 0.0, c = 0.0, p = 0.0;
  std::size_t reached = 0;
  for (double v : row.auprc_per_repeat) a += v;
  for (std::size_t v : row.classes_per_repeat) c += static_cast<double>(v);
  for (const auto& pr : prec)
    if (pr.reached) {
      p += pr.precision;
      ++reached;
    }
  row.auprc = a / n;
  row.distinct_classes = c / n;
  if (reached) row.precision_at_half = p / static_cast<double>(reached);
}

}  // namespace

ExperimentReport run_strategy_comparison(const SynthCorpus& corpus, const CoTrainConfig& cfg) {
  ExperimentReport report{"strategy_comparison", {}};
  const FeatureTable table(corpus.samples);
  const TrainingSet d0 = distant_labels(corpus.lexicon, corpus.samples);
  for (Strategy s : kAllStrategies) {
    CoTrainConfig c = cfg;
    c.strategy = s;
    const Outcome o = run_and_score(table, d0, corpus, table, c);
    ExperimentRow row;
    row.label = std::string(to_string(s));
    add_outcome(row, o);
    finish_row(row, {o.eval.precision_at_half});
    report.rows.push_back(std::move(row));
  }
  return report;
}

ExperimentReport run_noise_sweep(const SynthCorpus& corpus, const CoTrainConfig& cfg,
                                 const std::vector<double>& fractions, int repeats) {
  if (repeats < 1) throw ConfigError("repeats must be >= 1");
  if (!std::is_sorted(fractions.begin(), fractions.end())) throw ConfigError("fractions must be sorted ascending");
  ExperimentReport report{"noise_sweep", {}};
  const FeatureTable table(corpus.samples);
  const TrainingSet d0 = distant_labels(corpus.lexicon, corpus.samples);
  for (double f : fractions) {
    ExperimentRow row;
    char buf[32];
    std::snprintf(buf, sizeof buf, "noise=%g", f);
    row.label = buf;
    row.param = f;
    std::vector<PrecisionAtRecall> prec;
    for (int r = 0; r < repeats; ++r) {
      CoTrainConfig c = cfg;
      c.seed = cfg.seed + static_cast<std::uint64_t>(r);
      const TrainingSet noisy = perturb_labels(d0, f, corpus.ontology, rng::derive(c.seed, 0x9015e));
      const Outcome o = run_and_score(table, noisy, corpus, table, c);
      add_outcome(row, o);
      prec.push_back(o.eval.precision_at_half);
    }
    finish_row(row, prec);
    report.rows.push_back(std::move(row));
  }
  return report;
}

ExperimentReport run_data_scaling(const SynthCorpus& corpus, const CoTrainConfig& cfg,
                                  const std::vector<double>& fractions, int repeats) {
  if (repeats < 1) throw ConfigError("repeats must be >= 1");
  for (double f : fractions)
    if (!(f > 0.0 && f <= 1.0)) throw ConfigError("data fractions must lie in (0, 1]");
  ExperimentReport report{"data_scaling", {}};
  const FeatureTable full(corpus.samples);
  for (std::size_t fi = 0; fi < fractions.size(); ++fi) {
    const double f = fractions[fi];
    ExperimentRow row;
    char buf[32];
    std::snprintf(buf, sizeof buf, "data=%g", f);
    row.label = buf;
    row.param = f;
    std::vector<PrecisionAtRecall> prec;
    for (int r = 0; r < repeats; ++r) {
      CoTrainConfig c = cfg;
      c.seed = cfg.seed + static_cast<std::uint64_t>(r);
      std::vector<std::size_t> order(corpus.samples.size());
      for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
      rng::Engine eng(rng::derive(c.seed, 0xda7a0000 + fi));
      rng::shuffle(order, eng);
      const auto keep = std::max<std::size_t>(
          1, static_cast<std::size_t>(std::ceil(f * static_cast<double>(order.size()) - 1e-9)));
      order.resize(keep);
      std::sort(order.begin(), order.end());
      Corpus subset;
      for (std::size_t i : order) subset.push_back(corpus.samples[i]);
      const FeatureTable table(subset);
      const Outcome o = run_and_score(table, distant_labels(corpus.lexicon, subset), corpus, full, c);
      add_outcome(row, o);
      prec.push_back(o.eval.precision_at_half);
    }
    finish_row(row, prec);
    report.rows.push_back(std::move(row));
  }
  return report;
}

std::string report_to_json(const ExperimentReport& report) {
  nlohmann::json j;
  j["experiment"] = report.experiment;
  j["rows"] = nlohmann::json::array();
  for (const auto& r : report.rows) {
    nlohmann::json row;
    row["label"] = r.label;
    row["param"] = r.param;
    row["auprc"] = r.auprc;
    row["precision_at_0.5"] = r.precision_at_half ? nlohmann::json(*r.precision_at_half) : nlohmann::json(nullptr);
    row["distinct_classes"] = r.distinct_classes;
    row["auprc_per_repeat"] = r.auprc_per_repeat;
    row["classes_per_repeat"] = r.classes_per_repeat;
    row["notes"] = r.notes;
    j["rows"].push_back(std::move(row));
  }
  return j.dump(2) + "\n";
}

std::string report_to_tsv(const ExperimentReport& report) {
  std::string out = "label\tparam\tauprc\tprecision_at_0.5\tdistinct_classes\n";
  char buf[256];
  for (const auto& r : report.rows) {
    std::string prec = "NA";
    if (r.precision_at_half) {
      std::snprintf(buf, sizeof buf, "%.17g", *r.precision_at_half);
      prec = buf;
    }
    std::snprintf(buf, sizeof buf, "%s\t%.17g\t%.17g\t%s\t%.17g\n", r.label.c_str(), r.param, r.auprc, prec.c_str(),
                  r.distinct_classes);
    out += buf;
  }
  return out;
}

}  // namespace coannot
