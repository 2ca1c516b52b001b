#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "coannot/cotrain.hpp"
#include "coannot/error.hpp"
#include "coannot/harness.hpp"
#include "coannot/io.hpp"
#include "coannot/metrics.hpp"
#include "coannot/resolve.hpp"

namespace py = pybind11;
using namespace coannot;

namespace {

using ScoreMap = std::map<std::string, double>;

LabelSet to_labels(const ScoreMap& m, const Ontology& o) {
  LabelSet out;
  for (const auto& [id, s] : m) out[o.index_of(id)] = s;
  return out;
}

ScoreMap from_labels(const LabelSet& l, const Ontology& o) {
  ScoreMap out;
  for (const auto& [c, s] : l) out[o.id(c)] = s;
  return out;
}

std::vector<std::string> ids_of(const ClassSet& set, const Ontology& o) {
  std::vector<std::string> out;
  for (ClassIndex c : set) out.push_back(o.id(c));
  std::sort(out.begin(), out.end());
  return out;
}

Strategy strategy_of(const std::string& name) {
  if (auto s = parse_strategy(name)) return *s;
  throw ConfigError("unknown strategy \"" + name + "\"");
}

py::dict summary_dict(const EvalSummary& s) {
  py::dict d;
  d["auprc"] = s.auprc;
  d["precision_at_0.5"] = s.precision_at_half.precision;
  d["precision_at_0.5_reached"] = s.precision_at_half.reached;
  d["max_achieved_recall"] = s.max_achieved_recall;
  d["n_samples"] = s.n_samples;
  d["n_classes_predicted"] = s.n_classes_predicted;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Weakly supervised ontology annotation by co-training";

  // Translators registered later are tried first, so the subclasses win.
  auto error = py::register_exception<Error>(m, "Error");
  py::register_exception<NoSupervisionError>(m, "NoSupervisionError", error.ptr());
  py::register_exception<DivergenceError>(m, "DivergenceError", error.ptr());

  py::class_<Ontology>(m, "Ontology")
      .def_static("from_tsv", &parse_ontology_tsv, py::arg("text"))
      .def_static("from_obo", [](std::string_view t) { return parse_obo_subset(t); }, py::arg("text"))
      .def_static("parse", &parse_ontology_auto, py::arg("text"))
      .def("__len__", &Ontology::class_count)
      .def("ids", [](const Ontology& o) {
        std::vector<std::string> out;
        for (std::size_t i = 0; i < o.class_count(); ++i) out.push_back(o.id(static_cast<ClassIndex>(i)));
        return out;
      })
      .def("name", [](const Ontology& o, std::string_view id) { return o.name(o.index_of(id)); })
      .def("parents", [](const Ontology& o, std::string_view id) {
        std::vector<std::string> out;
        for (ClassIndex p : o.parents(o.index_of(id))) out.push_back(o.id(p));
        return out;
      })
      .def("ancestors", [](const Ontology& o, std::string_view id) { return ids_of(o.ancestors(o.index_of(id)), o); })
      .def("expand", [](const Ontology& o, const std::vector<std::string>& ids) {
        ClassSet set;
        for (const auto& id : ids) set.insert(o.index_of(id));
        return ids_of(o.expand(set), o);
      })
      .def("is_ancestor", [](const Ontology& o, std::string_view a, std::string_view c) {
        return o.is_ancestor(o.index_of(a), o.index_of(c));
      })
      .def("to_tsv", &Ontology::to_tsv);

  py::class_<Lexicon>(m, "Lexicon")
      .def_static("from_ontology", &lexicon_from_ontology, py::arg("ontology"))
      .def_static("from_tsv", &load_lexicon_tsv, py::arg("text"), py::arg("ontology"))
      .def("__len__", &Lexicon::size)
      .def("match", [](const Lexicon& l, std::string_view text, const Ontology& o) { return ids_of(l.match(text), o); },
           py::arg("text"), py::arg("ontology"));

  m.def("tokenize", &tokenize, py::arg("text"));

  m.def("resolve", [](const std::string& strategy, std::optional<ScoreMap> distant, const ScoreMap& predicted,
                      const Ontology& o) {
    std::optional<LabelSet> d;
    if (distant) d = to_labels(*distant, o);
    return from_labels(resolve_sample(strategy_of(strategy), d ? &*d : nullptr, to_labels(predicted, o), o), o);
  }, py::arg("strategy"), py::arg("distant"), py::arg("predicted"), py::arg("ontology"));

  m.def("annotate", [](const std::string& samples_jsonl, const Ontology& o, const Lexicon& lex,
                       const std::string& strategy, int iters, double threshold, std::uint64_t seed) {
    const Corpus corpus = parse_samples_jsonl(samples_jsonl);
    CoTrainConfig cfg;
    cfg.strategy = strategy_of(strategy);
    cfg.n_iter = iters;
    cfg.tau = threshold;
    cfg.seed = seed;
    cfg.validate();
    CoTrainResult r;
    {
      py::gil_scoped_release release;
      r = run(corpus, o, lex, cfg);
    }
    return annotations_to_tsv(annotate(r.main, corpus, cfg.tau), o);
  }, py::arg("samples_jsonl"), py::arg("ontology"), py::arg("lexicon"), py::arg("strategy") = "relation",
     py::arg("iters") = 5, py::arg("threshold") = 0.3, py::arg("seed") = 0,
     "Runs the co-training loop and returns annotations TSV.");

  m.def("evaluate", [](const std::string& pred_tsv, const std::string& gold_tsv, const Ontology& o) {
    return summary_dict(evaluate(parse_annotations_tsv(pred_tsv, o), parse_gold_tsv(gold_tsv, o), o));
  }, py::arg("pred_tsv"), py::arg("gold_tsv"), py::arg("ontology"));

  m.def("synth", [](std::size_t n_classes, std::size_t n_samples, std::uint64_t seed) {
    SynthConfig cfg;
    cfg.n_classes = n_classes;
    cfg.n_samples = n_samples;
    cfg.seed = seed;
    const SynthCorpus c = gen_synthetic(cfg);
    py::dict d;
    d["ontology"] = c.ontology.to_tsv();
    d["lexicon"] = c.lexicon.to_tsv(c.ontology);
    d["samples"] = samples_to_jsonl(c.samples);
    d["gold"] = gold_to_tsv(c.gold, c.ontology);
    return d;
  }, py::arg("n_classes") = 30, py::arg("n_samples") = 6000, py::arg("seed") = 7,
     "Synthetic corpus as a dict of file contents.");
}
