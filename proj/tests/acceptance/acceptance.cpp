// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

#include "coannot/cotrain.hpp"
#include "coannot/error.hpp"
#include "coannot/harness.hpp"
#include "coannot/io.hpp"
#include "coannot/metrics.hpp"
#include "oracles.hpp"

using namespace coannot;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void criterion(int n, const char* title, const std::function<Verdict()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Verdict v;
  try {
    v = body();
  } catch (const std::exception& e) {
    v = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("[%s] %d %s: %s (%.1f s)\n", v.pass ? "PASS" : "FAIL", n, title, v.detail.c_str(), secs);
  std::fflush(stdout);
  if (!v.pass) ++failures;
}

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---- 1: resolve ------------------------------------------------------------

Verdict resolve_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  std::size_t cases = 0, mismatches = 0;
  for (std::size_t n = 1; n <= 6; ++n) {
    const auto subsets = oracle::small_subsets(n, 3);
    for (const auto& rel : oracle::all_posets(n)) {
      const Ontology o = oracle::from_relation(rel);
      for (const auto& ds : subsets) {
        LabelSet d;
        for (ClassIndex c : ds) d[c] = 0.1 + 0.1 * to_int(c);
        for (const auto& ps : subsets) {
          LabelSet p;
          for (ClassIndex c : ps) p[c] = 0.15 + 0.07 * to_int(c);
          for (Strategy s : kAllStrategies) {
            ++cases;
            if (resolve_sample(s, &d, p, o) != oracle::resolve(s, &d, p, o)) ++mismatches;
            if (ds.empty() && resolve_sample(s, nullptr, p, o) != p) ++mismatches;
          }
        }
      }
    }
  }
  // Flat ontology with 6 classes: Relation and Intersect coincide.
  std::vector<std::uint32_t> flat(6, 0);
  const Ontology fo = oracle::from_relation(flat);
  std::size_t flat_mismatch = 0;
  const auto subsets = oracle::small_subsets(6, 6);
  for (const auto& ds : subsets)
    for (const auto& ps : subsets) {
      LabelSet d, p;
      for (ClassIndex c : ds) d[c] = 1.0;
      for (ClassIndex c : ps) p[c] = 0.5;
      if (resolve_sample(Strategy::Relation, &d, p, fo) != resolve_sample(Strategy::Intersect, &d, p, fo))
        ++flat_mismatch;
    }
  const double secs = seconds_since(t0);
  Verdict v;
  v.pass = mismatches == 0 && flat_mismatch == 0 && secs < 30.0;
  v.detail = std::to_string(cases) + " cases on all posets up to 6 nodes, " + std::to_string(mismatches) +
             " mismatches; flat relation/intersect mismatches " + std::to_string(flat_mismatch);
  return v;
}

// ---- 2: metrics ------------------------------------------------------------

Verdict metrics_oracle() {
  rng::Engine eng(2024);
  std::size_t mismatches = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng::below(eng, 12);
    const Ontology o = testutil::random_dag(eng, n, rng::uniform(eng) * 0.5);
    GoldLabels gold;
    Predictions pred;
    const auto samples = 1 + rng::below(eng, 50);
    for (std::uint64_t i = 0; i < samples; ++i) {
      const std::string id = "s" + std::to_string(i);
      const auto k = 1 + rng::below(eng, 2);
      for (std::uint64_t j = 0; j < k; ++j) gold[id].insert(testutil::idx(rng::below(eng, n)));
      for (std::size_t c = 0; c < n; ++c)
        if (rng::bernoulli(eng, 0.2)) pred[id].insert(testutil::idx(c));
    }
    const PrecisionRecall pr = ontology_pr(pred, gold, o);
    const auto ref = oracle::pool(pred, gold, o);
    const double p = ref.predicted ? static_cast<double>(ref.matched) / static_cast<double>(ref.predicted) : 1.0;
    const double r = ref.relevant ? static_cast<double>(ref.matched) / static_cast<double>(ref.relevant) : 0.0;
    if (pr.precision != p || pr.recall != r) ++mismatches;
  }
  const Ontology chain = parse_ontology_tsv("A\ta\t\nB\tb\tA\n");
  const ClassIndex a = chain.index_of("A"), b = chain.index_of("B");
  const PrecisionRecall worked = ontology_pr({{"s1", {b}}, {"s2", {a}}}, {{"s1", {b}}, {"s2", {b}}}, chain);
  Verdict v;
  v.pass = mismatches == 0 && worked.precision == 1.0 && worked.recall == 0.75;
  v.detail = "200 random cases, " + std::to_string(mismatches) + " mismatches; worked example P=" +
             fmt("%g", worked.precision) + " R=" + fmt("%g", worked.recall);
  return v;
}

// ---- 3: gradients ----------------------------------------------------------

Verdict gradients() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  rng::Engine eng(99);
  for (std::uint64_t i = 0; i < 20; ++i) {
    TrainConfig cfg = TrainConfig::main_defaults();
    cfg.seed = i;
    cfg.l2_weight = i % 2 ? 1e-4 : 0.1;
    const auto samples = 4 + rng::below(eng, 20);
    const auto dim = 1 + rng::below(eng, 8);
    const auto classes = 2 + rng::below(eng, 6);
    worst = std::max(worst, gradient_check(cfg, random_probe(1000 + i, samples, dim, classes)));
  }
  const double secs = seconds_since(t0);
  return {worst < 1e-4 && secs < 10.0, "max relative error " + fmt("%.3g", worst) + " over 20 probes"};
}

// ---- shared experiment state ---------------------------------------------------

const SynthCorpus& default_corpus() {
  static const SynthCorpus c = [] {
    SynthConfig cfg;
    cfg.seed = 7;
    return gen_synthetic(cfg);
  }();
  return c;
}

CoTrainConfig default_loop(std::uint64_t seed = 7) {
  CoTrainConfig cfg;
  cfg.seed = seed;
  return cfg;
}

ExperimentReport strategy_report;

// ---- 4: strategy ordering --------------------------------------------------

Verdict strategy_ordering() {
  const auto t0 = std::chrono::steady_clock::now();
  strategy_report = run_strategy_comparison(default_corpus(), default_loop());
  const auto* rel = strategy_report.find("relation");
  const auto* std_ = strategy_report.find("standard");
  const auto* uni = strategy_report.find("union");
  const auto* inter = strategy_report.find("intersect");
  std::string detail;
  for (const auto& r : strategy_report.rows)
    detail += r.label + "=" + fmt("%.4f", r.auprc) + "/" + fmt("%g", r.distinct_classes) + " ";
  detail += "(auprc/classes)";
  const bool ok = rel->auprc >= std_->auprc + 0.02 && uni->distinct_classes >= inter->distinct_classes &&
                  seconds_since(t0) < 300.0;
  return {ok, detail};
}

// ---- 5: co-training gain ---------------------------------------------------

Verdict cotraining_gain() {
  double first = 0.0, last = 0.0;
  std::string detail;
  for (std::uint64_t seed = 7; seed < 12; ++seed) {
    SynthConfig sc;
    sc.seed = seed;
    sc.held_out_synonym_fraction = 0.4;
    const SynthCorpus c = gen_synthetic(sc);
    const CoTrainConfig cfg = default_loop(seed);
    const CoTrainResult r = run(c.samples, c.ontology, c.lexicon, cfg, &c.gold);
    const double a1 = r.history.find(1, View::Main)->eval->auprc;
    const double an = r.history.find(cfg.n_iter, View::Main)->eval->auprc;
    first += a1;
    last += an;
    detail += fmt("%.3f", a1) + "->" + fmt("%.3f", an) + " ";
  }
  first /= 5;
  last /= 5;
  detail += "mean gain " + fmt("%.4f", last - first);
  return {last >= first + 0.03, detail};
}

// ---- 6: noise robustness ---------------------------------------------------

Verdict noise_robustness() {
  const auto t0 = std::chrono::steady_clock::now();
  const ExperimentReport r = run_noise_sweep(default_corpus(), default_loop(), {0, 0.2, 0.4, 0.5, 0.6, 0.8, 0.95}, 3);
  std::map<double, double> a;
  std::string detail;
  for (const auto& row : r.rows) {
    a[row.param] = row.auprc;
    detail += fmt("%g", row.param) + ":" + fmt("%.4f", row.auprc) + " ";
  }
  const bool ok = std::abs(a[0.5] - a[0.0]) <= 0.05 && a[0.95] <= a[0.0] - 0.10 && seconds_since(t0) < 1200.0;
  return {ok, detail + "(3 seeds)"};
}

// ---- 7: threshold insensitivity --------------------------------------------

Verdict threshold_insensitivity() {
  const SynthCorpus& c = default_corpus();
  const double base = strategy_report.find("relation")->auprc;
  std::string detail = "tau=0.3:" + fmt("%.4f", base);
  bool ok = true;
  for (double tau : {0.2, 0.4, 0.6}) {
    CoTrainConfig cfg = default_loop();
    cfg.tau = tau;
    const double a = evaluate_main(run(c.samples, c.ontology, c.lexicon, cfg).main, c, tau).auprc;
    detail += " tau=" + fmt("%g", tau) + ":" + fmt("%.4f", a);
    ok = ok && std::abs(a - base) <= 0.05;
  }
  return {ok, detail};
}

// ---- 8: data scaling -------------------------------------------------------

Verdict data_scaling() {
  const ExperimentReport r = run_data_scaling(default_corpus(), default_loop(), {0.1, 0.3, 1.0}, 5);
  bool ok = true;
  std::string detail;
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    detail += fmt("%g", r.rows[i].param) + ":" + fmt("%.1f", r.rows[i].distinct_classes) + " ";
    if (i > 0 && r.rows[i].distinct_classes < r.rows[i - 1].distinct_classes) ok = false;
  }
  return {ok, detail + "mean distinct classes over 5 repeats"};
}

// ---- 9: determinism --------------------------------------------------------

int run_cli(const std::string& args) {
  const std::string cmd = std::string(COANNOT_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::map<std::string, std::string> snapshot(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file()) files[fs::relative(e.path(), root).generic_string()] = read_file(e.path());
  return files;
}

Verdict determinism() {
  const fs::path base = fs::temp_directory_path() / ("coannot_accept_" + std::to_string(::getpid()));
  fs::remove_all(base);
  fs::create_directories(base);
  const std::string corpus = (base / "corpus").string();
  if (run_cli("synth --n-samples 1500 --seed 7 --out-dir " + corpus) != 0) return {false, "synth failed"};

  const fs::path out = base / "out";
  const std::string o = out.string();
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"annotate", "annotate --samples " + corpus + "/samples.jsonl --ontology " + corpus + "/ontology.tsv --lexicon " +
                       corpus + "/lexicon.tsv --seed 11 --out " + o + "/ann.tsv --history " + o +
                       "/history.json --model-out " + o + "/models"},
      {"synth", "synth --n-samples 1500 --seed 7 --out-dir " + o},
      {"strategy-compare", "strategy-compare --n-samples 1500 --iters 2 --seed 7 --out-dir " + o},
      {"noise-sweep", "noise-sweep --n-samples 1500 --iters 2 --fractions 0,0.5,0.95 --repeats 2 --out-dir " + o},
      {"data-scaling", "data-scaling --n-samples 1500 --iters 2 --fractions 0.3,1 --repeats 2 --out-dir " + o},
  };
  std::string detail;
  bool ok = true;
  for (const auto& [name, args] : commands) {
    std::map<std::string, std::string> runs[2];
    for (auto& snap : runs) {
      fs::remove_all(out);
      fs::create_directories(out);
      const int rc = run_cli(args);
      if (rc != 0) {
        ok = false;
        detail += name + " exit " + std::to_string(rc) + "; ";
        break;
      }
      snap = snapshot(out);
    }
    const bool same = !runs[0].empty() && runs[0] == runs[1];
    ok = ok && same;
    detail += name + (same ? " identical (" + std::to_string(runs[0].size()) + " files); " : " DIFFERS; ");
  }
  fs::remove_all(base);
  return {ok, detail};
}

// ---- 10: round trips and fixtures ------------------------------------------

bool expect_graph(const Ontology& o, const std::map<std::string, std::vector<std::string>>& parents,
                  std::string& why) {
  if (o.class_count() != parents.size()) {
    why += "class count " + std::to_string(o.class_count()) + "; ";
    return false;
  }
  for (const auto& [id, ps] : parents) {
    const auto c = o.find(id);
    if (!c) {
      why += "missing " + id + "; ";
      return false;
    }
    std::vector<std::string> got;
    for (ClassIndex p : o.parents(*c)) got.push_back(o.id(p));
    std::vector<std::string> want = ps;
    std::sort(got.begin(), got.end());
    std::sort(want.begin(), want.end());
    if (got != want) {
      why += "parents of " + id + " differ; ";
      return false;
    }
  }
  return true;
}

Verdict round_trips() {
  std::string why;
  bool ok = true;

  rng::Engine eng(10);
  std::size_t onto_bad = 0;
  for (int i = 0; i < 200; ++i) {
    const Ontology o = testutil::random_dag(eng, 1 + rng::below(eng, 20), 0.3);
    const Ontology back = parse_ontology_tsv(o.to_tsv());
    if (!(back == o) || back.to_tsv() != o.to_tsv()) ++onto_bad;
  }
  const SynthCorpus& c = default_corpus();
  if (!(parse_ontology_tsv(c.ontology.to_tsv()).to_tsv() == c.ontology.to_tsv())) ++onto_bad;
  ok = ok && onto_bad == 0;

  // Models of both views from a short real run.
  CoTrainConfig cfg = default_loop();
  cfg.n_iter = 1;
  const Corpus part(c.samples.begin(), c.samples.begin() + 1500);
  const CoTrainResult r = run(part, c.ontology, c.lexicon, cfg);
  std::size_t model_bad = 0;
  for (const Model* m : {&r.main, &r.aux}) {
    const std::string json = model_to_json(*m);
    const Model back = model_from_json(json);
    if (!(back == *m) || model_to_json(back) != json) ++model_bad;
  }
  ok = ok && model_bad == 0;

  const fs::path fx = COANNOT_FIXTURES;
  OboParseStats stats;
  const Ontology cells = parse_obo_subset(read_file(fx / "cells.obo"), &stats);
  const bool cells_ok = expect_graph(cells,
                                     {{"CL:0000000", {}},
                                      {"CL:0000738", {"CL:0000000"}},
                                      {"CL:0001000", {"CL:0000738"}},
                                      {"CL:0000540", {"CL:0000000"}}},
                                     why) &&
                        stats.obsolete_dropped == 1 &&
                        cells.synonyms(cells.index_of("CL:0001000")) == std::vector<std::string>{"AML"} &&
                        cells.synonyms(cells.index_of("CL:0000738")) ==
                            std::vector<std::string>{"white blood cell", "leucocyte"} &&
                        cells.name(cells.index_of("CL:0001000")) == "leukemia cell";
  const Ontology diamond = parse_ontology_auto(read_file(fx / "diamond_crlf.obo"));
  const bool diamond_ok =
      expect_graph(diamond, {{"D:1", {}}, {"D:2", {}}, {"D:3", {"D:1", "D:2"}}}, why) &&
      diamond.synonyms(diamond.index_of("D:2")) == std::vector<std::string>{"escaped \"quote\""};
  bool dangling_ok = false;
  try {
    parse_obo_subset(read_file(fx / "dangling_obsolete.obo"));
  } catch (const ParseError& e) {
    dangling_ok = e.line() == 9;
  }
  if (!cells_ok) why += "cells.obo; ";
  if (!diamond_ok) why += "diamond_crlf.obo; ";
  if (!dangling_ok) why += "dangling_obsolete.obo; ";
  ok = ok && cells_ok && diamond_ok && dangling_ok;

  const std::string detail = "ontology TSV mismatches " + std::to_string(onto_bad) + ", model JSON mismatches " +
                             std::to_string(model_bad) + ", OBO fixtures " +
                             (cells_ok && diamond_ok && dangling_ok ? "as expected" : "WRONG " + why);
  return {ok, detail};
}

}  // namespace

int main() {
  criterion(1, "resolve matches the exhaustive pairwise oracle", resolve_oracle);
  criterion(2, "ontology precision/recall matches brute-force pooling", metrics_oracle);
  criterion(3, "analytic gradients match finite differences", gradients);
  criterion(4, "relation beats standard by 0.02 AUPRC; union classes >= intersect", strategy_ordering);
  criterion(5, "co-training gains 0.03 AUPRC over distant supervision", cotraining_gain);
  criterion(6, "robust to 50% label noise, degraded at 95%", noise_robustness);
  criterion(7, "AUPRC within 0.05 across thresholds 0.2..0.6", threshold_insensitivity);
  criterion(8, "distinct predicted classes grow with corpus size", data_scaling);
  criterion(9, "CLI outputs are byte-identical across runs", determinism);
  criterion(10, "format round trips and OBO fixtures", round_trips);
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
