#include "coannot/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <unordered_map>

namespace coannot {

namespace {

std::vector<ClassIndex> expand_sorted(const ClassSet& labels, const Ontology& o) {
  std::vector<ClassIndex> out;
  for (ClassIndex c : labels) {
    const auto& cl = o.closure_list(c);
    out.insert(out.end(), cl.begin(), cl.end());
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

double ratio(std::size_t num, std::size_t den, double if_empty) {
  return den == 0 ? if_empty : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

PrecisionRecall ontology_pr(const Predictions& pred, const GoldLabels& gold, const Ontology& o) {
  PrecisionRecall pr;
  static const ClassSet kEmpty;
  for (const auto& [id, truth] : gold) {
    const auto g = expand_sorted(truth, o);
    auto it = pred.find(id);
    const auto p = expand_sorted(it == pred.end() ? kEmpty : it->second, o);
    std::vector<ClassIndex> both;
    std::set_intersection(g.begin(), g.end(), p.begin(), p.end(), std::back_inserter(both));
    pr.matched += both.size();
    pr.predicted += p.size();
    pr.relevant += g.size();
  }
  for (const auto& [id, labels] : pred) {
    if (!gold.contains(id)) ++pr.ignored_samples;
    for (ClassIndex c : labels) o.check(c);
  }
  pr.precision = ratio(pr.matched, pr.predicted, 1.0);
  pr.recall = ratio(pr.matched, pr.relevant, 0.0);
  return pr;
}

PRCurve pr_curve(const TrainingSet& scored, const GoldLabels& gold, const Ontology& o) {
  PRCurve curve;

  struct Event {
    double score;
    std::uint32_t sample;
    ClassIndex cls;
  };
  std::vector<std::vector<ClassIndex>> gold_sets;
  std::vector<Event> events;
  std::size_t relevant = 0;
  for (const auto& [id, truth] : gold) {
    const auto sample = static_cast<std::uint32_t>(gold_sets.size());
    gold_sets.push_back(expand_sorted(truth, o));
    relevant += gold_sets.back().size();
    if (auto it = scored.find(id); it != scored.end())
      for (const auto& [c, s] : it->second) {
        o.check(c);
        events.push_back({s, sample, c});
      }
  }
  for (const auto& [id, labels] : scored) {
    if (!gold.contains(id)) {
      ++curve.ignored_samples;
      for (const auto& [c, s] : labels) o.check(c);
    }
  }
  std::sort(events.begin(), events.end(), [](const Event& a, const Event& b) { return a.score > b.score; });

  std::vector<double> thresholds;
  thresholds.reserve(events.size() + 1);
  thresholds.push_back(1.0);
  for (const Event& e : events) thresholds.push_back(e.score);
  std::sort(thresholds.begin(), thresholds.end(), std::greater<>());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

  // Per sample: how many predicted classes cover each expanded node.
  std::vector<std::unordered_map<std::uint32_t, std::uint32_t>> cover(gold_sets.size());
  std::size_t matched = 0, predicted = 0, next = 0;
  for (double t : thresholds) {
    for (; next < events.size() && events[next].score >= t; ++next) {
      const Event& e = events[next];
      const auto& g = gold_sets[e.sample];
      for (ClassIndex node : o.closure_list(e.cls)) {
        if (cover[e.sample][to_int(node)]++ == 0) {
          ++predicted;
          if (std::binary_search(g.begin(), g.end(), node)) ++matched;
        }
      }
    }
    if (predicted == 0) continue;
    curve.points.push_back({ratio(matched, relevant, 0.0), ratio(matched, predicted, 1.0), t});
  }
  if (curve.points.empty()) curve.points.push_back({0.0, 1.0, 1.0});
  curve.max_achieved_recall = curve.points.back().recall;
  return curve;
}

double auprc(const PRCurve& curve) {
  if (curve.points.empty()) return 0.0;
  const auto& pts = curve.points;
  double area = pts.front().recall * pts.front().precision;
  for (std::size_t i = 1; i < pts.size(); ++i)
    area += (pts[i].recall - pts[i - 1].recall) * 0.5 * (pts[i].precision + pts[i - 1].precision);
  return area;
}

PrecisionAtRecall precision_at_recall(const PRCurve& curve, double r) {
  const auto& pts = curve.points;
  if (pts.empty() || r > curve.max_achieved_recall) return {0.0, false};
  auto it = std::find_if(pts.begin(), pts.end(), [r](const PRPoint& p) { return p.recall >= r; });
  if (it == pts.begin() || it->recall == r) return {it->precision, true};
  const PRPoint& lo = *(it - 1);
  const PRPoint& hi = *it;
  const double frac = (r - lo.recall) / (hi.recall - lo.recall);
  return {lo.precision + frac * (hi.precision - lo.precision), true};
}

std::string curve_to_tsv(const PRCurve& curve) {
  std::string out = "threshold\trecall\tprecision\n";
  char buf[96];
  for (const PRPoint& p : curve.points) {
    std::snprintf(buf, sizeof buf, "%.17g\t%.17g\t%.17g\n", p.threshold, p.recall, p.precision);
    out += buf;
  }
  return out;
}

EvalSummary evaluate(const TrainingSet& scored, const GoldLabels& gold, const Ontology& o, double min_score) {
  EvalSummary s;
  const PRCurve curve = pr_curve(scored, gold, o);
  s.auprc = auprc(curve);
  s.precision_at_half = precision_at_recall(curve, 0.5);
  s.max_achieved_recall = curve.max_achieved_recall;
  s.n_samples = gold.size();
  ClassSet seen;
  for (const auto& [id, labels] : scored)
    for (const auto& [c, score] : labels)
      if (score >= min_score) seen.insert(c);
  s.n_classes_predicted = seen.size();
  return s;
}

}  // namespace coannot
