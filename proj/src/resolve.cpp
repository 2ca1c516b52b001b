#include "coannot/resolve.hpp"

#include <algorithm>

namespace coannot {

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::Standard: return "standard";
    case Strategy::Predict: return "predict";
    case Strategy::Union: return "union";
    case Strategy::Intersect: return "intersect";
    case Strategy::Relation: return "relation";
  }
  return "unknown";
}

std::optional<Strategy> parse_strategy(std::string_view name) {
  for (Strategy s : kAllStrategies)
    if (to_string(s) == name) return s;
  return std::nullopt;
}

namespace {

void keep_max(LabelSet& out, ClassIndex c, double score) {
  auto [it, inserted] = out.emplace(c, score);
  if (!inserted) it->second = std::max(it->second, score);
}

}  // namespace

LabelSet resolve_sample(Strategy s, const LabelSet* distant, const LabelSet& predicted, const Ontology& o) {
  for (const auto& [c, score] : predicted) o.check(c);
  if (!distant) return predicted;
  for (const auto& [c, score] : *distant) o.check(c);

  LabelSet out;
  switch (s) {
    case Strategy::Standard:
      return *distant;
    case Strategy::Predict:
      return predicted;
    case Strategy::Union:
      out = *distant;
      for (const auto& [c, score] : predicted) keep_max(out, c, score);
      return out;
    case Strategy::Intersect:
      for (const auto& [c, score] : *distant)
        if (auto it = predicted.find(c); it != predicted.end()) out.emplace(c, std::max(score, it->second));
      return out;
    case Strategy::Relation:
      for (const auto& [d, ds] : *distant) {
        for (const auto& [p, ps] : predicted) {
          switch (o.specificity(d, p)) {
            case Specificity::Equal: keep_max(out, d, std::max(ds, ps)); break;
            case Specificity::FirstMoreSpecific: keep_max(out, d, ds); break;
            case Specificity::SecondMoreSpecific: keep_max(out, p, ps); break;
            case Specificity::Unrelated: break;
          }
        }
      }
      return out;
  }
  return out;
}

TrainingSet resolve_all(Strategy s, const TrainingSet& distant, const TrainingSet& predictions, const Ontology& o) {
  TrainingSet out;
  static const LabelSet kNone;
  auto emit = [&](const std::string& id, const LabelSet* d, const LabelSet& p) {
    LabelSet r = resolve_sample(s, d, p, o);
    if (!r.empty()) out.emplace_hint(out.end(), id, std::move(r));
  };
  // Merge walk over the two id-ordered maps.
  auto di = distant.begin();
  auto pi = predictions.begin();
  while (di != distant.end() || pi != predictions.end()) {
    if (pi == predictions.end() || (di != distant.end() && di->first < pi->first)) {
      emit(di->first, &di->second, kNone);
      ++di;
    } else if (di == distant.end() || pi->first < di->first) {
      emit(pi->first, nullptr, pi->second);
      ++pi;
    } else {
      emit(di->first, &di->second, pi->second);
      ++di;
      ++pi;
    }
  }
  return out;
}

}  // namespace coannot
