#pragma once

// Brute-force reference implementations shared by unit and acceptance tests.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "coannot/labels.hpp"
#include "coannot/resolve.hpp"
#include "test_util.hpp"

namespace oracle {

using namespace coannot;

// anc[i] is a bitmask of the strict ancestors of node i.
using Relation = std::vector<std::uint32_t>;

inline std::uint64_t encode(const Relation& anc, const std::vector<int>& perm) {
  const std::size_t n = anc.size();
  std::vector<std::uint32_t> p(n, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (anc[i] >> j & 1u) p[perm[i]] |= 1u << perm[j];
  std::uint64_t code = 0;
  for (std::size_t i = 0; i < n; ++i) code = code << n | p[i];
  return code;
}

// One representative per isomorphism class of strict partial orders on n
// nodes. Every poset has a linear extension, so it suffices to look at
// transitively closed relations whose edges point from lower to higher index.
inline std::vector<Relation> all_posets(std::size_t n) {
  std::vector<std::pair<std::size_t, std::size_t>> slots;
  for (std::size_t i = 1; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) slots.emplace_back(i, j);
  std::set<std::uint64_t> seen;
  std::vector<Relation> out;
  std::vector<int> perm(n);
  for (std::uint32_t mask = 0; mask < (1u << slots.size()); ++mask) {
    Relation anc(n, 0);
    for (std::size_t k = 0; k < slots.size(); ++k)
      if (mask >> k & 1u) anc[slots[k].first] |= 1u << slots[k].second;
    bool closed = true;
    for (std::size_t i = 0; i < n && closed; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if ((anc[i] >> j & 1u) && (anc[j] & ~anc[i])) closed = false;
    if (!closed) continue;
    std::iota(perm.begin(), perm.end(), 0);
    std::uint64_t best = ~std::uint64_t{0};
    do best = std::min(best, encode(anc, perm));
    while (std::next_permutation(perm.begin(), perm.end()));
    if (seen.insert(best).second) out.push_back(anc);
  }
  return out;
}

// Ontology whose parent edges are the Hasse diagram of `anc`.
inline Ontology from_relation(const Relation& anc) {
  const std::size_t n = anc.size();
  std::vector<Ontology::NodeSpec> nodes(n);
  for (std::size_t i = 0; i < n; ++i) {
    nodes[i].id = "N" + std::to_string(i);
    nodes[i].name = nodes[i].id;
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (!(anc[i] >> j & 1u)) continue;
      bool covered = false;
      for (std::size_t k = 0; k < n; ++k)
        if ((anc[i] >> k & 1u) && (anc[k] >> j & 1u)) covered = true;
      if (!covered) nodes[i].parents.push_back(nodes[j].id);
    }
  return Ontology::build(std::move(nodes));
}

inline bool is_strict_ancestor(const Ontology& o, ClassIndex a, ClassIndex c) {
  return testutil::brute_ancestors(o, c).contains(a);
}

// Resolve by enumerating every (distant, predicted) pair.
inline LabelSet resolve(Strategy s, const LabelSet* distant, const LabelSet& predicted, const Ontology& o) {
  if (!distant) return predicted;
  LabelSet out;
  auto put = [&](ClassIndex c, double score) {
    auto [it, fresh] = out.emplace(c, score);
    if (!fresh && score > it->second) it->second = score;
  };
  switch (s) {
    case Strategy::Standard:
      return *distant;
    case Strategy::Predict:
      return predicted;
    case Strategy::Union:
      for (const auto& [c, v] : *distant) put(c, v);
      for (const auto& [c, v] : predicted) put(c, v);
      return out;
    case Strategy::Intersect:
      for (const auto& [d, dv] : *distant)
        for (const auto& [p, pv] : predicted)
          if (d == p) put(d, std::max(dv, pv));
      return out;
    case Strategy::Relation:
      for (const auto& [d, dv] : *distant)
        for (const auto& [p, pv] : predicted) {
          if (d == p) put(d, std::max(dv, pv));
          else if (is_strict_ancestor(o, p, d)) put(d, dv);
          else if (is_strict_ancestor(o, d, p)) put(p, pv);
        }
      return out;
  }
  return out;
}

// All subsets of {0..n-1} with at most k elements.
inline std::vector<std::vector<ClassIndex>> small_subsets(std::size_t n, std::size_t k) {
  std::vector<std::vector<ClassIndex>> out;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcount(mask)) > k) continue;
    std::vector<ClassIndex> s;
    for (std::size_t i = 0; i < n; ++i)
      if (mask >> i & 1u) s.push_back(static_cast<ClassIndex>(i));
    out.push_back(std::move(s));
  }
  return out;
}

struct Pooled {
  std::size_t matched = 0, predicted = 0, relevant = 0;
};

// Micro pooling over materialized ancestor sets, gold samples only.
inline Pooled pool(const Predictions& pred, const GoldLabels& gold, const Ontology& o) {
  Pooled r;
  for (const auto& [id, truth] : gold) {
    const auto g = testutil::brute_expand(o, truth);
    std::set<ClassIndex> p;
    if (auto it = pred.find(id); it != pred.end()) p = testutil::brute_expand(o, it->second);
    for (ClassIndex c : p) r.matched += g.contains(c);
    r.predicted += p.size();
    r.relevant += g.size();
  }
  return r;
}

inline Predictions at_threshold(const TrainingSet& scored, double t) {
  Predictions out;
  for (const auto& [id, labels] : scored)
    for (const auto& [c, s] : labels)
      if (s >= t) out[id].insert(c);
  return out;
}

}  // namespace oracle
