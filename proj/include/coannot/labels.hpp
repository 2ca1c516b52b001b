#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "coannot/ontology.hpp"

namespace coannot {

// Scored class assignments for one sample.
using LabelSet = std::map<ClassIndex, double>;

// Sample id -> labels. Ordered by id, which fixes iteration order everywhere.
using TrainingSet = std::map<std::string, LabelSet, std::less<>>;

// Sample id -> true classes.
using GoldLabels = std::map<std::string, ClassSet, std::less<>>;

// Sample id -> predicted classes (unscored).
using Predictions = std::map<std::string, ClassSet, std::less<>>;

struct Sample {
  std::string id;
  std::vector<double> features;
  std::optional<std::string> text;  // absent when the sample has no description

  bool has_text() const noexcept { return text.has_value(); }
  bool operator==(const Sample&) const = default;
};

using Corpus = std::vector<Sample>;

// Throws ConfigError on duplicate ids or non-uniform feature dimension.
void validate_corpus(std::span<const Sample> corpus);

inline ClassSet classes_of(const LabelSet& labels) {
  ClassSet out;
  for (const auto& [c, score] : labels) out.insert(c);
  return out;
}

// Number of (sample, class) pairs.
std::size_t pair_count(const TrainingSet& set);
// Classes appearing anywhere in the set.
ClassSet distinct_classes(const TrainingSet& set);

}  // namespace coannot
