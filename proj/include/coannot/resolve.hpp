#pragma once

#include <array>
#include <optional>
#include <string_view>

#include "coannot/labels.hpp"
#include "coannot/ontology.hpp"

namespace coannot {

// How distant-supervision labels are reconciled with classifier predictions.
enum class Strategy { Standard, Predict, Union, Intersect, Relation };

inline constexpr std::array<Strategy, 5> kAllStrategies = {Strategy::Standard, Strategy::Predict, Strategy::Union,
                                                           Strategy::Intersect, Strategy::Relation};

std::string_view to_string(Strategy s);
// Accepts the lower-case names used on the command line.
std::optional<Strategy> parse_strategy(std::string_view name);

// `distant` is null when the sample has no distant-supervision labels; the
// prediction then passes through for every strategy. Scores come from the
// side that contributed each label, the maximum of both on collisions.
//
// Relation: for every pair (d in distant, p in predicted) keep d when equal,
// keep the more specific one when one is an ancestor of the other, and keep
// nothing when unrelated. The result is the union over all pairs.
LabelSet resolve_sample(Strategy s, const LabelSet* distant, const LabelSet& predicted, const Ontology& o);

// Applies resolve_sample to every sample id in either input. Samples that
// resolve to no labels are left out.
TrainingSet resolve_all(Strategy s, const TrainingSet& distant, const TrainingSet& predictions, const Ontology& o);

}  // namespace coannot
