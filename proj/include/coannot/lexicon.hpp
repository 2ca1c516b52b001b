#pragma once

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "coannot/labels.hpp"
#include "coannot/ontology.hpp"

namespace coannot {

// Example terms per class. Terms are stored normalized; one term may point at
// several classes, and that ambiguity is kept as-is.
class Lexicon {
 public:
  Lexicon() = default;
  explicit Lexicon(std::size_t class_count) : class_count_(class_count) {}

  // Normalizes `term`; throws ConfigError when it normalizes to nothing.
  void add(std::string_view term, ClassIndex c);

  // Classes of every term occurring as a contiguous token run in `text`.
  ClassSet match(std::string_view text) const;

  const std::map<std::string, ClassSet, std::less<>>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  std::size_t class_count() const noexcept { return class_count_; }

  // class_id<TAB>term per entry, sorted by class id then term.
  std::string to_tsv(const Ontology& o) const;

  bool operator==(const Lexicon&) const = default;

 private:
  std::size_t class_count_ = 0;
  std::size_t max_tokens_ = 0;
  std::map<std::string, ClassSet, std::less<>> entries_;
};

// Every class name and synonym becomes a term for its class.
Lexicon lexicon_from_ontology(const Ontology& o);

// `class_id<TAB>term` per non-blank line. Throws ParseError.
Lexicon load_lexicon_tsv(std::string_view text, const Ontology& o);

inline ClassSet match_text(const Lexicon& lex, std::string_view text) { return lex.match(text); }

// D0: every sample whose text matches at least one term, with all matched
// classes at score 1.0. Samples without text or without matches are absent.
TrainingSet distant_labels(const Lexicon& lex, std::span<const Sample> samples);

}  // namespace coannot
