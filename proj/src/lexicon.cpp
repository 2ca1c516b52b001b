#include "coannot/lexicon.hpp"

#include <algorithm>
#include <set>
#include <tuple>

#include "coannot/error.hpp"
#include "coannot/textfeat.hpp"
#include "text_util.hpp"

namespace coannot {

void validate_corpus(std::span<const Sample> corpus) {
  std::set<std::string_view> seen;
  for (const Sample& s : corpus) {
    if (s.id.empty()) throw ConfigError("sample with empty id");
    if (!seen.insert(s.id).second) throw ConfigError("duplicate sample id \"" + s.id + "\"");
    if (s.features.size() != corpus.front().features.size())
      throw ConfigError("sample \"" + s.id + "\" has " + std::to_string(s.features.size()) + " features, expected " +
                        std::to_string(corpus.front().features.size()));
  }
}

std::size_t pair_count(const TrainingSet& set) {
  std::size_t n = 0;
  for (const auto& [id, labels] : set) n += labels.size();
  return n;
}

ClassSet distinct_classes(const TrainingSet& set) {
  ClassSet out;
  for (const auto& [id, labels] : set)
    for (const auto& [c, s] : labels) out.insert(c);
  return out;
}

void Lexicon::add(std::string_view term, ClassIndex c) {
  if (to_int(c) >= class_count_) throw UnknownClassError("lexicon class index out of range");
  std::string norm = normalize_text(term);
  if (norm.empty()) throw ConfigError("lexicon term \"" + std::string(term) + "\" is empty after normalization");
  max_tokens_ = std::max<std::size_t>(max_tokens_, std::count(norm.begin(), norm.end(), ' ') + 1);
  entries_[std::move(norm)].insert(c);
}

ClassSet Lexicon::match(std::string_view text) const {
  ClassSet out;
  if (entries_.empty()) return out;
  const std::vector<std::string> tokens = tokenize(text);
  std::string phrase;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    phrase.clear();
    for (std::size_t j = i; j < tokens.size() && j - i < max_tokens_; ++j) {
      if (j > i) phrase += ' ';
      phrase += tokens[j];
      if (auto it = entries_.find(phrase); it != entries_.end()) out.insert(it->second.begin(), it->second.end());
    }
  }
  return out;
}

std::string Lexicon::to_tsv(const Ontology& o) const {
  std::vector<std::tuple<std::string_view, std::string_view>> rows;
  for (const auto& [term, classes] : entries_)
    for (ClassIndex c : classes) rows.emplace_back(o.id(c), term);
  std::sort(rows.begin(), rows.end());
  std::string out;
  for (const auto& [id, term] : rows) {
    out += id;
    out += '\t';
    out += term;
    out += '\n';
  }
  return out;
}

Lexicon lexicon_from_ontology(const Ontology& o) {
  Lexicon lex(o.class_count());
  for (std::size_t i = 0; i < o.class_count(); ++i) {
    const ClassIndex c = class_at(i);
    if (!normalize_text(o.name(c)).empty()) lex.add(o.name(c), c);
    for (const std::string& syn : o.synonyms(c))
      if (!normalize_text(syn).empty()) lex.add(syn, c);
  }
  return lex;
}

Lexicon load_lexicon_tsv(std::string_view text, const Ontology& o) {
  Lexicon lex(o.class_count());
  for (const auto& line : detail::split_lines(text)) {
    if (detail::is_blank(line.text)) continue;
    const std::size_t tab = line.text.find('\t');
    if (tab == std::string_view::npos) throw ParseError("expected class_id<TAB>term", line.number);
    const std::string_view id = detail::trim(line.text.substr(0, tab));
    const std::string_view term = line.text.substr(tab + 1);
    const auto c = o.find(id);
    if (!c) throw ParseError("unknown class id \"" + std::string(id) + "\"", line.number);
    if (normalize_text(term).empty()) throw ParseError("empty term", line.number);
    lex.add(term, *c);
  }
  return lex;
}

TrainingSet distant_labels(const Lexicon& lex, std::span<const Sample> samples) {
  TrainingSet d0;
  for (const Sample& s : samples) {
    if (!s.text) continue;
    const ClassSet matched = lex.match(*s.text);
    if (matched.empty()) continue;
    LabelSet& labels = d0[s.id];
    for (ClassIndex c : matched) labels[c] = 1.0;
  }
  return d0;
}

}  // namespace coannot
