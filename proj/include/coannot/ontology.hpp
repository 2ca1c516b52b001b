#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace coannot {

// Dense index of a user class, in [0, class_count()). Classes are indexed in
// lexicographic order of their ids, so the layout is stable across runs.
enum class ClassIndex : std::uint32_t {};

constexpr std::uint32_t to_int(ClassIndex c) noexcept { return static_cast<std::uint32_t>(c); }
constexpr ClassIndex class_at(std::size_t i) noexcept { return static_cast<ClassIndex>(i); }

using ClassSet = std::set<ClassIndex>;

enum class Specificity { Equal, FirstMoreSpecific, SecondMoreSpecific, Unrelated };

// Rooted DAG of annotation classes. A virtual root (id "ROOT") sits above
// every top-level class; it has no ClassIndex and never appears in query
// results. Immutable after construction.
class Ontology {
 public:
  static constexpr std::string_view kRootId = "ROOT";

  struct NodeSpec {
    std::string id;
    std::string name;
    std::vector<std::string> parents;  // empty: top-level
    std::vector<std::string> synonyms;
    std::size_t line = 0;              // source line, for diagnostics
  };

  Ontology() = default;

  // Validates ids, parent references and acyclicity. Throws ParseError.
  static Ontology build(std::vector<NodeSpec> nodes);

  std::size_t class_count() const noexcept { return ids_.size(); }

  const std::string& id(ClassIndex c) const;
  const std::string& name(ClassIndex c) const;
  const std::vector<std::string>& synonyms(ClassIndex c) const;
  // Direct parents; empty for top-level classes (whose parent is the root).
  const std::vector<ClassIndex>& parents(ClassIndex c) const;
  const std::vector<ClassIndex>& children(ClassIndex c) const;

  std::optional<ClassIndex> find(std::string_view id) const;
  // Throws UnknownClassError.
  ClassIndex index_of(std::string_view id) const;
  void check(ClassIndex c) const;

  // Strict ancestors excluding the root, sorted by index.
  const std::vector<ClassIndex>& ancestor_list(ClassIndex c) const;
  // {c} plus its ancestors, sorted by index.
  const std::vector<ClassIndex>& closure_list(ClassIndex c) const;

  ClassSet ancestors(ClassIndex c) const;
  ClassSet expand(const ClassSet& labels) const;
  bool is_ancestor(ClassIndex maybe_ancestor, ClassIndex c) const;
  Specificity specificity(ClassIndex first, ClassIndex second) const;

  bool is_leaf(ClassIndex c) const { return children(c).empty(); }
  // Top-level classes are at depth 1.
  std::size_t depth(ClassIndex c) const;

  // id<TAB>name<TAB>parent|parent per line, in index order.
  std::string to_tsv() const;

  bool operator==(const Ontology&) const = default;

 private:
  std::vector<std::string> ids_;
  std::vector<std::string> names_;
  std::vector<std::vector<std::string>> synonyms_;
  std::vector<std::vector<ClassIndex>> parents_;
  std::vector<std::vector<ClassIndex>> children_;
  std::vector<std::vector<ClassIndex>> ancestors_;
  std::vector<std::vector<ClassIndex>> closures_;
  std::map<std::string, ClassIndex, std::less<>> by_id_;
};

// `id<TAB>name<TAB>parent1|parent2` per non-blank line; LF or CRLF.
Ontology parse_ontology_tsv(std::string_view text);

struct OboParseStats {
  std::size_t obsolete_dropped = 0;
};

// [Term] stanzas with id, name, is_a, synonym and is_obsolete; other keys
// and stanza types are ignored. Only is_a edges are ingested.
Ontology parse_obo_subset(std::string_view text, OboParseStats* stats = nullptr);

// Dispatches on content: OBO when a [Term] header is present, TSV otherwise.
Ontology parse_ontology_auto(std::string_view text);

}  // namespace coannot
