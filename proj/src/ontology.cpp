#include "coannot/ontology.hpp"

#include <algorithm>
#include <deque>

#include "coannot/error.hpp"
#include "text_util.hpp"

namespace coannot {

namespace {

// Returns a node that lies on a cycle, or npos when the graph is acyclic.
std::size_t find_cycle(const std::vector<std::vector<ClassIndex>>& parents) {
  enum Color : unsigned char { White, Grey, Black };
  std::vector<Color> color(parents.size(), White);
  for (std::size_t start = 0; start < parents.size(); ++start) {
    if (color[start] != White) continue;
    // (node, next parent position)
    std::vector<std::pair<std::size_t, std::size_t>> stack{{start, 0}};
    color[start] = Grey;
    while (!stack.empty()) {
      auto& [node, next] = stack.back();
      if (next < parents[node].size()) {
        const std::size_t p = to_int(parents[node][next++]);
        if (color[p] == Grey) return p;
        if (color[p] == White) {
          color[p] = Grey;
          stack.emplace_back(p, 0);
        }
      } else {
        color[node] = Black;
        stack.pop_back();
      }
    }
  }
  return static_cast<std::size_t>(-1);
}

}  // namespace

Ontology Ontology::build(std::vector<NodeSpec> nodes) {
  std::sort(nodes.begin(), nodes.end(), [](const NodeSpec& a, const NodeSpec& b) { return a.id < b.id; });

  Ontology o;
  const std::size_t n = nodes.size();
  for (std::size_t i = 0; i < n; ++i) {
    const NodeSpec& spec = nodes[i];
    if (spec.id.empty()) throw ParseError("empty class id", spec.line);
    if (spec.id == kRootId) throw ParseError("class id \"ROOT\" is reserved for the virtual root", spec.line);
    if (i > 0 && nodes[i - 1].id == spec.id) {
      const std::size_t line = std::max(nodes[i - 1].line, spec.line);
      throw ParseError("duplicate class id \"" + spec.id + "\"", line);
    }
    o.by_id_.emplace(spec.id, class_at(i));
  }

  o.ids_.reserve(n);
  o.names_.reserve(n);
  o.synonyms_.reserve(n);
  o.parents_.resize(n);
  o.children_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    NodeSpec& spec = nodes[i];
    for (const std::string& p : spec.parents) {
      auto it = o.by_id_.find(p);
      if (it == o.by_id_.end()) throw ParseError("unknown parent \"" + p + "\"", spec.line);
      o.parents_[i].push_back(it->second);
    }
    std::sort(o.parents_[i].begin(), o.parents_[i].end());
    o.parents_[i].erase(std::unique(o.parents_[i].begin(), o.parents_[i].end()), o.parents_[i].end());
    for (ClassIndex p : o.parents_[i]) o.children_[to_int(p)].push_back(class_at(i));
    o.ids_.push_back(std::move(spec.id));
    o.names_.push_back(std::move(spec.name));
    o.synonyms_.push_back(std::move(spec.synonyms));
  }

  if (const std::size_t bad = find_cycle(o.parents_); bad != static_cast<std::size_t>(-1))
    throw ParseError("cycle detected through \"" + o.ids_[bad] + "\"", nodes[bad].line);

  // Parents before children.
  std::vector<std::size_t> pending(n);
  std::deque<std::size_t> ready;
  for (std::size_t i = 0; i < n; ++i) {
    pending[i] = o.parents_[i].size();
    if (pending[i] == 0) ready.push_back(i);
  }
  o.ancestors_.resize(n);
  o.closures_.resize(n);
  while (!ready.empty()) {
    const std::size_t c = ready.front();
    ready.pop_front();
    std::vector<ClassIndex>& anc = o.ancestors_[c];
    for (ClassIndex p : o.parents_[c]) {
      const auto& pc = o.closures_[to_int(p)];
      anc.insert(anc.end(), pc.begin(), pc.end());
    }
    std::sort(anc.begin(), anc.end());
    anc.erase(std::unique(anc.begin(), anc.end()), anc.end());
    o.closures_[c] = anc;
    o.closures_[c].insert(std::lower_bound(o.closures_[c].begin(), o.closures_[c].end(), class_at(c)), class_at(c));
    for (ClassIndex child : o.children_[c])
      if (--pending[to_int(child)] == 0) ready.push_back(to_int(child));
  }
  return o;
}

void Ontology::check(ClassIndex c) const {
  if (to_int(c) >= ids_.size()) throw UnknownClassError("class index " + std::to_string(to_int(c)) + " out of range");
}

const std::string& Ontology::id(ClassIndex c) const {
  check(c);
  return ids_[to_int(c)];
}

const std::string& Ontology::name(ClassIndex c) const {
  check(c);
  return names_[to_int(c)];
}

const std::vector<std::string>& Ontology::synonyms(ClassIndex c) const {
  check(c);
  return synonyms_[to_int(c)];
}

const std::vector<ClassIndex>& Ontology::parents(ClassIndex c) const {
  check(c);
  return parents_[to_int(c)];
}

const std::vector<ClassIndex>& Ontology::children(ClassIndex c) const {
  check(c);
  return children_[to_int(c)];
}

std::optional<ClassIndex> Ontology::find(std::string_view id) const {
  auto it = by_id_.find(id);
  if (it == by_id_.end()) return std::nullopt;
  return it->second;
}

ClassIndex Ontology::index_of(std::string_view id) const {
  if (auto c = find(id)) return *c;
  throw UnknownClassError("unknown class id \"" + std::string(id) + "\"");
}

const std::vector<ClassIndex>& Ontology::ancestor_list(ClassIndex c) const {
  check(c);
  return ancestors_[to_int(c)];
}

const std::vector<ClassIndex>& Ontology::closure_list(ClassIndex c) const {
  check(c);
  return closures_[to_int(c)];
}

ClassSet Ontology::ancestors(ClassIndex c) const {
  const auto& a = ancestor_list(c);
  return ClassSet(a.begin(), a.end());
}

ClassSet Ontology::expand(const ClassSet& labels) const {
  ClassSet out;
  for (ClassIndex c : labels) {
    const auto& cl = closure_list(c);
    out.insert(cl.begin(), cl.end());
  }
  return out;
}

bool Ontology::is_ancestor(ClassIndex maybe_ancestor, ClassIndex c) const {
  const auto& a = ancestor_list(c);
  return std::binary_search(a.begin(), a.end(), maybe_ancestor);
}

Specificity Ontology::specificity(ClassIndex first, ClassIndex second) const {
  check(first);
  check(second);
  if (first == second) return Specificity::Equal;
  if (is_ancestor(second, first)) return Specificity::FirstMoreSpecific;
  if (is_ancestor(first, second)) return Specificity::SecondMoreSpecific;
  return Specificity::Unrelated;
}

std::size_t Ontology::depth(ClassIndex c) const {
  std::size_t best = 0;
  for (ClassIndex p : parents(c)) best = std::max(best, depth(p));
  return best + 1;
}

std::string Ontology::to_tsv() const {
  std::string out;
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    out += ids_[i];
    out += '\t';
    out += names_[i];
    out += '\t';
    for (std::size_t k = 0; k < parents_[i].size(); ++k) {
      if (k) out += '|';
      out += ids_[to_int(parents_[i][k])];
    }
    out += '\n';
  }
  return out;
}

Ontology parse_ontology_tsv(std::string_view text) {
  std::vector<Ontology::NodeSpec> nodes;
  for (const auto& line : detail::split_lines(text)) {
    if (detail::is_blank(line.text)) continue;
    auto fields = detail::split(line.text, '\t');
    if (fields.size() < 2 || fields.size() > 3)
      throw ParseError("expected id<TAB>name<TAB>parents, got " + std::to_string(fields.size()) + " fields", line.number);
    Ontology::NodeSpec spec;
    spec.id = std::string(detail::trim(fields[0]));
    spec.name = std::string(detail::trim(fields[1]));
    spec.line = line.number;
    if (fields.size() == 3 && !detail::trim(fields[2]).empty()) {
      for (auto p : detail::split(fields[2], '|')) {
        p = detail::trim(p);
        if (p.empty()) throw ParseError("empty parent id", line.number);
        spec.parents.emplace_back(p);
      }
    }
    nodes.push_back(std::move(spec));
  }
  return Ontology::build(std::move(nodes));
}

namespace {

// Parses `"text" SCOPE ...`, honouring backslash escapes inside the quotes.
std::optional<std::string> parse_quoted(std::string_view v) {
  v = detail::trim(v);
  if (v.empty() || v.front() != '"') return std::nullopt;
  std::string out;
  for (std::size_t i = 1; i < v.size(); ++i) {
    const char ch = v[i];
    if (ch == '\\' && i + 1 < v.size()) {
      out += v[++i];
    } else if (ch == '"') {
      return out;
    } else {
      out += ch;
    }
  }
  return std::nullopt;
}

std::string_view strip_comment(std::string_view v) {
  if (auto bang = v.find(" !"); bang != std::string_view::npos) v = v.substr(0, bang);
  else if (!v.empty() && v.front() == '!') v = {};
  return detail::trim(v);
}

}  // namespace

Ontology parse_obo_subset(std::string_view text, OboParseStats* stats) {
  struct Stanza {
    Ontology::NodeSpec spec;
    std::vector<std::size_t> is_a_lines;
    bool obsolete = false;
    bool has_name = false;
  };
  std::vector<Stanza> terms;
  bool in_term = false;

  for (const auto& line : detail::split_lines(text)) {
    const std::string_view t = detail::trim(line.text);
    if (t.empty() || t.front() == '!') continue;
    if (t.front() == '[') {
      in_term = (t == "[Term]");
      if (in_term) {
        terms.emplace_back();
        terms.back().spec.line = line.number;
      }
      continue;
    }
    if (!in_term) continue;
    const std::size_t colon = t.find(':');
    if (colon == std::string_view::npos) continue;
    const std::string_view key = detail::trim(t.substr(0, colon));
    const std::string_view value = detail::trim(t.substr(colon + 1));
    Stanza& st = terms.back();
    if (key == "id") {
      st.spec.id = std::string(strip_comment(value));
    } else if (key == "name") {
      st.spec.name = std::string(value);
      st.has_name = true;
    } else if (key == "is_a") {
      st.spec.parents.emplace_back(strip_comment(value));
      st.is_a_lines.push_back(line.number);
    } else if (key == "synonym") {
      auto syn = parse_quoted(value);
      if (!syn) throw ParseError("malformed synonym (expected quoted text)", line.number);
      st.spec.synonyms.push_back(std::move(*syn));
    } else if (key == "is_obsolete") {
      st.obsolete = (value == "true");
    }
  }

  std::vector<Ontology::NodeSpec> nodes;
  std::set<std::string, std::less<>> kept;
  std::size_t dropped = 0;
  for (auto& st : terms) {
    if (st.spec.id.empty()) throw ParseError("[Term] stanza without id", st.spec.line);
    if (!st.has_name || st.spec.name.empty()) throw ParseError("[Term] stanza without name", st.spec.line);
    if (st.obsolete) {
      ++dropped;
      continue;
    }
    kept.insert(st.spec.id);
  }
  for (auto& st : terms) {
    if (st.obsolete) continue;
    for (std::size_t k = 0; k < st.spec.parents.size(); ++k)
      if (!kept.contains(st.spec.parents[k]))
        throw ParseError("is_a references unknown id \"" + st.spec.parents[k] + "\"", st.is_a_lines[k]);
    nodes.push_back(std::move(st.spec));
  }
  if (stats) stats->obsolete_dropped = dropped;
  return Ontology::build(std::move(nodes));
}

Ontology parse_ontology_auto(std::string_view text) {
  for (const auto& line : detail::split_lines(text))
    if (detail::trim(line.text) == "[Term]") return parse_obo_subset(text);
  return parse_ontology_tsv(text);
}

}  // namespace coannot
