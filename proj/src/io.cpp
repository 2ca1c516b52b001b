#include "coannot/io.hpp"

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "coannot/error.hpp"
#include "coannot/textfeat.hpp"
#include "text_util.hpp"

namespace coannot {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw Error("short write to " + tmp.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error("cannot rename into " + path.string());
  }
}

std::string digest_hex(std::string_view bytes) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(bytes)));
  return buf;
}

Corpus parse_samples_jsonl(std::string_view text) {
  Corpus corpus;
  std::set<std::string, std::less<>> seen;
  for (const auto& line : detail::split_lines(text)) {
    if (detail::is_blank(line.text)) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line.text);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(std::string("invalid JSON: ") + e.what(), line.number);
    }
    if (!j.is_object()) throw ParseError("expected a JSON object", line.number);
    Sample s;
    if (!j.contains("id") || !j["id"].is_string()) throw ParseError("missing string field \"id\"", line.number);
    s.id = j["id"].get<std::string>();
    if (s.id.empty()) throw ParseError("empty sample id", line.number);
    if (!seen.insert(s.id).second) throw ParseError("duplicate sample id \"" + s.id + "\"", line.number);
    if (!j.contains("features") || !j["features"].is_array())
      throw ParseError("missing array field \"features\"", line.number);
    for (const auto& v : j["features"]) {
      if (!v.is_number()) throw ParseError("non-numeric feature", line.number);
      const double x = v.get<double>();
      if (!std::isfinite(x)) throw ParseError("non-finite feature", line.number);
      s.features.push_back(x);
    }
    if (!corpus.empty() && s.features.size() != corpus.front().features.size())
      throw ParseError("feature dimension " + std::to_string(s.features.size()) + " differs from " +
                           std::to_string(corpus.front().features.size()),
                       line.number);
    if (j.contains("text") && !j["text"].is_null()) {
      if (!j["text"].is_string()) throw ParseError("field \"text\" must be a string", line.number);
      s.text = j["text"].get<std::string>();
    }
    corpus.push_back(std::move(s));
  }
  return corpus;
}

std::string samples_to_jsonl(const Corpus& corpus) {
  std::string out;
  for (const Sample& s : corpus) {
    nlohmann::ordered_json j;
    j["id"] = s.id;
    j["features"] = s.features;
    if (s.text) j["text"] = *s.text;
    out += j.dump();
    out += '\n';
  }
  return out;
}

GoldLabels parse_gold_tsv(std::string_view text, const Ontology& o) {
  GoldLabels gold;
  for (const auto& line : detail::split_lines(text)) {
    if (detail::is_blank(line.text)) continue;
    const auto fields = detail::split(line.text, '\t');
    if (fields.size() != 2) throw ParseError("expected sample_id<TAB>class_id", line.number);
    const auto id = detail::trim(fields[0]);
    const auto cls = detail::trim(fields[1]);
    const auto c = o.find(cls);
    if (!c) throw ParseError("unknown class id \"" + std::string(cls) + "\"", line.number);
    gold[std::string(id)].insert(*c);
  }
  return gold;
}

std::string gold_to_tsv(const GoldLabels& gold, const Ontology& o) {
  std::string out;
  for (const auto& [id, classes] : gold) {
    std::vector<std::string_view> ids;
    for (ClassIndex c : classes) ids.push_back(o.id(c));
    std::sort(ids.begin(), ids.end());
    for (auto cid : ids) {
      out += id;
      out += '\t';
      out += cid;
      out += '\n';
    }
  }
  return out;
}

TrainingSet parse_annotations_tsv(std::string_view text, const Ontology& o) {
  TrainingSet out;
  for (const auto& line : detail::split_lines(text)) {
    if (detail::is_blank(line.text)) continue;
    const auto fields = detail::split(line.text, '\t');
    if (fields.size() < 2 || fields.size() > 3) throw ParseError("expected sample_id<TAB>class_id<TAB>score", line.number);
    const auto cls = detail::trim(fields[1]);
    const auto c = o.find(cls);
    if (!c) throw ParseError("unknown class id \"" + std::string(cls) + "\"", line.number);
    double score = 1.0;
    if (fields.size() == 3) {
      const auto s = detail::trim(fields[2]);
      const std::string buf(s);
      char* end = nullptr;
      errno = 0;
      score = std::strtod(buf.c_str(), &end);
      if (buf.empty() || end != buf.c_str() + buf.size() || errno != 0 || !std::isfinite(score))
        throw ParseError("invalid score \"" + buf + "\"", line.number);
    }
    LabelSet& labels = out[std::string(detail::trim(fields[0]))];
    auto [it, inserted] = labels.emplace(*c, score);
    if (!inserted) it->second = std::max(it->second, score);
  }
  return out;
}

std::string annotations_to_tsv(const TrainingSet& labels, const Ontology& o) {
  std::string out;
  char buf[64];
  for (const auto& [id, set] : labels) {
    std::vector<std::pair<double, std::string_view>> rows;
    for (const auto& [c, s] : set) rows.emplace_back(s, o.id(c));
    std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
      return a.first != b.first ? a.first > b.first : a.second < b.second;
    });
    for (const auto& [score, cid] : rows) {
      std::snprintf(buf, sizeof buf, "%.17g", score);
      out += id;
      out += '\t';
      out += cid;
      out += '\t';
      out += buf;
      out += '\n';
    }
  }
  return out;
}

}  // namespace coannot
