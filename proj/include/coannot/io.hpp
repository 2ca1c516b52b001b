#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "coannot/labels.hpp"
#include "coannot/ontology.hpp"

namespace coannot {

// Whole file as bytes. Throws Error when unreadable.
std::string read_file(const std::filesystem::path& path);

// Writes to a sibling temporary file, then renames over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

// 16 lower-case hex digits of fnv1a64.
std::string digest_hex(std::string_view bytes);

// One JSON object per line: {"id": str, "features": [num...], "text": str?}.
Corpus parse_samples_jsonl(std::string_view text);
std::string samples_to_jsonl(const Corpus& corpus);

// sample_id<TAB>class_id per line; repeated ids accumulate classes.
GoldLabels parse_gold_tsv(std::string_view text, const Ontology& o);
std::string gold_to_tsv(const GoldLabels& gold, const Ontology& o);

// sample_id<TAB>class_id<TAB>score per line (score defaults to 1.0 when the
// column is missing).
TrainingSet parse_annotations_tsv(std::string_view text, const Ontology& o);
// Sorted by sample id, then descending score, then class id.
std::string annotations_to_tsv(const TrainingSet& labels, const Ontology& o);

}  // namespace coannot
