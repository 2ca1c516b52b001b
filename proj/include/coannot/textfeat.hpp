#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace coannot {

// ASCII letters are lower-cased; every other ASCII byte that is not a letter
// or digit becomes a separator. Bytes >= 0x80 (UTF-8 sequences) are kept as
// token characters. Runs of separators collapse to one space; no leading or
// trailing space.
std::string normalize_text(std::string_view text);

// Maximal alphanumeric runs of the normalized text.
std::vector<std::string> tokenize(std::string_view text);

// 64-bit FNV-1a. Used for feature hashing and file digests.
constexpr std::uint64_t fnv1a64(std::string_view bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline constexpr std::uint32_t kHashBits = 20;
inline constexpr std::uint32_t kHashBuckets = 1u << kHashBits;

struct SparseVector {
  std::vector<std::uint32_t> indices;  // strictly increasing, < kHashBuckets
  std::vector<double> values;

  std::size_t size() const noexcept { return indices.size(); }
  bool empty() const noexcept { return indices.empty(); }
  bool operator==(const SparseVector&) const = default;
};

// Bucket of a unigram ("tok") or bigram ("tok1 tok2"): fnv1a64 of the UTF-8
// bytes, low kHashBits bits.
std::uint32_t feature_bucket(std::string_view gram) noexcept;

// Hashed bag of unigrams and adjacent bigrams, counts L2-normalized.
SparseVector featurize(std::span<const std::string> tokens);

inline SparseVector featurize_text(std::string_view text) { return featurize(tokenize(text)); }

}  // namespace coannot
