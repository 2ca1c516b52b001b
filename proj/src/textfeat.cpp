#include "coannot/textfeat.hpp"

#include <algorithm>
#include <cmath>

namespace coannot {

namespace {

bool is_token_byte(unsigned char ch) {
  return (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') || (ch >= '0' && ch <= '9') || ch >= 0x80;
}

}  // namespace

std::string normalize_text(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (unsigned char ch : text) {
    if (!is_token_byte(ch)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out += ' ';
      pending_space = false;
    }
    out += (ch >= 'A' && ch <= 'Z') ? static_cast<char>(ch - 'A' + 'a') : static_cast<char>(ch);
  }
  return out;
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (unsigned char ch : text) {
    if (is_token_byte(ch)) {
      current += (ch >= 'A' && ch <= 'Z') ? static_cast<char>(ch - 'A' + 'a') : static_cast<char>(ch);
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

std::uint32_t feature_bucket(std::string_view gram) noexcept {
  return static_cast<std::uint32_t>(fnv1a64(gram) & (kHashBuckets - 1));
}

SparseVector featurize(std::span<const std::string> tokens) {
  std::vector<std::uint32_t> buckets;
  buckets.reserve(tokens.size() * 2);
  std::string bigram;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    buckets.push_back(feature_bucket(tokens[i]));
    if (i + 1 < tokens.size()) {
      bigram.assign(tokens[i]);
      bigram += ' ';
      bigram += tokens[i + 1];
      buckets.push_back(feature_bucket(bigram));
    }
  }
  std::sort(buckets.begin(), buckets.end());

  SparseVector v;
  double sumsq = 0.0;
  for (std::size_t i = 0; i < buckets.size();) {
    std::size_t j = i;
    while (j < buckets.size() && buckets[j] == buckets[i]) ++j;
    const double count = static_cast<double>(j - i);
    v.indices.push_back(buckets[i]);
    v.values.push_back(count);
    sumsq += count * count;
    i = j;
  }
  const double norm = std::sqrt(sumsq);
  for (double& x : v.values) x /= norm;
  return v;
}

}  // namespace coannot
