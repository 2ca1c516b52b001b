#include <doctest.h>

#include <cmath>

#include "coannot/textfeat.hpp"
#include "test_util.hpp"

using namespace coannot;

TEST_CASE("tokenize") {
  CHECK(tokenize("RNA-seq of liver.") == std::vector<std::string>{"rna", "seq", "of", "liver"});
  CHECK(tokenize("").empty());
  CHECK(tokenize("AML  AML") == std::vector<std::string>{"aml", "aml"});
  CHECK(tokenize("  \t\n").empty());
  CHECK(tokenize("CD34+ cells_2") == std::vector<std::string>{"cd34", "cells", "2"});
  CHECK(tokenize("caf\xc3\xa9 au lait") == std::vector<std::string>{"caf\xc3\xa9", "au", "lait"});
  CHECK(normalize_text(" Bone--Marrow! ") == "bone marrow");
}

TEST_CASE("featurize") {
  CHECK(featurize(std::vector<std::string>{}).indices.empty());

  const SparseVector one = featurize(std::vector<std::string>{"liver"});
  REQUIRE(one.indices.size() == 1);
  CHECK(one.values[0] == 1.0);
  CHECK(one.indices[0] == feature_bucket("liver"));

  const SparseVector ab = featurize(std::vector<std::string>{"a", "b"});
  REQUIRE(ab.indices.size() == 3);
  for (double v : ab.values) CHECK(v == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-15));
}

TEST_CASE("fnv1a64 reference values") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
}

TEST_CASE("featurized text has unit norm and sorted unique indices") {
  const std::vector<std::string> words = {"liver", "rna", "seq", "tumor", "cell", "of", "the", "a"};
  rng::Engine eng(2);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<std::string> toks;
    const auto n = 1 + rng::below(eng, 12);
    for (std::uint64_t i = 0; i < n; ++i) toks.push_back(words[rng::below(eng, words.size())]);
    const SparseVector v = featurize(toks);
    double sq = 0.0;
    for (double x : v.values) sq += x * x;
    CHECK(sq == doctest::Approx(1.0).epsilon(1e-12));
    for (std::size_t i = 1; i < v.indices.size(); ++i) CHECK(v.indices[i - 1] < v.indices[i]);
    for (auto idx : v.indices) CHECK(idx < kHashBuckets);
  }
}
