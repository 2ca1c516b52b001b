#include <doctest.h>

#include <filesystem>

#include "coannot/error.hpp"
#include "coannot/io.hpp"

using namespace coannot;

namespace {

const Ontology kOnto = parse_ontology_tsv("A\ta\t\nB\tb\tA\nC\tc\t\n");

std::string parse_error_of(std::string_view text) {
  try {
    parse_samples_jsonl(text);
  } catch (const ParseError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("samples JSONL round trip") {
  const Corpus corpus = {{"s1", {0.1, -2.5, 1e-300}, "Bone marrow \"AML\""}, {"s2", {3.0, 0.0, 0.3}, std::nullopt}};
  const std::string text = samples_to_jsonl(corpus);
  CHECK(parse_samples_jsonl(text) == corpus);
  CHECK(samples_to_jsonl(parse_samples_jsonl(text)) == text);
  CHECK(parse_samples_jsonl("{\"id\":\"x\",\"features\":[1],\"text\":null}\r\n\n")[0].text == std::nullopt);
}

TEST_CASE("samples JSONL errors name the line") {
  CHECK(parse_error_of("{\"id\":\"a\",\"features\":[1]}\n{\"id\":\"a\",\"features\":[2]}\n") ==
        "line 2: duplicate sample id \"a\"");
  CHECK(parse_error_of("{\"id\":\"a\",\"features\":[1]}\n\n{\"id\":\"b\",\"features\":[1,2]}\n") ==
        "line 3: feature dimension 2 differs from 1");
  CHECK(parse_error_of("{\"id\":\"a\"}") == "line 1: missing array field \"features\"");
  CHECK(parse_error_of("{\"id\":\"a\",\"features\":[\"x\"]}") == "line 1: non-numeric feature");
  CHECK(parse_error_of("not json").rfind("line 1: invalid JSON", 0) == 0);
  CHECK(parse_error_of("{\"id\":\"a\",\"features\":[1],\"text\":5}") == "line 1: field \"text\" must be a string");
}

TEST_CASE("gold TSV") {
  const GoldLabels gold = parse_gold_tsv("s1\tB\ns2\tC\ns1\tC\n", kOnto);
  CHECK(gold.at("s1") == ClassSet{kOnto.index_of("B"), kOnto.index_of("C")});
  CHECK(parse_gold_tsv(gold_to_tsv(gold, kOnto), kOnto) == gold);
  CHECK_THROWS_WITH_AS(parse_gold_tsv("s1\tB\ns2\tZ\n", kOnto), "line 2: unknown class id \"Z\"", ParseError);
  CHECK_THROWS_AS(parse_gold_tsv("s1 B\n", kOnto), ParseError);
}

TEST_CASE("annotations TSV ordering and round trip") {
  const ClassIndex a = kOnto.index_of("A"), b = kOnto.index_of("B"), c = kOnto.index_of("C");
  const TrainingSet labels = {{"s2", {{a, 0.3}, {c, 0.6}}}, {"s1", {{b, 0.1 + 0.2}, {a, 0.3}}}};
  const std::string tsv = annotations_to_tsv(labels, kOnto);
  CHECK(tsv ==
        "s1\tB\t0.30000000000000004\n"
        "s1\tA\t0.29999999999999999\n"
        "s2\tC\t0.59999999999999998\n"
        "s2\tA\t0.29999999999999999\n");
  CHECK(parse_annotations_tsv(tsv, kOnto) == labels);
  CHECK(parse_annotations_tsv("s\tA\n", kOnto).at("s").at(a) == 1.0);
  CHECK_THROWS_WITH_AS(parse_annotations_tsv("s\tA\tabc\n", kOnto), "line 1: invalid score \"abc\"", ParseError);
}

TEST_CASE("atomic write and digest") {
  const auto dir = std::filesystem::temp_directory_path() / "coannot_io_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / "out.txt";
  write_file_atomic(path, "hello\n");
  CHECK(read_file(path) == "hello\n");
  CHECK_FALSE(std::filesystem::exists(dir / "out.txt.tmp"));
  write_file_atomic(path, "again");
  CHECK(read_file(path) == "again");
  CHECK_THROWS_AS(write_file_atomic(dir / "no" / "such" / "dir.txt", "x"), Error);
  CHECK_THROWS_AS(read_file(dir / "missing"), Error);
  std::filesystem::remove_all(dir);

  CHECK(digest_hex("") == "cbf29ce484222325");
  CHECK(digest_hex("a") == "af63dc4c8601ec8c");
}
