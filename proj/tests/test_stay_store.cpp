#include <doctest.h>

#include <cmath>
#include <sstream>

#include "granreg/corpus_io.hpp"
#include "granreg/errors.hpp"
#include "granreg/stay.hpp"

using namespace granreg;

TEST_CASE("jsonl load collapses duplicate codes and computes log cost") {
  std::istringstream in(R"({"stay_id":"s1","cost":1000.0,"codes":["A000","A000"]})");
  const auto result = load_corpus(in, CorpusFormat::jsonl);
  REQUIRE(result.corpus.size() == 1);
  const auto& rec = result.corpus[0];
  CHECK(rec.codes.size() == 1);
  CHECK(rec.codes[0].str() == "A000");
  CHECK(rec.log_cost == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(result.skipped == 0);
}

TEST_CASE("jsonl load rejects invalid records") {
  SUBCASE("non-positive cost") {
    std::istringstream in(R"({"cost":0,"codes":["A000"]})");
    CHECK_THROWS_AS(load_corpus(in, CorpusFormat::jsonl), ValidationError);
  }
  SUBCASE("26 codes exceed the cap") {
    std::string line = R"({"cost":10,"codes":[)";
    for (int i = 0; i < 26; ++i) {
      if (i) line += ',';
      line += "\"A" + std::to_string(100 + i) + "\"";
    }
    line += "]}";
    std::istringstream in(line);
    CHECK_THROWS_AS(load_corpus(in, CorpusFormat::jsonl), ValidationError);
  }
  SUBCASE("zero codes") {
    std::istringstream in(R"({"cost":10,"codes":[]})");
    CHECK_THROWS_AS(load_corpus(in, CorpusFormat::jsonl), ValidationError);
  }
  SUBCASE("wrong-typed fields surface as ParseError, not library exceptions") {
    std::istringstream in(R"({"stay_id":5,"cost":10,"codes":["A000"]})");
    CHECK_THROWS_AS(load_corpus(in, CorpusFormat::jsonl), ParseError);
    std::istringstream in2(R"({"cost":10,"codes":[42]})");
    CHECK_THROWS_AS(load_corpus(in2, CorpusFormat::jsonl), ParseError);
  }
  SUBCASE("malformed json reports the line number") {
    std::istringstream in("{\"cost\":10,\"codes\":[\"A000\"]}\nnot json\n");
    try {
      load_corpus(in, CorpusFormat::jsonl);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 2);
    }
  }
}

TEST_CASE("skip policy drops bad lines with a count") {
  std::istringstream in(
      "{\"cost\":10,\"codes\":[\"A000\"]}\n"
      "{\"cost\":-5,\"codes\":[\"A000\"]}\n"
      "garbage\n"
      "{\"cost\":20,\"codes\":[\"B111\"]}\n");
  const auto result = load_corpus(in, CorpusFormat::jsonl, InvalidPolicy::skip);
  CHECK(result.corpus.size() == 2);
  CHECK(result.skipped == 2);
}

TEST_CASE("csv round trip preserves records") {
  std::istringstream in(
      "stay_id,cost,codes\n"
      "s1,1234.5,A000;T670XXA\n"
      "s2,99.25,B010\n");
  const auto loaded = load_corpus(in, CorpusFormat::csv);
  REQUIRE(loaded.corpus.size() == 2);
  CHECK(loaded.corpus[0].codes.size() == 2);

  std::ostringstream out;
  write_corpus(loaded.corpus, out, CorpusFormat::csv);
  std::istringstream in2(out.str());
  const auto again = load_corpus(in2, CorpusFormat::csv);
  REQUIRE(again.corpus.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(again.corpus[i].stay_id == loaded.corpus[i].stay_id);
    CHECK(again.corpus[i].cost == loaded.corpus[i].cost);
    CHECK(again.corpus[i].codes == loaded.corpus[i].codes);
  }
}

TEST_CASE("jsonl writer output reloads identically") {
  std::istringstream in(
      "stay_id,cost,codes\n"
      "s1,1234.5,A000;T670XXA\n");
  const auto loaded = load_corpus(in, CorpusFormat::csv);
  std::ostringstream out;
  write_corpus(loaded.corpus, out, CorpusFormat::jsonl);
  std::istringstream in2(out.str());
  const auto again = load_corpus(in2, CorpusFormat::jsonl);
  CHECK(again.corpus[0].cost == loaded.corpus[0].cost);
  CHECK(again.corpus[0].codes == loaded.corpus[0].codes);
}

TEST_CASE("csv header is mandatory") {
  std::istringstream in("s1,1234.5,A000\n");
  CHECK_THROWS_AS(load_corpus(in, CorpusFormat::csv), ParseError);
}

TEST_CASE("log_cost round trips through 10^y") {
  std::istringstream in(
      "stay_id,cost,codes\n"
      "a,17.25,A000\n"
      "b,123456.789,A000\n"
      "c,0.5,A000\n");
  const auto result = load_corpus(in, CorpusFormat::csv);
  for (const auto& rec : result.corpus) {
    CHECK(std::abs(std::pow(10.0, rec.log_cost) - rec.cost) <= 1e-12 * rec.cost);
  }
}

TEST_CASE("empty corpus is rejected") {
  CHECK_THROWS_AS(StayCorpus({}), EmptyCorpus);
  std::istringstream in("");
  CHECK_THROWS_AS(load_corpus(in, CorpusFormat::jsonl), ValidationError);
}

TEST_CASE("missing input files raise IoError") {
  CHECK_THROWS_AS(load_corpus("/nonexistent/granreg.jsonl", CorpusFormat::jsonl), IoError);
}

TEST_CASE("split cardinality and determinism") {
  const auto s = split_indices(10, 0.8, 7);
  CHECK(s.train.size() == 8);
  CHECK(s.test.size() == 2);

  const auto s2 = split_indices(10, 0.8, 7);
  CHECK(s.train == s2.train);
  CHECK(s.test == s2.test);

  const auto s3 = split_indices(10, 0.8, 8);
  CHECK(s.train != s3.train);  // different seed, different draw
}

TEST_CASE("split is a partition of [0, n)") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const std::size_t n = 2 + seed * 13 % 400;
    const double ratio = 0.05 + 0.9 * static_cast<double>(seed) / 30.0;
    const auto s = split_indices(n, ratio, seed);
    std::vector<char> seen(n, 0);
    for (const auto i : s.train) seen[i] += 1;
    for (const auto i : s.test) seen[i] += 1;
    for (const auto c : seen) CHECK(c == 1);
    CHECK(s.train.size() + s.test.size() == n);
    CHECK(s.train.size() >= 1);
    CHECK(s.test.size() >= 1);
  }
}

TEST_CASE("split clamps an all-train rounding to leave one test row") {
  const auto s = split_indices(100, 0.999, 1);
  CHECK(s.train.size() == 99);
  CHECK(s.test.size() == 1);
}

TEST_CASE("degenerate splits are rejected") {
  CHECK_THROWS_AS(split_indices(1, 0.5, 0), DegenerateSplit);
  CHECK_THROWS_AS(split_indices(10, 0.0, 0), DegenerateSplit);
  CHECK_THROWS_AS(split_indices(10, 1.0, 0), DegenerateSplit);
}

TEST_CASE("summarize buckets by code count") {
  std::vector<StayRecord> records;
  records.push_back(StayRecord::make("a", 10.0, {IcdCode::normalize("A000")}));
  records.push_back(StayRecord::make("b", 1000.0, {IcdCode::normalize("B000")}));
  const StayCorpus corpus(std::move(records));
  const auto summary = summarize(corpus);
  REQUIRE(summary.buckets.size() == 1);
  CHECK(summary.buckets[0].code_count == 1);
  CHECK(summary.buckets[0].stays == 2);
  CHECK(summary.buckets[0].mean_log_cost == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(summary.n == 2);
}

TEST_CASE("summarize omits empty buckets and conserves counts") {
  std::vector<StayRecord> records;
  std::vector<IcdCode> three = {IcdCode::normalize("A000"), IcdCode::normalize("B000"),
                                IcdCode::normalize("C000")};
  records.push_back(StayRecord::make("a", 50.0, {three[0]}));
  records.push_back(StayRecord::make("b", 60.0, three));
  records.push_back(StayRecord::make("c", 70.0, three));
  const StayCorpus corpus(std::move(records));
  const auto summary = summarize(corpus);
  REQUIRE(summary.buckets.size() == 2);  // k=2 omitted
  CHECK(summary.buckets[0].code_count == 1);
  CHECK(summary.buckets[1].code_count == 3);
  std::size_t total = 0;
  for (const auto& b : summary.buckets) total += b.stays;
  CHECK(total == corpus.size());
}

TEST_CASE("summarize mean cost tracks a cost process that rises with code count") {
  // deterministic corpus: cost = 100 * 2^k for a stay with k codes
  std::vector<StayRecord> records;
  std::vector<IcdCode> pool;
  for (int i = 0; i < 12; ++i) {
    pool.push_back(IcdCode::normalize("A" + std::to_string(100 + i)));
  }
  for (std::size_t k = 1; k <= 12; ++k) {
    std::vector<IcdCode> codes(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(k));
    const double cost = 100.0 * std::pow(2.0, static_cast<double>(k));
    records.push_back(StayRecord::make("k" + std::to_string(k), cost, codes));
    records.push_back(StayRecord::make("k" + std::to_string(k) + "b", cost * 1.5, codes));
  }
  const auto summary = summarize(StayCorpus(std::move(records)));
  for (std::size_t i = 1; i < summary.buckets.size(); ++i) {
    CHECK(summary.buckets[i].mean_cost >= summary.buckets[i - 1].mean_cost);
  }
}
