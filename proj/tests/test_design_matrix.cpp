#include <doctest.h>

#include <cmath>
#include <sstream>

#include "granreg/design_matrix.hpp"
#include "granreg/errors.hpp"
#include "granreg/synthetic.hpp"

#include "oracles.hpp"

using namespace granreg;

namespace {

StayCorpus toy_corpus() {
  // s1:[A001,A002], s2:[A001,B01], s3:[A002]
  std::vector<StayRecord> records;
  records.push_back(StayRecord::make(
      "s1", 100.0, {IcdCode::normalize("A001"), IcdCode::normalize("A002")}));
  records.push_back(StayRecord::make(
      "s2", 200.0, {IcdCode::normalize("A001"), IcdCode::normalize("B01")}));
  records.push_back(StayRecord::make("s3", 300.0, {IcdCode::normalize("A002")}));
  return StayCorpus(std::move(records));
}

std::vector<std::vector<std::int32_t>> dense_rows(const SparseDesignMatrix& x) {
  std::vector<std::vector<std::int32_t>> rows(x.rows(),
                                              std::vector<std::int32_t>(x.cols(), 0));
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (const auto& e : x.row(i)) rows[i][e.col] = e.value;
  }
  return rows;
}

}  // namespace

TEST_CASE("toy design matrix at level 4") {
  const auto corpus = toy_corpus();
  const auto x = SparseDesignMatrix::build(corpus, build_vocabulary(corpus, 4));
  CHECK(x.vocabulary().codes() == std::vector<std::string>{"A001", "A002", "B01"});
  const auto rows = dense_rows(x);
  CHECK(rows[0] == std::vector<std::int32_t>{1, 1, 0});
  CHECK(rows[1] == std::vector<std::int32_t>{1, 0, 1});
  CHECK(rows[2] == std::vector<std::int32_t>{0, 1, 0});
}

TEST_CASE("toy design matrix built directly at level 3 pools counts") {
  const auto corpus = toy_corpus();
  const auto x = SparseDesignMatrix::build(corpus, build_vocabulary(corpus, 3));
  CHECK(x.vocabulary().codes() == std::vector<std::string>{"A00", "B01"});
  const auto rows = dense_rows(x);
  CHECK(rows[0] == std::vector<std::int32_t>{2, 0});
  CHECK(rows[1] == std::vector<std::int32_t>{1, 1});
  CHECK(rows[2] == std::vector<std::int32_t>{1, 0});
}

TEST_CASE("single-code stay stays a unit indicator after merging") {
  std::vector<StayRecord> records;
  records.push_back(StayRecord::make("s", 10.0, {IcdCode::normalize("B01")}));
  records.push_back(StayRecord::make("t", 10.0, {IcdCode::normalize("A001")}));
  const StayCorpus corpus(std::move(records));
  const auto x = SparseDesignMatrix::build(corpus, build_vocabulary(corpus, 3));
  const auto rows = dense_rows(x);
  CHECK(rows[0] == std::vector<std::int32_t>{0, 1});
}

TEST_CASE("build rejects codes missing from the vocabulary") {
  const auto corpus = toy_corpus();
  const CodeVocabulary wrong(4, {"A001", "A002"});  // B01 missing
  CHECK_THROWS_AS(SparseDesignMatrix::build(corpus, wrong), UnknownCode);
}

TEST_CASE("merge_columns matches the direct coarse build and preserves row sums") {
  const auto corpus = toy_corpus();
  const auto fine_vocab = build_vocabulary(corpus, 4);
  const auto x4 = SparseDesignMatrix::build(corpus, fine_vocab);
  const auto x3 = merge_columns(x4, build_merge_map(fine_vocab, 3));

  const auto direct = SparseDesignMatrix::build(corpus, build_vocabulary(corpus, 3));
  CHECK(dense_rows(x3) == dense_rows(direct));
  CHECK(x3.vocabulary().codes() == direct.vocabulary().codes());

  for (std::size_t i = 0; i < x4.rows(); ++i) {
    CHECK(x3.row_sum(i) == x4.row_sum(i));
  }
}

TEST_CASE("identity merge leaves the matrix unchanged") {
  // all codes are 3 characters, so nothing pools below level 7
  std::vector<StayRecord> records;
  records.push_back(StayRecord::make(
      "s1", 10.0, {IcdCode::normalize("A00"), IcdCode::normalize("B01")}));
  records.push_back(StayRecord::make(
      "s2", 20.0, {IcdCode::normalize("C22"), IcdCode::normalize("B01")}));
  const StayCorpus corpus(std::move(records));
  const auto fine = build_vocabulary(corpus, 7);
  const auto x = SparseDesignMatrix::build(corpus, fine);
  const auto map = build_merge_map(fine, 3);
  for (std::size_t j = 0; j < map.source_size(); ++j) CHECK(map.target_of(j) == j);
  const auto merged = merge_columns(x, map);
  CHECK(dense_rows(merged) == dense_rows(x));
}

TEST_CASE("merge_columns rejects shape mismatches") {
  const auto corpus = toy_corpus();
  const auto x3 = SparseDesignMatrix::build(corpus, build_vocabulary(corpus, 3));
  const auto map = build_merge_map(build_vocabulary(corpus, 4), 3);
  CHECK_THROWS_AS(merge_columns(x3, map), ShapeMismatch);
}

TEST_CASE("toy hessian summaries") {
  const auto corpus = toy_corpus();
  const auto x4 = SparseDesignMatrix::build(corpus, build_vocabulary(corpus, 4));
  const auto h4 = hessian_summary(x4);
  CHECK(h4.diagonal() == std::vector<std::int64_t>{2, 2, 1});
  CHECK(h4.trace() == 5);
  CHECK(h4.co_occurrence(0, 1) == 1);  // A001 with A002
  CHECK(h4.co_occurrence(1, 2) == 0);

  const auto x3 = SparseDesignMatrix::build(corpus, build_vocabulary(corpus, 3));
  const auto h3 = hessian_summary(x3);
  CHECK(h3.diagonal() == std::vector<std::int64_t>{6, 1});
  CHECK(h3.trace() == 7);
  CHECK(h3.co_occurrence(0, 1) == 1);
  CHECK(h3.trace() - h4.trace() == 2);  // delta = 2 * merged co-occurrence
}

TEST_CASE("streamed co-occurrence matches the dense gram") {
  const auto corpus = oracle::random_corpus({.max_stays = 60, .max_pool = 30, .seed = 11});
  const auto x = SparseDesignMatrix::build(corpus, build_vocabulary(corpus, 7));
  const auto dense = hessian_summary(x, 4096);
  const auto streamed = hessian_summary(x, 0);
  CHECK_FALSE(streamed.dense_available());
  for (std::size_t j = 0; j < x.cols(); j += 3) {
    for (std::size_t k = 0; k < x.cols(); k += 5) {
      CHECK(dense.co_occurrence(j, k) == streamed.co_occurrence(j, k));
    }
  }
}

TEST_CASE("level-7 diagonal equals corpus code frequencies") {
  const auto corpus = oracle::random_corpus({.max_stays = 200, .max_pool = 60, .seed = 5});
  const auto vocab = build_vocabulary(corpus, 7);
  const auto x = SparseDesignMatrix::build(corpus, vocab);
  const auto h = hessian_summary(x);

  std::vector<std::int64_t> freq(vocab.size(), 0);
  std::int64_t total_codes = 0;
  for (const auto& rec : corpus) {
    for (const auto& c : rec.codes) {
      freq[*vocab.index_of(c.str())] += 1;
      ++total_codes;
    }
  }
  CHECK(h.diagonal() == freq);
  CHECK(h.trace() == total_codes);  // sum of D_i
  CHECK(h.mean_eigenvalue() ==
        doctest::Approx(static_cast<double>(h.trace()) /
                        (static_cast<double>(x.rows()) * static_cast<double>(x.cols()))));
}

TEST_CASE("row sums survive merging on random corpora") {
  for (std::uint64_t seed = 40; seed < 70; ++seed) {
    const auto corpus = oracle::random_corpus({.max_stays = 60, .max_pool = 80, .seed = seed});
    const auto fine_vocab = build_vocabulary(corpus, 7);
    const auto x = SparseDesignMatrix::build(corpus, fine_vocab);
    for (int l = 2; l < 7; ++l) {
      const auto merged = merge_columns(x, build_merge_map(fine_vocab, l));
      for (std::size_t i = 0; i < x.rows(); ++i) {
        REQUIRE(merged.row_sum(i) == x.row_sum(i));
      }
    }
  }
}

TEST_CASE("merged hessian equals the dense Q'X'XQ product") {
  for (std::uint64_t seed = 200; seed < 220; ++seed) {
    const auto corpus = oracle::random_corpus({.max_stays = 50, .max_pool = 40, .seed = seed});
    const auto fine_vocab = build_vocabulary(corpus, 7);
    if (fine_vocab.size() > 50) continue;
    const auto x = SparseDesignMatrix::build(corpus, fine_vocab);
    const auto map = build_merge_map(fine_vocab, 3);
    const auto merged = merge_columns(x, map);
    const auto h_merged = hessian_summary(merged);

    // dense route: G = X'X, then Q' G Q
    const auto h_fine = hessian_summary(x, 4096);
    const std::size_t pf = x.cols();
    const std::size_t pc = map.target_size();
    std::vector<std::int64_t> pooled(pc * pc, 0);
    for (std::size_t a = 0; a < pf; ++a) {
      for (std::size_t b = 0; b < pf; ++b) {
        pooled[map.target_of(a) * pc + map.target_of(b)] += h_fine.co_occurrence(a, b);
      }
    }
    REQUIRE(h_merged.dense_available());
    CHECK(h_merged.dense_gram() == pooled);
  }
}

TEST_CASE("coordinate export has the documented shape") {
  const auto corpus = toy_corpus();
  const auto x = SparseDesignMatrix::build(corpus, build_vocabulary(corpus, 3));
  std::ostringstream out;
  x.write_coordinate(out);
  CHECK(out.str() ==
        "%3 2 4 3\n"
        "0 0 2\n"
        "1 0 1\n"
        "1 1 1\n"
        "2 0 1\n");
}

TEST_CASE("linear histogram buckets distinct values") {
  // diagonal (1,1,1,10): three singleton codes and one frequent code
  std::vector<StayRecord> records;
  for (int i = 0; i < 10; ++i) {
    records.push_back(StayRecord::make("f" + std::to_string(i), 10.0,
                                       {IcdCode::normalize("F001")}));
  }
  records.push_back(StayRecord::make("a", 10.0, {IcdCode::normalize("A001")}));
  records.push_back(StayRecord::make("b", 10.0, {IcdCode::normalize("B001")}));
  records.push_back(StayRecord::make("c", 10.0, {IcdCode::normalize("C001")}));
  const StayCorpus corpus(std::move(records));
  const auto x = SparseDesignMatrix::build(corpus, build_vocabulary(corpus, 7));
  const auto h = hessian_summary(x);
  const auto bins = diagonal_histogram(h, false);
  REQUIRE(bins.size() == 2);
  CHECK(bins[0].lo == 1.0);
  CHECK(bins[0].count == 3);
  CHECK(bins[1].lo == 10.0);
  CHECK(bins[1].count == 1);
}

TEST_CASE("log histogram counts sum to p and slope recovers the exponent") {
  GeneratorConfig cfg;
  cfg.n_stays = 60000;
  cfg.n_codes = 1500;
  cfg.alpha = 1.9;
  cfg.d_mean = 8.0;
  cfg.noise_sigma = 0.0;
  cfg.seed = 31;
  const auto data = generate(cfg);
  const auto vocab = build_vocabulary(data.corpus, 7);
  const auto x = SparseDesignMatrix::build(data.corpus, vocab);
  const auto h = hessian_summary(x, 0);
  const auto bins = diagonal_histogram(h, true);

  std::size_t total = 0;
  for (const auto& b : bins) total += b.count;
  CHECK(total == x.cols());  // every level-7 code occurs at least once

  // least squares of log10(density) on log10(bin center)
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t m = 0;
  for (const auto& b : bins) {
    if (b.count == 0) continue;
    const double cx = std::log10(std::sqrt(b.lo * b.hi));
    const double cy = std::log10(static_cast<double>(b.count) / (b.hi - b.lo));
    sx += cx;
    sy += cy;
    sxx += cx * cx;
    sxy += cx * cy;
    ++m;
  }
  const double slope = (static_cast<double>(m) * sxy - sx * sy) /
                       (static_cast<double>(m) * sxx - sx * sx);
  CHECK(slope == doctest::Approx(-1.9).epsilon(0.2 / 1.9));
}
