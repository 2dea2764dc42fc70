#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

#include "granreg/vocabulary.hpp"

namespace granreg {

/// Row-sparse code-indicator matrix X^(l). At level 7 entries are exactly 1;
/// after merging, entries are positive integer counts and every row's value
/// sum stays equal to the stay's diagnosis count D_i.
class SparseDesignMatrix {
 public:
  struct Entry {
    std::uint32_t col;
    std::int32_t value;
    bool operator==(const Entry&) const = default;
  };

  /// Entry (i, j) counts the stay-i codes whose truncation at the vocabulary
  /// level equals vocabulary code j. Throws UnknownCode when a truncated
  /// code is absent from the vocabulary.
  static SparseDesignMatrix build(const StayCorpus& corpus, const CodeVocabulary& vocab);

  std::size_t rows() const { return row_offsets_.size() - 1; }
  std::size_t cols() const { return vocab_->size(); }
  int level() const { return vocab_->level(); }
  std::size_t nnz() const { return entries_.size(); }
  const CodeVocabulary& vocabulary() const { return *vocab_; }

  std::span<const Entry> row(std::size_t i) const {
    return {entries_.data() + row_offsets_[i], row_offsets_[i + 1] - row_offsets_[i]};
  }

  /// D_i, invariant across column merges.
  std::int64_t row_sum(std::size_t i) const;

  /// Copy of the selected rows (vocabulary shared, not copied).
  SparseDesignMatrix select_rows(std::span<const std::size_t> indices) const;

  /// y = X x  (y sized rows()).
  void apply(std::span<const double> x, std::span<double> y) const;
  /// out = X' r  (out sized cols()).
  void apply_transpose(std::span<const double> r, std::span<double> out) const;

  /// Coordinate text export: header `%n p nnz level`, then `row col value`
  /// lines, 0-based, row-major.
  void write_coordinate(std::ostream& out) const;

 private:
  SparseDesignMatrix(std::shared_ptr<const CodeVocabulary> vocab,
                     std::vector<std::size_t> row_offsets, std::vector<Entry> entries)
      : vocab_(std::move(vocab)),
        row_offsets_(std::move(row_offsets)),
        entries_(std::move(entries)) {}

  std::shared_ptr<const CodeVocabulary> vocab_;
  std::vector<std::size_t> row_offsets_;  // rows()+1 offsets into entries_
  std::vector<Entry> entries_;            // sorted by column within each row

  friend SparseDesignMatrix merge_columns(const SparseDesignMatrix&, const MergeMap&);
};

/// X * Q: pools source columns into their targets. Row value-sums are
/// preserved. Throws ShapeMismatch when the map's source dimension differs
/// from the matrix column count.
SparseDesignMatrix merge_columns(const SparseDesignMatrix& matrix, const MergeMap& map);

/// Diagonal, trace, and co-occurrence view of the Gram matrix X'X. Integer
/// arithmetic throughout, so results are exact. Holds a reference to the
/// source matrix: the matrix must outlive the summary.
class HessianSummary {
 public:
  static constexpr std::size_t kDefaultDenseCap = 4096;

  const std::vector<std::int64_t>& diagonal() const { return diagonal_; }
  std::int64_t trace() const { return trace_; }
  std::size_t n_rows() const { return n_rows_; }
  std::size_t dimension() const { return diagonal_.size(); }

  /// trace / (n * p): the mean eigenvalue of X'X / n.
  double mean_eigenvalue() const;

  /// [X'X]_{jk}. Served from the dense Gram when p <= the dense cap,
  /// otherwise streamed over the matrix rows (O(nnz)).
  std::int64_t co_occurrence(std::size_t j, std::size_t k) const;

  bool dense_available() const { return !gram_.empty(); }
  /// Row-major p*p Gram matrix; empty above the dense cap.
  const std::vector<std::int64_t>& dense_gram() const { return gram_; }

 private:
  friend HessianSummary hessian_summary(const SparseDesignMatrix&, std::size_t);
  const SparseDesignMatrix* matrix_ = nullptr;
  std::vector<std::int64_t> diagonal_;
  std::vector<std::int64_t> gram_;
  std::int64_t trace_ = 0;
  std::size_t n_rows_ = 0;
};

HessianSummary hessian_summary(const SparseDesignMatrix& matrix,
                               std::size_t dense_cap = HessianSummary::kDefaultDenseCap);

struct HistogramBin {
  double lo = 0.0;  // inclusive
  double hi = 0.0;  // exclusive
  std::size_t count = 0;
};

/// Histogram of the Hessian diagonal. Linear mode buckets each distinct
/// value; log mode uses power-of-two bins starting at 1. Empty bins are
/// omitted.
std::vector<HistogramBin> diagonal_histogram(const HessianSummary& summary, bool log_binning);

/// CSV export `bin_low,bin_high,count` with a schema comment line.
void write_histogram_csv(std::span<const HistogramBin> bins, std::ostream& out);

}  // namespace granreg
