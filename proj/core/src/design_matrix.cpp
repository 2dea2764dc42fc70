#include "granreg/design_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>

#include "granreg/errors.hpp"
#include "granreg/icd.hpp"

namespace granreg {

SparseDesignMatrix SparseDesignMatrix::build(const StayCorpus& corpus,
                                             const CodeVocabulary& vocab) {
  std::vector<std::size_t> offsets;
  offsets.reserve(corpus.size() + 1);
  offsets.push_back(0);
  std::vector<Entry> entries;

  std::vector<std::pair<std::size_t, std::int32_t>> scratch;
  for (const auto& rec : corpus) {
    scratch.clear();
    for (const auto& code : rec.codes) {
      const auto trunc = truncate(code, vocab.level());
      const auto col = vocab.index_of(trunc);
      if (!col) {
        throw UnknownCode("code '" + trunc + "' (from '" + code.str() +
                          "') missing from level-" + std::to_string(vocab.level()) +
                          " vocabulary");
      }
      scratch.emplace_back(*col, 1);
    }
    std::sort(scratch.begin(), scratch.end());
    // collapse repeated columns into counts
    for (std::size_t k = 0; k < scratch.size();) {
      std::size_t e = k + 1;
      std::int32_t value = scratch[k].second;
      while (e < scratch.size() && scratch[e].first == scratch[k].first) {
        value += scratch[e].second;
        ++e;
      }
      entries.push_back(Entry{static_cast<std::uint32_t>(scratch[k].first), value});
      k = e;
    }
    offsets.push_back(entries.size());
  }
  return SparseDesignMatrix(std::make_shared<CodeVocabulary>(vocab), std::move(offsets),
                            std::move(entries));
}

std::int64_t SparseDesignMatrix::row_sum(std::size_t i) const {
  std::int64_t sum = 0;
  for (const auto& e : row(i)) sum += e.value;
  return sum;
}

SparseDesignMatrix SparseDesignMatrix::select_rows(
    std::span<const std::size_t> indices) const {
  std::vector<std::size_t> offsets;
  offsets.reserve(indices.size() + 1);
  offsets.push_back(0);
  std::vector<Entry> entries;
  for (const std::size_t i : indices) {
    const auto r = row(i);
    entries.insert(entries.end(), r.begin(), r.end());
    offsets.push_back(entries.size());
  }
  return SparseDesignMatrix(vocab_, std::move(offsets), std::move(entries));
}

void SparseDesignMatrix::apply(std::span<const double> x, std::span<double> y) const {
  for (std::size_t i = 0; i < rows(); ++i) {
    double acc = 0.0;
    for (const auto& e : row(i)) acc += static_cast<double>(e.value) * x[e.col];
    y[i] = acc;
  }
}

void SparseDesignMatrix::apply_transpose(std::span<const double> r,
                                         std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t i = 0; i < rows(); ++i) {
    const double ri = r[i];
    if (ri == 0.0) continue;
    for (const auto& e : row(i)) out[e.col] += static_cast<double>(e.value) * ri;
  }
}

void SparseDesignMatrix::write_coordinate(std::ostream& out) const {
  out << '%' << rows() << ' ' << cols() << ' ' << nnz() << ' ' << level() << '\n';
  for (std::size_t i = 0; i < rows(); ++i) {
    for (const auto& e : row(i)) {
      out << i << ' ' << e.col << ' ' << e.value << '\n';
    }
  }
}

SparseDesignMatrix merge_columns(const SparseDesignMatrix& matrix, const MergeMap& map) {
  if (map.source_size() != matrix.cols()) {
    throw ShapeMismatch("merge map has " + std::to_string(map.source_size()) +
                        " source columns, matrix has " + std::to_string(matrix.cols()));
  }
  std::vector<std::size_t> offsets;
  offsets.reserve(matrix.rows() + 1);
  offsets.push_back(0);
  std::vector<SparseDesignMatrix::Entry> entries;

  std::vector<std::pair<std::uint32_t, std::int32_t>> scratch;
  for (std::size_t i = 0; i < matrix.rows(); ++i) {
    scratch.clear();
    for (const auto& e : matrix.row(i)) {
      scratch.emplace_back(static_cast<std::uint32_t>(map.target_of(e.col)), e.value);
    }
    std::sort(scratch.begin(), scratch.end());
    for (std::size_t k = 0; k < scratch.size();) {
      std::size_t e = k + 1;
      std::int32_t value = scratch[k].second;
      while (e < scratch.size() && scratch[e].first == scratch[k].first) {
        value += scratch[e].second;
        ++e;
      }
      entries.push_back(SparseDesignMatrix::Entry{scratch[k].first, value});
      k = e;
    }
    offsets.push_back(entries.size());
  }
  return SparseDesignMatrix(std::make_shared<CodeVocabulary>(map.coarse()),
                            std::move(offsets), std::move(entries));
}

HessianSummary hessian_summary(const SparseDesignMatrix& matrix, std::size_t dense_cap) {
  HessianSummary s;
  s.matrix_ = &matrix;
  s.n_rows_ = matrix.rows();
  const std::size_t p = matrix.cols();
  s.diagonal_.assign(p, 0);

  const bool dense = p <= dense_cap;
  if (dense) s.gram_.assign(p * p, 0);

  for (std::size_t i = 0; i < matrix.rows(); ++i) {
    const auto r = matrix.row(i);
    for (const auto& e : r) {
      s.diagonal_[e.col] +=
          static_cast<std::int64_t>(e.value) * static_cast<std::int64_t>(e.value);
    }
    if (dense) {
      for (const auto& a : r) {
        for (const auto& b : r) {
          s.gram_[a.col * p + b.col] +=
              static_cast<std::int64_t>(a.value) * static_cast<std::int64_t>(b.value);
        }
      }
    }
  }
  s.trace_ = 0;
  for (const auto d : s.diagonal_) s.trace_ += d;
  return s;
}

double HessianSummary::mean_eigenvalue() const {
  if (n_rows_ == 0 || diagonal_.empty()) return 0.0;
  return static_cast<double>(trace_) /
         (static_cast<double>(n_rows_) * static_cast<double>(diagonal_.size()));
}

std::int64_t HessianSummary::co_occurrence(std::size_t j, std::size_t k) const {
  const std::size_t p = diagonal_.size();
  if (j >= p || k >= p) throw ShapeMismatch("co-occurrence index out of range");
  if (!gram_.empty()) return gram_[j * p + k];
  // stream over rows
  std::int64_t acc = 0;
  for (std::size_t i = 0; i < matrix_->rows(); ++i) {
    std::int64_t vj = 0, vk = 0;
    for (const auto& e : matrix_->row(i)) {
      if (e.col == j) vj = e.value;
      if (e.col == k) vk = e.value;
    }
    acc += vj * vk;
  }
  return acc;
}

std::vector<HistogramBin> diagonal_histogram(const HessianSummary& summary,
                                             bool log_binning) {
  std::vector<HistogramBin> bins;
  const auto& diag = summary.diagonal();
  if (diag.empty()) return bins;

  if (!log_binning) {
    std::map<std::int64_t, std::size_t> counts;
    for (const auto d : diag) counts[d] += 1;
    for (const auto& [value, count] : counts) {
      bins.push_back(HistogramBin{static_cast<double>(value),
                                  static_cast<double>(value + 1), count});
    }
    return bins;
  }

  const std::int64_t max_value = *std::max_element(diag.begin(), diag.end());
  std::vector<std::size_t> counts;
  for (const auto d : diag) {
    if (d < 1) continue;  // zero columns carry no frequency mass
    std::size_t b = 0;
    std::int64_t hi = 2;
    while (d >= hi) {
      hi *= 2;
      ++b;
    }
    if (counts.size() <= b) counts.resize(b + 1, 0);
    counts[b] += 1;
  }
  double lo = 1.0;
  for (std::size_t b = 0; b < counts.size(); ++b) {
    if (counts[b] > 0 && lo <= static_cast<double>(max_value)) {
      bins.push_back(HistogramBin{lo, lo * 2.0, counts[b]});
    }
    lo *= 2.0;
  }
  return bins;
}

void write_histogram_csv(std::span<const HistogramBin> bins, std::ostream& out) {
  out << "# granreg-csv v1 histogram\n";
  out << "bin_low,bin_high,count\n";
  char buf[64];
  for (const auto& b : bins) {
    std::snprintf(buf, sizeof(buf), "%.12g,%.12g,%zu", b.lo, b.hi, b.count);
    out << buf << '\n';
  }
}

}  // namespace granreg
