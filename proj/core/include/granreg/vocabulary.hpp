#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "granreg/stay.hpp"

namespace granreg {

/// Ordered set of code prefixes at a granularity level; defines the column
/// index space of design matrices. Codes are unique, sorted
/// lexicographically, and no longer than the level.
class CodeVocabulary {
 public:
  CodeVocabulary(int level, std::vector<std::string> codes);

  int level() const { return level_; }
  std::size_t size() const { return codes_.size(); }  // p^(l)
  const std::vector<std::string>& codes() const { return codes_; }
  const std::string& code(std::size_t j) const { return codes_[j]; }

  /// Column of a code, or nullopt when absent.
  std::optional<std::size_t> index_of(std::string_view code) const;

  bool operator==(const CodeVocabulary&) const = default;

 private:
  int level_;
  std::vector<std::string> codes_;
};

/// Distinct truncations of the corpus codes at the given level, sorted.
CodeVocabulary build_vocabulary(const StayCorpus& corpus, int level);

/// Column assignment pooling a fine vocabulary into a coarse one; the 0/1
/// matrix Q with exactly one 1 per row and no zero column.
class MergeMap {
 public:
  MergeMap(int from_level, int to_level, std::vector<std::size_t> assignments,
           CodeVocabulary coarse);

  int from_level() const { return from_level_; }
  int to_level() const { return to_level_; }
  std::size_t source_size() const { return assignments_.size(); }
  std::size_t target_size() const { return coarse_.size(); }
  std::size_t target_of(std::size_t source_col) const { return assignments_[source_col]; }
  const std::vector<std::size_t>& assignments() const { return assignments_; }
  const CodeVocabulary& coarse() const { return coarse_; }

 private:
  int from_level_;
  int to_level_;
  std::vector<std::size_t> assignments_;
  CodeVocabulary coarse_;
};

/// Merge map from a fine vocabulary down to coarse_level via truncation.
/// Throws LevelOrder unless coarse_level < fine.level().
MergeMap build_merge_map(const CodeVocabulary& fine, int coarse_level);

}  // namespace granreg
