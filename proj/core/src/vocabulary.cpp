#include "granreg/vocabulary.hpp"

#include <algorithm>
#include <unordered_set>

#include "granreg/errors.hpp"
#include "granreg/icd.hpp"

namespace granreg {

CodeVocabulary::CodeVocabulary(int level, std::vector<std::string> codes)
    : level_(level), codes_(std::move(codes)) {
  if (level_ < kMinLevel || level_ > kMaxLevel) {
    throw Error("vocabulary level " + std::to_string(level_) + " outside [2, 7]");
  }
  for (std::size_t j = 0; j < codes_.size(); ++j) {
    if (codes_[j].empty() || static_cast<int>(codes_[j].size()) > level_) {
      throw Error("vocabulary code '" + codes_[j] + "' longer than level " +
                  std::to_string(level_));
    }
    if (j > 0 && !(codes_[j - 1] < codes_[j])) {
      throw Error("vocabulary codes must be sorted and unique");
    }
  }
}

std::optional<std::size_t> CodeVocabulary::index_of(std::string_view code) const {
  const auto it = std::lower_bound(codes_.begin(), codes_.end(), code);
  if (it == codes_.end() || *it != code) return std::nullopt;
  return static_cast<std::size_t>(it - codes_.begin());
}

CodeVocabulary build_vocabulary(const StayCorpus& corpus, int level) {
  if (corpus.size() == 0) throw EmptyCorpus("cannot build vocabulary from empty corpus");
  std::unordered_set<std::string> seen;
  for (const auto& rec : corpus) {
    for (const auto& code : rec.codes) seen.insert(truncate(code, level));
  }
  std::vector<std::string> codes(seen.begin(), seen.end());
  std::sort(codes.begin(), codes.end());
  return CodeVocabulary(level, std::move(codes));
}

MergeMap::MergeMap(int from_level, int to_level, std::vector<std::size_t> assignments,
                   CodeVocabulary coarse)
    : from_level_(from_level),
      to_level_(to_level),
      assignments_(std::move(assignments)),
      coarse_(std::move(coarse)) {
  if (to_level_ >= from_level_) {
    throw LevelOrder("merge map target level " + std::to_string(to_level_) +
                     " must be below source level " + std::to_string(from_level_));
  }
  std::vector<char> hit(coarse_.size(), 0);
  for (std::size_t j = 0; j < assignments_.size(); ++j) {
    if (assignments_[j] >= coarse_.size()) {
      throw Error("merge map assignment out of range at source column " + std::to_string(j));
    }
    hit[assignments_[j]] = 1;
  }
  for (std::size_t i = 0; i < hit.size(); ++i) {
    if (!hit[i]) {
      throw Error("merge map target column " + std::to_string(i) + " ('" +
                  coarse_.code(i) + "') has no source");
    }
  }
}

MergeMap build_merge_map(const CodeVocabulary& fine, int coarse_level) {
  if (coarse_level >= fine.level()) {
    throw LevelOrder("coarse level " + std::to_string(coarse_level) +
                     " must be below fine level " + std::to_string(fine.level()));
  }
  std::vector<std::string> truncated;
  truncated.reserve(fine.size());
  for (const auto& code : fine.codes()) truncated.push_back(truncate(code, coarse_level));

  std::vector<std::string> targets = truncated;
  std::sort(targets.begin(), targets.end());
  targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
  CodeVocabulary coarse(coarse_level, std::move(targets));

  std::vector<std::size_t> assignments;
  assignments.reserve(fine.size());
  for (const auto& t : truncated) assignments.push_back(*coarse.index_of(t));
  return MergeMap(fine.level(), coarse_level, std::move(assignments), std::move(coarse));
}

}  // namespace granreg
