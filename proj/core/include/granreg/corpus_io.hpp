#pragma once

#include <filesystem>
#include <iosfwd>

#include "granreg/stay.hpp"

namespace granreg {

enum class CorpusFormat { jsonl, csv };

/// What to do with a record that fails validation or parsing.
enum class InvalidPolicy {
  reject,  // throw on the first bad line
  skip,    // drop bad lines, count them
};

struct LoadResult {
  StayCorpus corpus;
  std::size_t skipped = 0;
};

/// Loads a stay corpus.
///
/// JSONL: one object per line with fields cost (number, > 0, required),
/// codes (array of 1-25 strings, required) and stay_id (string, optional);
/// unknown fields are ignored. CSV: header `stay_id,cost,codes` with the
/// codes cell semicolon-separated. All files UTF-8. Errors carry 1-based
/// line numbers.
LoadResult load_corpus(const std::filesystem::path& path, CorpusFormat format,
                       InvalidPolicy policy = InvalidPolicy::reject);
LoadResult load_corpus(std::istream& in, CorpusFormat format,
                       InvalidPolicy policy = InvalidPolicy::reject);

void write_corpus(const StayCorpus& corpus, const std::filesystem::path& path,
                  CorpusFormat format);
void write_corpus(const StayCorpus& corpus, std::ostream& out, CorpusFormat format);

/// Guesses the format from the file extension (.jsonl/.json vs .csv).
CorpusFormat guess_format(const std::filesystem::path& path);

}  // namespace granreg
