#include "granreg/corpus_io.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "granreg/errors.hpp"

namespace granreg {

namespace {

using nlohmann::json;

std::vector<IcdCode> normalize_codes(const std::vector<std::string>& raw,
                                     std::size_t line_no) {
  if (raw.empty()) throw ValidationError("record has no codes (line " +
                                         std::to_string(line_no) + ")");
  std::vector<IcdCode> codes;
  codes.reserve(raw.size());
  for (const auto& c : raw) codes.push_back(IcdCode::normalize(c));
  return codes;
}

StayRecord parse_jsonl_line(const std::string& line, std::size_t line_no) {
  try {
    const json obj = json::parse(line);
    if (!obj.is_object()) throw ParseError("line is not a JSON object", line_no);
    if (!obj.contains("cost") || !obj["cost"].is_number()) {
      throw ParseError("missing or non-numeric 'cost'", line_no);
    }
    if (!obj.contains("codes") || !obj["codes"].is_array()) {
      throw ParseError("missing or non-array 'codes'", line_no);
    }
    if (obj.contains("stay_id") && !obj["stay_id"].is_string()) {
      throw ParseError("non-string 'stay_id'", line_no);
    }
    std::string stay_id = obj.value("stay_id", std::string{});
    std::vector<std::string> raw_codes;
    for (const auto& c : obj["codes"]) {
      if (!c.is_string()) throw ParseError("non-string entry in 'codes'", line_no);
      raw_codes.push_back(c.get<std::string>());
    }
    return StayRecord::make(std::move(stay_id), obj["cost"].get<double>(),
                            normalize_codes(raw_codes, line_no));
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad JSON: ") + e.what(), line_no);
  }
}

std::vector<std::string> split_on(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  parts.push_back(cur);
  return parts;
}

StayRecord parse_csv_line(const std::string& line, std::size_t line_no) {
  const auto fields = split_on(line, ',');
  if (fields.size() != 3) {
    throw ParseError("expected 3 fields 'stay_id,cost,codes', got " +
                     std::to_string(fields.size()), line_no);
  }
  double cost = 0.0;
  try {
    std::size_t pos = 0;
    cost = std::stod(fields[1], &pos);
    if (pos != fields[1].size()) throw std::invalid_argument("trailing characters");
  } catch (const std::exception&) {
    throw ParseError("cost '" + fields[1] + "' is not a number", line_no);
  }
  std::vector<std::string> raw_codes;
  for (auto& c : split_on(fields[2], ';')) {
    if (!c.empty()) raw_codes.push_back(c);
  }
  return StayRecord::make(fields[0], cost, normalize_codes(raw_codes, line_no));
}

bool blank(const std::string& s) {
  for (char c : s) {
    if (!std::isspace(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

}  // namespace

LoadResult load_corpus(std::istream& in, CorpusFormat format, InvalidPolicy policy) {
  std::vector<StayRecord> records;
  std::size_t skipped = 0;
  std::string line;
  std::size_t line_no = 0;

  if (format == CorpusFormat::csv) {
    if (!std::getline(in, line)) throw ParseError("missing CSV header", 1);
    ++line_no;
    // tolerate a trailing \r from CRLF input
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "stay_id,cost,codes") {
      throw ParseError("CSV header must be 'stay_id,cost,codes'", 1);
    }
  }

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (blank(line)) continue;
    try {
      records.push_back(format == CorpusFormat::jsonl ? parse_jsonl_line(line, line_no)
                                                      : parse_csv_line(line, line_no));
    } catch (const Error&) {
      if (policy == InvalidPolicy::reject) throw;
      ++skipped;
    }
  }
  if (records.empty()) {
    throw ValidationError("input contains no valid stay records");
  }
  return LoadResult{StayCorpus(std::move(records)), skipped};
}

LoadResult load_corpus(const std::filesystem::path& path, CorpusFormat format,
                       InvalidPolicy policy) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  return load_corpus(in, format, policy);
}

void write_corpus(const StayCorpus& corpus, std::ostream& out, CorpusFormat format) {
  char buf[64];
  if (format == CorpusFormat::csv) out << "stay_id,cost,codes\n";
  for (const auto& rec : corpus) {
    if (format == CorpusFormat::jsonl) {
      json obj;
      obj["stay_id"] = rec.stay_id;
      obj["cost"] = rec.cost;  // nlohmann emits shortest round-trip form
      json codes = json::array();
      for (const auto& c : rec.codes) codes.push_back(c.str());
      obj["codes"] = std::move(codes);
      out << obj.dump() << '\n';
    } else {
      std::snprintf(buf, sizeof(buf), "%.17g", rec.cost);
      out << rec.stay_id << ',' << buf << ',';
      for (std::size_t i = 0; i < rec.codes.size(); ++i) {
        if (i) out << ';';
        out << rec.codes[i].str();
      }
      out << '\n';
    }
  }
}

void write_corpus(const StayCorpus& corpus, const std::filesystem::path& path,
                  CorpusFormat format) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  write_corpus(corpus, out, format);
  out.flush();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

CorpusFormat guess_format(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  if (ext == ".csv") return CorpusFormat::csv;
  return CorpusFormat::jsonl;
}

}  // namespace granreg
