#include "granreg/icd.hpp"

#include <cctype>

#include "granreg/errors.hpp"

namespace granreg {

namespace {

bool is_code_char(char c) {
  return (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
}

}  // namespace

IcdCode IcdCode::normalize(std::string_view raw) {
  std::string text;
  text.reserve(raw.size());
  for (char c : raw) {
    if (c == '.') continue;
    text.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  }
  if (text.size() < 3 || text.size() > 7) {
    throw InvalidCode("code '" + std::string(raw) + "' has length " +
                      std::to_string(text.size()) + " after normalization, expected 3-7");
  }
  for (char c : text) {
    if (!is_code_char(c)) {
      throw InvalidCode("code '" + std::string(raw) + "' contains illegal character '" +
                        std::string(1, c) + "'");
    }
  }
  if (text.front() < 'A' || text.front() > 'Z') {
    throw InvalidCode("code '" + std::string(raw) + "' must start with a letter");
  }
  return IcdCode(std::move(text));
}

std::string truncate(std::string_view code, int level) {
  if (level < kMinLevel || level > kMaxLevel) {
    throw Error("truncate: level " + std::to_string(level) + " outside [2, 7]");
  }
  if (static_cast<int>(code.size()) <= level) return std::string(code);
  return std::string(code.substr(0, static_cast<std::size_t>(level)));
}

std::string truncate(const IcdCode& code, int level) { return truncate(code.str(), level); }

}  // namespace granreg
