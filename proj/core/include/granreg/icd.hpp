#pragma once

#include <compare>
#include <string>
#include <string_view>

namespace granreg {

/// Granularity levels: the retained code prefix length. Level 7 keeps full
/// codes; level 2 is the coarsest sweep point.
inline constexpr int kMinLevel = 2;
inline constexpr int kMaxLevel = 7;

/// A normalized ICD-10-CM style diagnosis code: 3-7 characters from
/// {A-Z, 0-9}, first character alphabetic, no dot.
class IcdCode {
 public:
  /// Normalizes a raw code string: uppercases, strips dots, validates.
  /// Throws InvalidCode on bad length, illegal characters, or a
  /// non-alphabetic first character.
  static IcdCode normalize(std::string_view raw);

  const std::string& str() const { return text_; }
  int length() const { return static_cast<int>(text_.size()); }

  auto operator<=>(const IcdCode&) const = default;

 private:
  explicit IcdCode(std::string text) : text_(std::move(text)) {}
  std::string text_;
};

/// Prefix truncation: returns the code unchanged if its length is <= level,
/// else its first `level` characters. Level must be in [2, 7].
std::string truncate(std::string_view code, int level);
std::string truncate(const IcdCode& code, int level);

}  // namespace granreg
