#pragma once

#include <compare>
#include <functional>
#include <ostream>
#include <string>
#include <string_view>

namespace maestrob {

// Lowercase identifier: letters, digits, '-', '_', starting with a letter.
// Construction lowercases its input, so comparison is case-insensitive by
// canonical form. Construction does not validate; call Symbol::valid when
// the text comes from outside.
class Symbol {
 public:
  Symbol() = default;
  explicit Symbol(std::string_view text);

  static bool valid(std::string_view text);

  const std::string& str() const { return value_; }
  bool empty() const { return value_.empty(); }

  auto operator<=>(const Symbol&) const = default;

 private:
  std::string value_;
};

std::ostream& operator<<(std::ostream& os, const Symbol& s);

}  // namespace maestrob

template <>
struct std::hash<maestrob::Symbol> {
  size_t operator()(const maestrob::Symbol& s) const noexcept {
    return std::hash<std::string>{}(s.str());
  }
};
