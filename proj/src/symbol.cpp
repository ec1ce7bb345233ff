#include "maestrob/symbol.hpp"

#include <cctype>

namespace maestrob {

namespace {

std::string lowered(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  return out;
}

}  // namespace

Symbol::Symbol(std::string_view text) : value_(lowered(text)) {}

bool Symbol::valid(std::string_view text) {
  if (text.empty()) return false;
  std::string low = lowered(text);
  if (!(low[0] >= 'a' && low[0] <= 'z')) return false;
  for (char c : low) {
    bool ok = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-' || c == '_';
    if (!ok) return false;
  }
  return true;
}

std::ostream& operator<<(std::ostream& os, const Symbol& s) { return os << s.str(); }

}  // namespace maestrob
