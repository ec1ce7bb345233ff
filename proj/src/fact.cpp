#include "maestrob/fact.hpp"

#include "maestrob/hash.hpp"

#include <cstdio>
#include <sstream>

namespace maestrob {

std::string Fact::str() const {
  std::string out = predicate.str();
  out.push_back('(');
  for (size_t i = 0; i < args.size(); ++i) {
    if (i) out.push_back(',');
    out += args[i].str();
  }
  out.push_back(')');
  return out;
}

std::ostream& operator<<(std::ostream& os, const Fact& f) { return os << f.str(); }

std::string hex64(uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return std::string(buf, 16);
}

}  // namespace maestrob

size_t std::hash<maestrob::Fact>::operator()(const maestrob::Fact& f) const noexcept {
  uint64_t h = maestrob::fnv1a(f.predicate.str());
  for (const auto& a : f.args) {
    h = maestrob::fnv1a(",", h);
    h = maestrob::fnv1a(a.str(), h);
  }
  return static_cast<size_t>(h);
}
