#pragma once

#include <compare>
#include <functional>
#include <string>
#include <vector>

#include "maestrob/symbol.hpp"

namespace maestrob {

// A ground atom: predicate applied to object symbols, no variables.
// Displayed as `pred(a,b)`. This is the currency shared by the state
// extractor, the resolver, the planner, and the runtime.
struct Fact {
  Symbol predicate;
  std::vector<Symbol> args;

  auto operator<=>(const Fact&) const = default;

  std::string str() const;
};

std::ostream& operator<<(std::ostream& os, const Fact& f);

}  // namespace maestrob

template <>
struct std::hash<maestrob::Fact> {
  size_t operator()(const maestrob::Fact& f) const noexcept;
};
