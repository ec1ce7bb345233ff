#pragma once

#include <compare>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace maestrob {

inline constexpr const char* kIsaPredicate = "maestrob:is-a";
inline constexpr const char* kEqualsPredicate = "maestrob:equals-to";

// Object position of a triple: URI, quoted string, number (lengths are in
// meters, written with an `m` suffix), or boolean. The source lexeme of a
// number is kept so dump() reproduces the input text.
struct TripleValue {
  enum class Kind { Uri, Str, Number, Bool };
  Kind kind = Kind::Uri;
  std::string text;   // URI text, string content, or numeric lexeme
  double number = 0;
  bool boolean = false;

  std::string lexeme() const;  // as written in the triple file
  bool same_value(const TripleValue& other) const;
};

struct Triple {
  std::string subject;
  std::string predicate;
  TripleValue value;
};

// Triple store with equals-to equivalence classes and is-a reasoning.
// Triples are stored verbatim; canonicalization happens at query time.
// Immutable after load; queries are read-only and thread-safe.
class Ontology {
 public:
  Ontology() = default;

  // Line format: `<subject-uri> <predicate-uri> <object>`; `#` comments.
  // Checks that the is-a graph over canonical URIs is acyclic.
  static Ontology load(std::string_view text);

  // Lexicographically smallest member of u's equals-to class; u itself
  // when nothing is asserted about it.
  const std::string& resolve_canonical(const std::string& uri) const;

  // Reflexive-transitive is-a reachability over canonical URIs.
  bool isa(const std::string& sub, const std::string& super) const;

  // Values asserted for (subject, predicate), the subject canonicalized.
  // With no direct assertion the nearest is-a ancestor's values are
  // inherited; conflicting values at equal depth raise
  // InheritanceAmbiguityError.
  std::vector<TripleValue> property(const std::string& subject, const std::string& predicate) const;

  // True when the canonical URI occurs anywhere in the store (subject,
  // predicate, or URI-valued object).
  bool knows(const std::string& uri) const;

  // Sorted triples, one per line, source lexemes preserved:
  // load(dump(o)) observationally equals o.
  std::string dump() const;

  const std::vector<Triple>& triples() const { return triples_; }

 private:
  std::vector<Triple> triples_;                       // sorted by (s, p, lexeme)
  std::map<std::string, std::string> canon_;          // equals-to representative
  std::map<std::string, std::vector<std::string>> parents_;  // canonical is-a edges
  std::set<std::string> mentions_;                    // canonical URIs seen anywhere

  void index_and_check();
};

}  // namespace maestrob
