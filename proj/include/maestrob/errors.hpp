#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace maestrob {

// Common base so callers (the CLI in particular) can map failures to the
// documented exit-code taxonomy without catching each type separately.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// --- input-format errors (exit code 2) ---------------------------------

// Lexical or structural failure in s-expression input. line/column are
// 1-based and always point inside the offending text.
class SyntaxError : public Error {
 public:
  SyntaxError(int line, int column, const std::string& expected);
  int line;
  int column;
  std::string expected;
};

// A parsed value that violates a structural invariant (undeclared
// predicate, duplicate action, negative literal in init, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Line-oriented and attribute-value file formats. line 0 = unknown.
class ParseError : public Error {
 public:
  ParseError(int line_no, const std::string& msg);
  int line;
};

class CycleError : public Error {
 public:
  explicit CycleError(std::vector<std::string> members);
  std::vector<std::string> cycle;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class UnknownKindError : public Error {
 public:
  explicit UnknownKindError(const std::string& instance_id);
  std::string instance;
};

class CyclicCompositeError : public Error {
 public:
  using Error::Error;
};

class DuplicateBindingError : public Error {
 public:
  using Error::Error;
};

// --- semantic-resolution errors (exit code 3) ---------------------------

class InheritanceAmbiguityError : public Error {
 public:
  InheritanceAmbiguityError(const std::string& subject, const std::string& predicate,
                            std::vector<std::string> candidates);
  std::string subject;
  std::string predicate;
  std::vector<std::string> candidates;
};

class MissingPropertyError : public Error {
 public:
  MissingPropertyError(const std::string& uri, const std::string& predicate);
  std::string uri;
  std::string predicate;
};

class UnknownSymbolError : public Error {
 public:
  explicit UnknownSymbolError(const std::string& symbol, const std::string& uri);
  std::string symbol;
  std::string uri;
};

class UncoveredPredicateError : public Error {
 public:
  explicit UncoveredPredicateError(const std::string& predicate);
  std::string predicate;
};

class SkillConflictError : public Error {
 public:
  explicit SkillConflictError(const std::string& skill_name);
  std::string name;
};

// --- planner ------------------------------------------------------------

// Search hit a configured bound. Distinct from "no plan exists", which is
// an ordinary result, not an error.
class ResourceLimitError : public Error {
 public:
  explicit ResourceLimitError(const std::string& which);  // "nodes" | "time"
  std::string which;
};

// --- language grounding (exit code 6) ------------------------------------

class NoMatchError : public Error {
 public:
  explicit NoMatchError(double best);
  double best_score;
};

class AmbiguousMatchError : public Error {
 public:
  explicit AmbiguousMatchError(std::vector<std::string> tied_templates);
  std::vector<std::string> tied;
};

class AmbiguousBindingError : public Error {
 public:
  AmbiguousBindingError(const std::string& slot, std::vector<std::string> candidates);
  std::string slot;
  std::vector<std::string> candidates;
};

class EmptyDemoDiffError : public Error {
 public:
  EmptyDemoDiffError();
};

// --- runtime & bus --------------------------------------------------------

class UnboundSkillError : public Error {
 public:
  explicit UnboundSkillError(const std::string& schema);
  std::string schema;
};

class UnknownGestureError : public Error {
 public:
  explicit UnknownGestureError(const std::string& gesture);
  std::string gesture;
};

class BusClosedError : public Error {
 public:
  BusClosedError();
};

class InvalidPatternError : public Error {
 public:
  explicit InvalidPatternError(const std::string& pattern);
};

}  // namespace maestrob
