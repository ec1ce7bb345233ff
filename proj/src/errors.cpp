#include "maestrob/errors.hpp"

#include <sstream>

namespace maestrob {

namespace {

std::string join(const std::vector<std::string>& parts, const char* sep) {
  std::string out;
  for (size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

}  // namespace

SyntaxError::SyntaxError(int line_no, int column_no, const std::string& what_expected)
    : Error([&] {
        std::ostringstream os;
        os << line_no << ":" << column_no << ": expected " << what_expected;
        return os.str();
      }()),
      line(line_no),
      column(column_no),
      expected(what_expected) {}

ParseError::ParseError(int line_no, const std::string& msg)
    : Error(line_no > 0 ? "line " + std::to_string(line_no) + ": " + msg : msg), line(line_no) {}

CycleError::CycleError(std::vector<std::string> members)
    : Error("is-a cycle: " + join(members, " -> ")), cycle(std::move(members)) {}

UnknownKindError::UnknownKindError(const std::string& instance_id)
    : Error("instance '" + instance_id + "' references an unknown object kind"),
      instance(instance_id) {}

InheritanceAmbiguityError::InheritanceAmbiguityError(const std::string& subj,
                                                     const std::string& pred,
                                                     std::vector<std::string> cands)
    : Error("ambiguous inherited property " + pred + " of " + subj + " from: " + join(cands, ", ")),
      subject(subj),
      predicate(pred),
      candidates(std::move(cands)) {}

MissingPropertyError::MissingPropertyError(const std::string& subject_uri,
                                           const std::string& pred)
    : Error("missing property " + pred + " on " + subject_uri), uri(subject_uri), predicate(pred) {}

UnknownSymbolError::UnknownSymbolError(const std::string& sym, const std::string& sym_uri)
    : Error("context symbol '" + sym + "' maps to URI '" + sym_uri + "' unknown to the ontology"),
      symbol(sym),
      uri(sym_uri) {}

UncoveredPredicateError::UncoveredPredicateError(const std::string& pred)
    : Error("precondition predicate '" + pred +
            "' has no source: not initialized, not an effect, not rule-derived"),
      predicate(pred) {}

SkillConflictError::SkillConflictError(const std::string& skill_name)
    : Error("skill '" + skill_name + "' defined twice with different bodies"), name(skill_name) {}

ResourceLimitError::ResourceLimitError(const std::string& limit)
    : Error("search exceeded the " + limit + " limit"), which(limit) {}

NoMatchError::NoMatchError(double best)
    : Error("no template matched (best score " + std::to_string(best) + ")"), best_score(best) {}

AmbiguousMatchError::AmbiguousMatchError(std::vector<std::string> tied_templates)
    : Error("utterance matches several templates equally: " + join(tied_templates, ", ")),
      tied(std::move(tied_templates)) {}

AmbiguousBindingError::AmbiguousBindingError(const std::string& slot_name,
                                             std::vector<std::string> cands)
    : Error(cands.empty()
                ? "no scene object satisfies slot " + slot_name
                : "several scene objects satisfy slot " + slot_name + ": " + join(cands, ", ")),
      slot(slot_name),
      candidates(std::move(cands)) {}

EmptyDemoDiffError::EmptyDemoDiffError()
    : Error("demonstration frames are symbolically identical") {}

UnboundSkillError::UnboundSkillError(const std::string& schema_name)
    : Error("no skill bound to action schema '" + schema_name + "'"), schema(schema_name) {}

UnknownGestureError::UnknownGestureError(const std::string& gesture_name)
    : Error("gesture '" + gesture_name + "' is not supported by the platform"),
      gesture(gesture_name) {}

BusClosedError::BusClosedError() : Error("blackboard is closed") {}

InvalidPatternError::InvalidPatternError(const std::string& pattern)
    : Error("invalid subscription pattern '" + pattern + "'") {}

}  // namespace maestrob
