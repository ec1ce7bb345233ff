#include "maestrob/resolver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "maestrob/errors.hpp"
#include "maestrob/pddl/parser.hpp"
#include "maestrob/pddl/printer.hpp"

namespace maestrob {

using nlohmann::json;

namespace {

constexpr const char* kPropShape = "maestrob:prop/shape";
constexpr const char* kPropDiameter = "maestrob:prop/diameter";
constexpr const char* kPropSizeX = "maestrob:prop/size-x";
constexpr const char* kPropSizeY = "maestrob:prop/size-y";
constexpr const char* kPropCavityShape = "maestrob:prop/cavity-shape";
constexpr const char* kPropCavityDiameter = "maestrob:prop/cavity-diameter";
constexpr const char* kPropCavitySizeX = "maestrob:prop/cavity-size-x";
constexpr const char* kPropCavitySizeY = "maestrob:prop/cavity-size-y";

std::string g9(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::optional<TripleValue> lookup(const Ontology& o, const std::string& uri, const char* pred) {
  auto vals = o.property(uri, pred);
  if (vals.empty()) return std::nullopt;
  return vals.front();
}

double need_number(const Ontology& o, const std::string& uri, const char* pred) {
  auto v = lookup(o, uri, pred);
  if (!v) throw MissingPropertyError(uri, pred);
  if (v->kind != TripleValue::Kind::Number)
    throw ValidationError("property " + std::string(pred) + " of " + uri + " is not a number");
  return v->number;
}

std::string need_shape_name(const TripleValue& v, const std::string& uri, const char* pred) {
  if (v.kind != TripleValue::Kind::Str)
    throw ValidationError("property " + std::string(pred) + " of " + uri + " is not a string");
  if (v.text != "cylinder" && v.text != "cuboid")
    throw ValidationError("unknown shape '" + v.text + "' for " + uri);
  return v.text;
}

// Cross-section fit of A into B's cavity, as a conjunction of inequalities.
void eval_fits_cavity(const Ontology& o, const std::string& a, const std::string& b,
                      double clearance, ProvenanceEntry& entry) {
  auto cav = lookup(o, b, kPropCavityShape);
  if (!cav) {
    entry.note = "no-cavity";
    return;
  }
  std::string cav_shape = need_shape_name(*cav, b, kPropCavityShape);
  auto body = lookup(o, a, kPropShape);
  if (!body) throw MissingPropertyError(a, kPropShape);
  std::string a_shape = need_shape_name(*body, a, kPropShape);

  if (cav_shape == "cylinder") {
    double bound = need_number(o, b, kPropCavityDiameter) - clearance;
    if (a_shape == "cylinder") {
      entry.checks.push_back({need_number(o, a, kPropDiameter), bound});
    } else {
      double diag = std::hypot(need_number(o, a, kPropSizeX), need_number(o, a, kPropSizeY));
      entry.checks.push_back({diag, bound});
    }
  } else {
    double bx = need_number(o, b, kPropCavitySizeX) - clearance;
    double by = need_number(o, b, kPropCavitySizeY) - clearance;
    if (a_shape == "cylinder") {
      double d = need_number(o, a, kPropDiameter);
      entry.checks.push_back({d, bx});
      entry.checks.push_back({d, by});
    } else {
      entry.checks.push_back({need_number(o, a, kPropSizeX), bx});
      entry.checks.push_back({need_number(o, a, kPropSizeY), by});
    }
  }
  entry.emitted = std::all_of(entry.checks.begin(), entry.checks.end(),
                              [](const Inequality& c) { return c.lhs <= c.rhs; });
}

void check_rule(const ConstraintRule& r) {
  if (!Symbol::valid(r.name.str())) throw ValidationError("bad rule name '" + r.name.str() + "'");
  if (r.guard != "fits-cavity") throw ValidationError("unknown guard '" + r.guard + "'");
  if (r.param_kinds.size() != 2)
    throw ValidationError("guard fits-cavity needs exactly 2 parameters");
  if (!(r.clearance >= 0) || !std::isfinite(r.clearance))
    throw ValidationError("clearance must be a non-negative number");
  for (const std::string& k : r.param_kinds)
    if (!k.empty() && k.find(':') == std::string::npos)
      throw ValidationError("parameter kind '" + k + "' is not a URI");
}

}  // namespace

ConstraintRule builtin_insertable_rule() {
  ConstraintRule r;
  r.name = Symbol("insertable");
  r.param_kinds = {"", ""};
  return r;
}

std::vector<ConstraintRule> load_rules(std::string_view text) {
  std::vector<ConstraintRule> out;
  try {
    json doc = json::parse(text);
    for (const json& jr : doc.at("rules")) {
      ConstraintRule r;
      r.name = Symbol(jr.at("name").get<std::string>());
      for (const json& k : jr.at("paramKinds")) r.param_kinds.push_back(k.get<std::string>());
      const json& guard = jr.at("guard");
      r.guard = guard.at("id").get<std::string>();
      if (guard.contains("clearance")) r.clearance = guard["clearance"].get<double>();
      check_rule(r);
      out.push_back(std::move(r));
    }
  } catch (const json::exception& e) {
    throw ParseError(0, e.what());
  }
  return out;
}

DerivedFacts derive_facts(const std::vector<std::pair<Symbol, std::string>>& objects,
                          const Ontology& ontology, const std::vector<ConstraintRule>& rules) {
  DerivedFacts out;
  for (const ConstraintRule& rule : rules) {
    check_rule(rule);
    for (const auto& [a_sym, a_uri] : objects) {
      if (!rule.param_kinds[0].empty() && !ontology.isa(a_uri, rule.param_kinds[0])) continue;
      for (const auto& [b_sym, b_uri] : objects) {
        if (a_sym == b_sym) continue;
        if (!rule.param_kinds[1].empty() && !ontology.isa(b_uri, rule.param_kinds[1])) continue;
        ProvenanceEntry entry;
        entry.fact = Fact{rule.name, {a_sym, b_sym}};
        entry.rule = rule.name;
        entry.guard = rule.guard;
        entry.uris = {ontology.resolve_canonical(a_uri), ontology.resolve_canonical(b_uri)};
        eval_fits_cavity(ontology, a_uri, b_uri, rule.clearance, entry);
        if (entry.emitted) out.facts.push_back(entry.fact);
        out.provenance.push_back(std::move(entry));
      }
    }
  }
  std::sort(out.facts.begin(), out.facts.end());
  out.facts.erase(std::unique(out.facts.begin(), out.facts.end()), out.facts.end());
  return out;
}

ResolvedPair resolve(const pddl::Domain& domain, const pddl::Problem& problem,
                     const Ontology& ontology, const scene::SceneState& scene,
                     const std::vector<ConstraintRule>& rules) {
  if (problem.domain_name != domain.name)
    throw ValidationError("problem '" + problem.name.str() + "' targets domain '" +
                          problem.domain_name.str() + "', not '" + domain.name.str() + "'");

  std::map<Symbol, std::string> context = domain.context.entries;
  for (const auto& [sym, uri] : problem.context.entries) {
    auto [it, inserted] = context.emplace(sym, uri);
    if (!inserted && it->second != uri)
      throw ValidationError("context symbol '" + sym.str() + "' bound to both '" + it->second +
                            "' and '" + uri + "'");
  }
  for (const auto& [sym, uri] : context)
    if (!ontology.knows(uri)) throw UnknownSymbolError(sym.str(), uri);

  // Predicates a positive precondition may rely on: initialized facts,
  // anything perception can observe (whether or not it holds in this
  // frame), action effects, or a constraint rule that derives them.
  std::set<Symbol> covered = scene::fact_vocabulary();
  for (const Fact& f : problem.init) covered.insert(f.predicate);
  for (const pddl::ActionSchema& a : domain.actions)
    for (const pddl::Literal& l : a.effects)
      if (l.positive) covered.insert(l.atom.predicate);
  for (const ConstraintRule& r : rules) covered.insert(r.name);
  for (const pddl::ActionSchema& a : domain.actions)
    for (const pddl::Literal& l : a.precondition)
      if (l.positive && !covered.count(l.atom.predicate))
        throw UncoveredPredicateError(l.atom.predicate.str());

  // Constraints are derived only for objects the scene actually contains.
  std::set<Symbol> present;
  for (const scene::ObjectInstance& inst : scene.instances) present.insert(inst.id);
  std::vector<std::pair<Symbol, std::string>> derivation_objects;
  for (const auto& [obj, type] : problem.objects) {
    auto it = context.find(obj);
    if (it != context.end() && present.count(obj)) derivation_objects.emplace_back(obj, it->second);
  }
  DerivedFacts derived = derive_facts(derivation_objects, ontology, rules);

  pddl::Domain d = domain;
  pddl::Problem p = problem;
  p.init.insert(p.init.end(), scene.facts.begin(), scene.facts.end());
  p.init.insert(p.init.end(), derived.facts.begin(), derived.facts.end());
  std::sort(p.init.begin(), p.init.end());
  p.init.erase(std::unique(p.init.begin(), p.init.end()), p.init.end());

  std::set<Symbol> declared_preds;
  for (const pddl::PredicateDecl& pd : d.predicates) declared_preds.insert(pd.name);
  std::map<Symbol, size_t> extra_preds;
  for (const Fact& f : p.init) {
    if (declared_preds.count(f.predicate)) continue;
    auto [it, inserted] = extra_preds.emplace(f.predicate, f.args.size());
    if (!inserted && it->second != f.args.size())
      throw ValidationError("init uses '" + f.predicate.str() + "' with two arities");
  }
  for (const auto& [name, arity] : extra_preds) {
    pddl::PredicateDecl pd;
    pd.name = name;
    for (size_t i = 0; i < arity; ++i)
      pd.params.push_back({"a" + std::to_string(i), Symbol("object")});
    d.predicates.push_back(std::move(pd));
  }

  std::set<Symbol> declared_objs;
  for (const auto& [obj, type] : p.objects) declared_objs.insert(obj);
  for (const Fact& f : p.init)
    for (const Symbol& arg : f.args)
      if (declared_objs.insert(arg).second) p.objects.emplace_back(arg, Symbol("object"));

  d.context.entries.clear();
  p.context.entries.clear();
  pddl::validate_domain(d);
  pddl::validate_problem(p);

  // Output-validity invariant: the pair must survive a print/parse cycle.
  pddl::Domain d2 = pddl::parse_domain(pddl::print_domain(d, false));
  pddl::Problem p2 = pddl::parse_problem(pddl::print_problem(p, false));
  return {std::move(d2), std::move(p2), std::move(derived.facts), std::move(derived.provenance)};
}

std::string provenance_report(const std::vector<ProvenanceEntry>& entries) {
  std::ostringstream out;
  for (const ProvenanceEntry& e : entries) {
    out << pddl::to_string(e.fact) << (e.emitted ? " emitted " : " omitted ") << e.guard << " [";
    for (size_t i = 0; i < e.uris.size(); ++i) out << (i ? " " : "") << e.uris[i];
    out << "] ";
    if (e.checks.empty()) {
      out << e.note;
    } else {
      for (size_t i = 0; i < e.checks.size(); ++i) {
        if (i) out << ", ";
        out << g9(e.checks[i].lhs) << " <= " << g9(e.checks[i].rhs);
      }
    }
    out << "\n";
  }
  return out.str();
}

pddl::Problem synthesize_problem(Symbol name, const pddl::Domain& domain,
                                 const std::vector<scene::ObjectInstance>& instances,
                                 const std::vector<scene::ObjectKind>& kinds,
                                 const Ontology& ontology,
                                 std::vector<pddl::GroundLiteral> goal) {
  std::map<Symbol, std::string> type_uri;
  {
    std::set<Symbol> declared_types;
    for (const pddl::TypeDecl& t : domain.types) declared_types.insert(t.name);
    for (const auto& [sym, uri] : domain.context.entries)
      if (declared_types.count(sym)) type_uri[sym] = uri;
  }
  std::map<Symbol, const scene::ObjectKind*> kind_by_id;
  for (const scene::ObjectKind& k : kinds) kind_by_id[k.id] = &k;

  pddl::Problem p;
  p.name = name;
  p.domain_name = domain.name;
  for (const scene::ObjectInstance& inst : instances) {
    auto kit = kind_by_id.find(inst.kind);
    if (kit == kind_by_id.end()) throw UnknownKindError(inst.id.str());
    const std::string& kind_uri = kit->second->uri;

    std::vector<std::pair<Symbol, std::string>> candidates;
    for (const auto& [t, u] : type_uri)
      if (ontology.isa(kind_uri, u)) candidates.emplace_back(t, u);
    Symbol type("object");
    for (const auto& [t, u] : candidates) {
      bool most_specific = true;
      for (const auto& [t2, u2] : candidates)
        if (!ontology.isa(u, u2)) {
          most_specific = false;
          break;
        }
      if (most_specific) {
        type = t;
        break;
      }
    }
    p.objects.emplace_back(inst.id, type);
    p.context.entries[inst.id] = kind_uri;
  }
  p.goal = std::move(goal);
  pddl::validate_problem(p);
  return p;
}

}  // namespace maestrob
