#include "maestrob/pddl/parser.hpp"

#include <algorithm>
#include <cctype>
#include <optional>
#include <set>
#include <utility>

#include "maestrob/errors.hpp"

namespace maestrob::pddl {

namespace {

// ---------------------------------------------------------------- lexing

struct SExpr {
  enum class Kind { List, Atom, Str };
  Kind kind = Kind::List;
  int line = 1;
  int col = 1;
  std::string text;          // Atom / Str payload
  std::vector<SExpr> items;  // List children
};

class Reader {
 public:
  explicit Reader(std::string_view text) : text_(text) {}

  // Reads exactly one top-level form and requires end of input after it.
  SExpr read_single() {
    skip_blank();
    if (eof()) fail("an s-expression");
    SExpr e = read_form();
    skip_blank();
    if (!eof()) fail("end of input");
    return e;
  }

 private:
  SExpr read_form() {
    skip_blank();
    if (eof()) fail("'(' or atom");
    char c = peek();
    if (c == '(') return read_list();
    if (c == ')') fail("'(' or atom");
    if (c == '"') return read_string();
    return read_atom();
  }

  SExpr read_list() {
    SExpr e;
    e.kind = SExpr::Kind::List;
    e.line = line_;
    e.col = col_;
    get();  // '('
    for (;;) {
      skip_blank();
      if (eof()) fail("')'");
      if (peek() == ')') {
        get();
        return e;
      }
      e.items.push_back(read_form());
    }
  }

  SExpr read_string() {
    SExpr e;
    e.kind = SExpr::Kind::Str;
    e.line = line_;
    e.col = col_;
    get();  // '"'
    for (;;) {
      if (eof()) fail("closing '\"'");
      char c = get();
      if (c == '"') return e;
      if (c == '\\') {
        if (eof()) fail("escaped character");
        e.text.push_back(get());
      } else {
        e.text.push_back(c);
      }
    }
  }

  SExpr read_atom() {
    SExpr e;
    e.kind = SExpr::Kind::Atom;
    e.line = line_;
    e.col = col_;
    while (!eof()) {
      char c = peek();
      if (c == '(' || c == ')' || c == '"' || c == ';' || std::isspace(static_cast<unsigned char>(c)))
        break;
      e.text.push_back(get());
    }
    return e;
  }

  void skip_blank() {
    while (!eof()) {
      char c = peek();
      if (c == ';') {
        while (!eof() && peek() != '\n') get();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        get();
      } else {
        break;
      }
    }
  }

  bool eof() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }

  char get() {
    char c = text_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  [[noreturn]] void fail(const std::string& expected) const {
    throw SyntaxError(line_, col_, expected);
  }

  std::string_view text_;
  size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

// ------------------------------------------------------------ tree walk

[[noreturn]] void fail_at(const SExpr& e, const std::string& expected) {
  throw SyntaxError(e.line, e.col, expected);
}

bool is_atom(const SExpr& e, std::string_view word) {
  if (e.kind != SExpr::Kind::Atom) return false;
  if (e.text.size() != word.size()) return false;
  for (size_t i = 0; i < word.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(e.text[i])) != word[i]) return false;
  }
  return true;
}

Symbol name_atom(const SExpr& e) {
  if (e.kind != SExpr::Kind::Atom || !Symbol::valid(e.text)) fail_at(e, "an identifier");
  return Symbol(e.text);
}

std::string variable_atom(const SExpr& e) {
  if (e.kind != SExpr::Kind::Atom || e.text.size() < 2 || e.text[0] != '?' ||
      !Symbol::valid(e.text.substr(1)))
    fail_at(e, "a '?variable'");
  return Symbol(e.text.substr(1)).str();
}

// `x y - t u - v w` with untyped entries defaulting to `object`.
// Used for :types (names), :objects (names), and parameter lists (vars).
template <typename Emit>
void walk_typed_list(const std::vector<SExpr>& items, size_t begin, bool variables, Emit emit) {
  std::vector<const SExpr*> pending;
  for (size_t i = begin; i < items.size(); ++i) {
    const SExpr& e = items[i];
    if (is_atom(e, "-")) {
      if (pending.empty()) fail_at(e, "a name before '-'");
      if (i + 1 >= items.size()) fail_at(e, "a type after '-'");
      Symbol type = name_atom(items[++i]);
      for (const SExpr* p : pending) emit(*p, type);
      pending.clear();
    } else {
      if (variables) variable_atom(e);  // shape check, value re-read by emit
      else name_atom(e);
      pending.push_back(&e);
    }
  }
  for (const SExpr* p : pending) emit(*p, Symbol("object"));
}

std::vector<Param> parse_params(const SExpr& list) {
  if (list.kind != SExpr::Kind::List) fail_at(list, "a parameter list");
  std::vector<Param> out;
  walk_typed_list(list.items, 0, /*variables=*/true,
                  [&](const SExpr& e, Symbol type) { out.push_back({variable_atom(e), type}); });
  return out;
}

Term parse_term(const SExpr& e) {
  if (e.kind != SExpr::Kind::Atom) fail_at(e, "a term");
  if (!e.text.empty() && e.text[0] == '?') return {Term::Kind::Variable, variable_atom(e)};
  return {Term::Kind::Constant, name_atom(e).str()};
}

Atom parse_atom_form(const SExpr& e) {
  if (e.kind != SExpr::Kind::List || e.items.empty()) fail_at(e, "'(predicate ...)'");
  Atom a;
  a.predicate = name_atom(e.items[0]);
  for (size_t i = 1; i < e.items.size(); ++i) a.args.push_back(parse_term(e.items[i]));
  return a;
}

Literal parse_literal(const SExpr& e) {
  if (e.kind == SExpr::Kind::List && !e.items.empty() && is_atom(e.items[0], "not")) {
    if (e.items.size() != 2) fail_at(e, "'(not (predicate ...))'");
    return {false, parse_atom_form(e.items[1])};
  }
  return {true, parse_atom_form(e)};
}

// A formula is a bare literal or an (and ...) of literals.
std::vector<Literal> parse_conjunction(const SExpr& e) {
  std::vector<Literal> out;
  if (e.kind == SExpr::Kind::List && !e.items.empty() && is_atom(e.items[0], "and")) {
    for (size_t i = 1; i < e.items.size(); ++i) out.push_back(parse_literal(e.items[i]));
    return out;
  }
  if (e.kind == SExpr::Kind::List && e.items.empty()) return out;  // ()
  out.push_back(parse_literal(e));
  return out;
}

ContextBlock parse_context(const SExpr& block) {
  ContextBlock ctx;
  for (size_t i = 1; i < block.items.size(); ++i) {
    const SExpr& entry = block.items[i];
    if (entry.kind != SExpr::Kind::List || entry.items.size() != 2)
      fail_at(entry, "'(symbol \"uri\")'");
    Symbol sym = name_atom(entry.items[0]);
    const SExpr& uri = entry.items[1];
    if (uri.kind != SExpr::Kind::Str) fail_at(uri, "a quoted URI string");
    if (ctx.entries.count(sym))
      throw ValidationError("symbol '" + sym.str() + "' annotated more than once in :context");
    if (uri.text.find(':') == std::string::npos)
      throw ValidationError("context URI '" + uri.text + "' is not absolute (no ':')");
    ctx.entries.emplace(sym, uri.text);
  }
  return ctx;
}

ActionSchema parse_action(const SExpr& block) {
  ActionSchema a;
  if (block.items.size() < 2) fail_at(block, "an action name");
  a.name = name_atom(block.items[1]);
  size_t i = 2;
  bool saw_params = false;
  while (i < block.items.size()) {
    const SExpr& key = block.items[i];
    if (key.kind != SExpr::Kind::Atom || key.text.empty() || key.text[0] != ':')
      fail_at(key, "':parameters', ':precondition' or ':effect'");
    if (i + 1 >= block.items.size()) fail_at(key, "a value after " + key.text);
    const SExpr& value = block.items[i + 1];
    if (is_atom(key, ":parameters")) {
      a.params = parse_params(value);
      saw_params = true;
    } else if (is_atom(key, ":precondition")) {
      a.precondition = parse_conjunction(value);
    } else if (is_atom(key, ":effect")) {
      a.effects = parse_conjunction(value);
    } else {
      fail_at(key, "':parameters', ':precondition' or ':effect'");
    }
    i += 2;
  }
  if (!saw_params) fail_at(block, "':parameters'");
  return a;
}

const SExpr& expect_list(const SExpr& e, const char* what) {
  if (e.kind != SExpr::Kind::List) fail_at(e, what);
  return e;
}

// (define (domain n) ...) / (define (problem n) ...) preamble.
Symbol parse_define_head(const SExpr& top, const char* which) {
  if (top.kind != SExpr::Kind::List || top.items.empty() || !is_atom(top.items[0], "define"))
    fail_at(top, "'(define ...)'");
  if (top.items.size() < 2) fail_at(top, std::string("'(") + which + " name)'");
  const SExpr& head = expect_list(top.items[1], "a name form");
  if (head.items.size() != 2 || !is_atom(head.items[0], which))
    fail_at(head, std::string("'(") + which + " name)'");
  return name_atom(head.items[1]);
}

}  // namespace

// ------------------------------------------------------------ validation

namespace {

// Variables reachable in one action body must come from its parameters;
// literals are checked against the declared predicates.
void check_action_body(const ActionSchema& a,
                       const std::map<Symbol, const PredicateDecl*>& decls,
                       const std::map<Symbol, Symbol>& type_parent) {
  std::map<std::string, Symbol> var_types;
  std::set<std::string> seen;
  for (const Param& p : a.params) {
    if (!seen.insert(p.var).second)
      throw ValidationError("action '" + a.name.str() + "': duplicate parameter ?" + p.var);
    var_types[p.var] = p.type;
  }
  auto subtype_of = [&](Symbol sub, const Symbol& super) {
    if (super == Symbol("object")) return true;
    while (true) {
      if (sub == super) return true;
      auto it = type_parent.find(sub);
      if (it == type_parent.end()) return false;
      sub = it->second;
    }
  };
  auto check = [&](const Literal& l, const char* where) {
    auto it = decls.find(l.atom.predicate);
    if (it == decls.end())
      throw ValidationError("action '" + a.name.str() + "': undeclared predicate '" +
                            l.atom.predicate.str() + "' in " + where);
    const PredicateDecl& d = *it->second;
    if (d.params.size() != l.atom.args.size())
      throw ValidationError("action '" + a.name.str() + "': predicate '" + d.name.str() +
                            "' expects " + std::to_string(d.params.size()) + " arguments");
    for (size_t i = 0; i < l.atom.args.size(); ++i) {
      const Term& t = l.atom.args[i];
      if (t.kind != Term::Kind::Variable)
        throw ValidationError("action '" + a.name.str() +
                              "': constants are not allowed in action bodies");
      auto vt = var_types.find(t.name);
      if (vt == var_types.end())
        throw ValidationError("action '" + a.name.str() + "': free variable ?" + t.name + " in " +
                              where);
      if (!subtype_of(vt->second, d.params[i].type))
        throw ValidationError("action '" + a.name.str() + "': ?" + t.name + " has type '" +
                              vt->second.str() + "', predicate '" + d.name.str() + "' needs '" +
                              d.params[i].type.str() + "'");
    }
  };
  for (const Literal& l : a.precondition) check(l, "precondition");
  for (const Literal& l : a.effects) check(l, "effect");
  // Identical literal in add and delete can never ground to disjoint sets.
  for (const Literal& l : a.effects) {
    if (!l.positive) continue;
    for (const Literal& m : a.effects) {
      if (!m.positive && m.atom == l.atom)
        throw ValidationError("action '" + a.name.str() + "': effect both adds and deletes " +
                              l.atom.predicate.str());
    }
  }
}

// Canonical order inside a conjunction: positive literals first, each
// group lexicographic by atom. STRIPS semantics do not depend on order.
template <typename L>
void sort_literals(std::vector<L>& ls) {
  std::sort(ls.begin(), ls.end(), [](const L& a, const L& b) {
    if (a.positive != b.positive) return a.positive;
    return a < b;
  });
  ls.erase(std::unique(ls.begin(), ls.end()), ls.end());
}

template <typename T, typename Key>
void sort_unique_by_name(std::vector<T>& v, Key key, const char* what) {
  std::sort(v.begin(), v.end(), [&](const T& a, const T& b) { return key(a) < key(b); });
  for (size_t i = 1; i < v.size(); ++i) {
    if (key(v[i - 1]) == key(v[i]))
      throw ValidationError(std::string("duplicate ") + what + " '" + key(v[i]).str() + "'");
  }
}

}  // namespace

void validate_domain(Domain& d) {
  sort_unique_by_name(d.types, [](const TypeDecl& t) { return t.name; }, "type");
  sort_unique_by_name(d.predicates, [](const PredicateDecl& p) { return p.name; }, "predicate");
  sort_unique_by_name(d.actions, [](const ActionSchema& a) { return a.name; }, "action name");

  std::map<Symbol, Symbol> type_parent;
  for (const TypeDecl& t : d.types) {
    if (t.name == Symbol("object")) throw ValidationError("type 'object' cannot be redeclared");
    type_parent[t.name] = t.parent;
  }
  for (const TypeDecl& t : d.types) {
    // Walk to the root; a missing parent or a loop breaks the forest.
    std::set<Symbol> on_path{t.name};
    Symbol cur = t.parent;
    while (cur != Symbol("object")) {
      if (!type_parent.count(cur))
        throw ValidationError("type '" + t.name.str() + "' has undeclared ancestor '" + cur.str() +
                              "'");
      if (!on_path.insert(cur).second) throw ValidationError("type cycle through '" + cur.str() + "'");
      cur = type_parent[cur];
    }
  }

  std::map<Symbol, const PredicateDecl*> decls;
  for (PredicateDecl& p : d.predicates) {
    std::set<std::string> vars;
    for (const Param& par : p.params) {
      if (!vars.insert(par.var).second)
        throw ValidationError("predicate '" + p.name.str() + "': duplicate variable ?" + par.var);
      if (par.type != Symbol("object") && !type_parent.count(par.type))
        throw ValidationError("predicate '" + p.name.str() + "': unknown type '" + par.type.str() +
                              "'");
    }
    decls[p.name] = &p;
  }

  for (ActionSchema& a : d.actions) {
    for (const Param& p : a.params) {
      if (p.type != Symbol("object") && !type_parent.count(p.type))
        throw ValidationError("action '" + a.name.str() + "': unknown type '" + p.type.str() + "'");
    }
    sort_literals(a.precondition);
    sort_literals(a.effects);
    check_action_body(a, decls, type_parent);
  }
}

void validate_problem(Problem& p) {
  sort_unique_by_name(p.objects, [](const std::pair<Symbol, Symbol>& o) { return o.first; },
                      "object");
  std::set<Symbol> declared;
  for (const auto& [obj, type] : p.objects) declared.insert(obj);

  std::sort(p.init.begin(), p.init.end());
  p.init.erase(std::unique(p.init.begin(), p.init.end()), p.init.end());
  sort_literals(p.goal);

  for (const Fact& f : p.init) {
    for (const Symbol& a : f.args) {
      if (!declared.count(a))
        throw ValidationError("unknown object '" + a.str() + "' in init fact " + f.str());
    }
  }
  for (const GroundLiteral& l : p.goal) {
    for (const Symbol& a : l.fact.args) {
      if (!declared.count(a))
        throw ValidationError("unknown object '" + a.str() + "' in goal literal " + l.fact.str());
    }
  }
}

// -------------------------------------------------------------- parsing

Domain parse_domain(std::string_view text) {
  SExpr top = Reader(text).read_single();
  Domain d;
  d.name = parse_define_head(top, "domain");

  bool saw_types = false, saw_predicates = false, saw_context = false;
  for (size_t i = 2; i < top.items.size(); ++i) {
    const SExpr& block = expect_list(top.items[i], "a '(:section ...)' block");
    if (block.items.empty()) fail_at(block, "a section keyword");
    const SExpr& key = block.items[0];
    if (is_atom(key, ":requirements")) {
      continue;  // accepted and ignored; the dialect is fixed
    } else if (is_atom(key, ":types")) {
      if (saw_types) throw ValidationError("duplicate :types section");
      saw_types = true;
      walk_typed_list(block.items, 1, /*variables=*/false, [&](const SExpr& e, Symbol parent) {
        d.types.push_back({name_atom(e), parent});
      });
    } else if (is_atom(key, ":predicates")) {
      if (saw_predicates) throw ValidationError("duplicate :predicates section");
      saw_predicates = true;
      for (size_t j = 1; j < block.items.size(); ++j) {
        const SExpr& decl = expect_list(block.items[j], "'(predicate ?v - type ...)'");
        if (decl.items.empty()) fail_at(decl, "a predicate name");
        PredicateDecl pd;
        pd.name = name_atom(decl.items[0]);
        pd.params = parse_params(SExpr{SExpr::Kind::List, decl.line, decl.col, "",
                                       {decl.items.begin() + 1, decl.items.end()}});
        d.predicates.push_back(std::move(pd));
      }
    } else if (is_atom(key, ":action")) {
      d.actions.push_back(parse_action(block));
    } else if (is_atom(key, ":context")) {
      if (saw_context) throw ValidationError("duplicate :context section");
      saw_context = true;
      d.context = parse_context(block);
    } else {
      fail_at(key, "':requirements', ':types', ':predicates', ':action' or ':context'");
    }
  }
  validate_domain(d);
  return d;
}

Problem parse_problem(std::string_view text) {
  SExpr top = Reader(text).read_single();
  Problem p;
  p.name = parse_define_head(top, "problem");

  bool saw_domain = false, saw_objects = false, saw_init = false, saw_goal = false,
       saw_context = false;
  for (size_t i = 2; i < top.items.size(); ++i) {
    const SExpr& block = expect_list(top.items[i], "a '(:section ...)' block");
    if (block.items.empty()) fail_at(block, "a section keyword");
    const SExpr& key = block.items[0];
    if (is_atom(key, ":domain")) {
      if (saw_domain || block.items.size() != 2) fail_at(block, "'(:domain name)'");
      saw_domain = true;
      p.domain_name = name_atom(block.items[1]);
    } else if (is_atom(key, ":objects")) {
      if (saw_objects) throw ValidationError("duplicate :objects section");
      saw_objects = true;
      walk_typed_list(block.items, 1, /*variables=*/false, [&](const SExpr& e, Symbol type) {
        p.objects.emplace_back(name_atom(e), type);
      });
    } else if (is_atom(key, ":init")) {
      if (saw_init) throw ValidationError("duplicate :init section");
      saw_init = true;
      for (size_t j = 1; j < block.items.size(); ++j) {
        Literal l = parse_literal(block.items[j]);
        if (!l.positive)
          throw ValidationError("negative literal in init: " + l.atom.predicate.str());
        Fact f;
        f.predicate = l.atom.predicate;
        for (const Term& t : l.atom.args) {
          if (t.kind != Term::Kind::Constant)
            throw ValidationError("variable in init fact " + l.atom.predicate.str());
          f.args.emplace_back(Symbol(t.name));
        }
        p.init.push_back(std::move(f));
      }
    } else if (is_atom(key, ":goal")) {
      if (saw_goal || block.items.size() != 2) fail_at(block, "'(:goal formula)'");
      saw_goal = true;
      for (const Literal& l : parse_conjunction(block.items[1])) {
        GroundLiteral g;
        g.positive = l.positive;
        g.fact.predicate = l.atom.predicate;
        for (const Term& t : l.atom.args) {
          if (t.kind != Term::Kind::Constant)
            throw ValidationError("variable in goal literal " + l.atom.predicate.str());
          g.fact.args.emplace_back(Symbol(t.name));
        }
        p.goal.push_back(std::move(g));
      }
    } else if (is_atom(key, ":context")) {
      if (saw_context) throw ValidationError("duplicate :context section");
      saw_context = true;
      p.context = parse_context(block);
    } else {
      fail_at(key, "':domain', ':objects', ':init', ':goal' or ':context'");
    }
  }
  if (!saw_domain) fail_at(top, "'(:domain name)'");
  if (!saw_goal) fail_at(top, "'(:goal formula)'");
  validate_problem(p);
  return p;
}

Literal parse_single_literal(std::string_view text) {
  return parse_literal(Reader(text).read_single());
}

}  // namespace maestrob::pddl
