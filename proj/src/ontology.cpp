#include "maestrob/ontology.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <deque>
#include <functional>
#include <sstream>

#include "maestrob/errors.hpp"

namespace maestrob {

std::string TripleValue::lexeme() const {
  switch (kind) {
    case Kind::Str: {
      std::string out = "\"";
      for (char c : text) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
      }
      out.push_back('"');
      return out;
    }
    case Kind::Bool:
      return boolean ? "true" : "false";
    case Kind::Uri:
    case Kind::Number:
      return text;
  }
  return text;
}

bool TripleValue::same_value(const TripleValue& other) const {
  if (kind != other.kind) return false;
  if (kind == Kind::Number) return number == other.number;
  if (kind == Kind::Bool) return boolean == other.boolean;
  return text == other.text;
}

namespace {

bool is_number_lexeme(const std::string& tok, double& out) {
  std::string body = tok;
  if (body.size() > 1 && body.back() == 'm') body.pop_back();
  if (body.empty()) return false;
  char* end = nullptr;
  out = std::strtod(body.c_str(), &end);
  return end == body.c_str() + body.size();
}

TripleValue parse_object(const std::string& raw, int line_no) {
  TripleValue v;
  if (raw.front() == '"') {
    if (raw.size() < 2 || raw.back() != '"')
      throw ParseError(line_no, "unterminated string literal");
    v.kind = TripleValue::Kind::Str;
    for (size_t i = 1; i + 1 < raw.size(); ++i) {
      if (raw[i] == '\\' && i + 2 < raw.size()) ++i;
      v.text.push_back(raw[i]);
    }
    return v;
  }
  if (raw == "true" || raw == "false") {
    v.kind = TripleValue::Kind::Bool;
    v.boolean = raw == "true";
    return v;
  }
  double num = 0;
  if ((std::isdigit(static_cast<unsigned char>(raw[0])) || raw[0] == '-' || raw[0] == '+' ||
       raw[0] == '.') &&
      is_number_lexeme(raw, num)) {
    v.kind = TripleValue::Kind::Number;
    v.text = raw;
    v.number = num;
    return v;
  }
  if (raw.find(':') == std::string::npos)
    throw ParseError(line_no, "object '" + raw + "' is neither literal nor URI");
  v.kind = TripleValue::Kind::Uri;
  v.text = raw;
  return v;
}

// Splits a triple line into subject, predicate, and the remainder (the
// object, which may be a quoted string containing spaces).
bool split_line(const std::string& line, std::string& s, std::string& p, std::string& o) {
  size_t i = 0;
  auto skip_ws = [&] { while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i; };
  auto token = [&] {
    size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    return line.substr(start, i - start);
  };
  skip_ws();
  if (i == line.size() || line[i] == '#') return false;  // blank or comment
  s = token();
  skip_ws();
  p = token();
  skip_ws();
  o = line.substr(i);
  while (!o.empty() && std::isspace(static_cast<unsigned char>(o.back()))) o.pop_back();
  return true;
}

}  // namespace

Ontology Ontology::load(std::string_view text) {
  Ontology o;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string s, p, obj;
    if (!split_line(line, s, p, obj)) continue;
    if (p.empty() || obj.empty()) throw ParseError(line_no, "expected `subject predicate object`");
    if (s.find(':') == std::string::npos)
      throw ParseError(line_no, "subject '" + s + "' is not a URI");
    if (p.find(':') == std::string::npos)
      throw ParseError(line_no, "predicate '" + p + "' is not a URI");
    Triple t{s, p, parse_object(obj, line_no)};
    if ((t.predicate == kIsaPredicate || t.predicate == kEqualsPredicate) &&
        t.value.kind != TripleValue::Kind::Uri)
      throw ParseError(line_no, t.predicate + " requires a URI object");
    o.triples_.push_back(std::move(t));
  }
  o.index_and_check();
  return o;
}

void Ontology::index_and_check() {
  std::sort(triples_.begin(), triples_.end(), [](const Triple& a, const Triple& b) {
    if (a.subject != b.subject) return a.subject < b.subject;
    if (a.predicate != b.predicate) return a.predicate < b.predicate;
    return a.value.lexeme() < b.value.lexeme();
  });
  triples_.erase(std::unique(triples_.begin(), triples_.end(),
                             [](const Triple& a, const Triple& b) {
                               return a.subject == b.subject && a.predicate == b.predicate &&
                                      a.value.lexeme() == b.value.lexeme();
                             }),
                 triples_.end());

  // equals-to classes: union by pointing at the current representative,
  // then flatten to the lexicographic minimum of each class.
  std::map<std::string, std::string> up;
  auto find = [&](std::string x) {
    while (true) {
      auto it = up.find(x);
      if (it == up.end() || it->second == x) return x;
      x = it->second;
    }
  };
  for (const Triple& t : triples_) {
    if (t.predicate != kEqualsPredicate) continue;
    up.try_emplace(t.subject, t.subject);
    up.try_emplace(t.value.text, t.value.text);
    std::string ra = find(t.subject), rb = find(t.value.text);
    if (ra != rb) up[std::max(ra, rb)] = std::min(ra, rb);
  }
  canon_.clear();
  for (const auto& [member, _] : up) {
    std::string root = find(member);
    if (root != member) canon_[member] = root;
  }

  parents_.clear();
  mentions_.clear();
  for (const Triple& t : triples_) {
    mentions_.insert(resolve_canonical(t.subject));
    mentions_.insert(resolve_canonical(t.predicate));
    if (t.value.kind == TripleValue::Kind::Uri) mentions_.insert(resolve_canonical(t.value.text));
    if (t.predicate == kIsaPredicate) {
      const std::string& sub = resolve_canonical(t.subject);
      const std::string& sup = resolve_canonical(t.value.text);
      auto& ps = parents_[sub];
      if (std::find(ps.begin(), ps.end(), sup) == ps.end()) ps.push_back(sup);
    }
  }
  for (auto& [_, ps] : parents_) std::sort(ps.begin(), ps.end());

  // is-a acyclicity over canonical URIs (self-loops included).
  std::map<std::string, int> state;  // 0 new, 1 on stack, 2 done
  std::vector<std::string> stack;
  std::function<void(const std::string&)> visit = [&](const std::string& node) {
    state[node] = 1;
    stack.push_back(node);
    auto it = parents_.find(node);
    if (it != parents_.end()) {
      for (const std::string& next : it->second) {
        int st = state.count(next) ? state[next] : 0;
        if (st == 1) {
          auto from = std::find(stack.begin(), stack.end(), next);
          std::vector<std::string> cycle(from, stack.end());
          throw CycleError(std::move(cycle));
        }
        if (st == 0) visit(next);
      }
    }
    stack.pop_back();
    state[node] = 2;
  };
  for (const auto& [node, _] : parents_) {
    if (!state.count(node) || state[node] == 0) visit(node);
  }
}

const std::string& Ontology::resolve_canonical(const std::string& uri) const {
  auto it = canon_.find(uri);
  return it == canon_.end() ? uri : it->second;
}

bool Ontology::isa(const std::string& sub, const std::string& super) const {
  const std::string& from = resolve_canonical(sub);
  const std::string& to = resolve_canonical(super);
  if (from == to) return true;
  std::set<std::string> seen{from};
  std::deque<std::string> queue{from};
  while (!queue.empty()) {
    std::string cur = std::move(queue.front());
    queue.pop_front();
    auto it = parents_.find(cur);
    if (it == parents_.end()) continue;
    for (const std::string& next : it->second) {
      if (next == to) return true;
      if (seen.insert(next).second) queue.push_back(next);
    }
  }
  return false;
}

std::vector<TripleValue> Ontology::property(const std::string& subject,
                                            const std::string& predicate) const {
  const std::string& pred = resolve_canonical(predicate);
  auto direct = [&](const std::string& node) {
    std::vector<TripleValue> vals;
    for (const Triple& t : triples_) {
      if (resolve_canonical(t.subject) == node && resolve_canonical(t.predicate) == pred)
        vals.push_back(t.value);
    }
    return vals;
  };

  // Breadth-first over is-a: the nearest depth with any assertion wins;
  // distinct value sets from different ancestors at that depth conflict.
  std::set<std::string> seen{resolve_canonical(subject)};
  std::vector<std::string> frontier{resolve_canonical(subject)};
  while (!frontier.empty()) {
    std::vector<std::vector<TripleValue>> found;
    for (const std::string& node : frontier) {
      auto vals = direct(node);
      if (!vals.empty()) found.push_back(std::move(vals));
    }
    if (!found.empty()) {
      for (size_t i = 1; i < found.size(); ++i) {
        bool same = found[i].size() == found[0].size();
        for (size_t k = 0; same && k < found[i].size(); ++k)
          same = found[i][k].same_value(found[0][k]);
        if (!same) {
          std::vector<std::string> cands;
          for (const auto& vs : found)
            for (const auto& v : vs) cands.push_back(v.lexeme());
          throw InheritanceAmbiguityError(subject, predicate, std::move(cands));
        }
      }
      return found[0];
    }
    std::vector<std::string> next;
    for (const std::string& node : frontier) {
      auto it = parents_.find(node);
      if (it == parents_.end()) continue;
      for (const std::string& parent : it->second) {
        if (seen.insert(parent).second) next.push_back(parent);
      }
    }
    frontier = std::move(next);
  }
  return {};
}

bool Ontology::knows(const std::string& uri) const {
  return mentions_.count(resolve_canonical(uri)) > 0;
}

std::string Ontology::dump() const {
  std::ostringstream out;
  for (const Triple& t : triples_)
    out << t.subject << ' ' << t.predicate << ' ' << t.value.lexeme() << '\n';
  return out.str();
}

}  // namespace maestrob
