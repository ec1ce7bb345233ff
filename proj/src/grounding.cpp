#include "maestrob/grounding.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include <nlohmann/json.hpp>

#include "maestrob/errors.hpp"
#include "maestrob/pddl/parser.hpp"

namespace maestrob {
namespace {

using nlohmann::json;

std::set<std::string> token_set(const std::vector<std::string>& tokens) {
  return {tokens.begin(), tokens.end()};
}

double jaccard_sets(const std::set<std::string>& a, const std::set<std::string>& b) {
  size_t inter = 0;
  for (const std::string& t : a) inter += b.count(t);
  size_t uni = a.size() + b.size() - inter;
  if (uni == 0) return 1.0;  // two empty token sets are identical
  return static_cast<double>(inter) / static_cast<double>(uni);
}

// Best phrase score of one template against the utterance. Tokens that
// spell a slot name act as wildcards and are dropped from the phrase side.
double template_score(const GoalTemplate& t, const std::set<std::string>& utterance) {
  std::set<std::string> slot_names;
  for (const auto& [slot, uri] : t.slots) slot_names.insert(slot);
  double best = 0.0;
  for (const std::string& phrase : t.phrases) {
    std::set<std::string> pt;
    for (const std::string& tok : tokenize(phrase))
      if (!slot_names.count(tok)) pt.insert(tok);
    best = std::max(best, jaccard_sets(pt, utterance));
  }
  return best;
}

std::string strip_question_mark(const std::string& key) {
  if (key.size() < 2 || key[0] != '?' || !Symbol::valid(key.substr(1)))
    throw ValidationError("slot name '" + key + "' is not a '?variable'");
  return Symbol(key.substr(1)).str();
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    auto u = static_cast<unsigned char>(c);
    if (std::isalnum(u)) {
      cur.push_back(static_cast<char>(std::tolower(u)));
    } else if (!cur.empty()) {
      out.push_back(cur);
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

double jaccard(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  return jaccard_sets(token_set(a), token_set(b));
}

std::vector<GoalTemplate> load_templates(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(0, e.what());
  }
  if (!doc.is_object() || !doc.contains("templates") || !doc["templates"].is_array())
    throw ParseError(0, "expected an object with a 'templates' array");

  std::vector<GoalTemplate> out;
  std::set<std::string> seen;
  for (const json& jt : doc["templates"]) {
    if (!jt.is_object()) throw ParseError(0, "template entries must be objects");
    GoalTemplate t;

    if (!jt.contains("id") || !jt["id"].is_string() || !Symbol::valid(jt["id"].get<std::string>()))
      throw ValidationError("template id must be an identifier");
    t.id = Symbol(jt["id"].get<std::string>());
    if (!seen.insert(t.id.str()).second)
      throw ValidationError("duplicate template id '" + t.id.str() + "'");

    if (!jt.contains("phrases") || !jt["phrases"].is_array() || jt["phrases"].empty())
      throw ValidationError("template '" + t.id.str() + "' needs at least one phrase");
    for (const json& jp : jt["phrases"]) {
      if (!jp.is_string()) throw ParseError(0, "phrases must be strings");
      t.phrases.push_back(jp.get<std::string>());
    }

    if (jt.contains("slots")) {
      if (!jt["slots"].is_object()) throw ParseError(0, "slots must be an object");
      for (const auto& [key, value] : jt["slots"].items()) {
        if (!value.is_string()) throw ParseError(0, "slot restrictions must be strings");
        std::string uri = value.get<std::string>();
        if (uri.find(':') == std::string::npos)
          throw ValidationError("slot restriction '" + uri + "' is not a namespaced URI");
        t.slots.emplace(strip_question_mark(key), std::move(uri));
      }
    }

    if (!jt.contains("goal") || !jt["goal"].is_array())
      throw ParseError(0, "template '" + t.id.str() + "' needs a 'goal' array");
    for (const json& jg : jt["goal"]) {
      if (!jg.is_string()) throw ParseError(0, "goal literals must be strings");
      pddl::Literal l = pddl::parse_single_literal(jg.get<std::string>());
      for (const pddl::Term& term : l.atom.args)
        if (term.kind == pddl::Term::Kind::Variable && !t.slots.count(term.name))
          throw ValidationError("goal variable ?" + term.name + " of template '" + t.id.str() +
                                "' has no slot entry");
      t.goal.push_back(std::move(l));
    }

    out.push_back(std::move(t));
  }
  return out;
}

GroundedGoal match(const std::string& utterance, const std::vector<GoalTemplate>& templates,
                   const scene::SceneState& scene, const std::vector<scene::ObjectKind>& kinds,
                   const Ontology& ontology, double tau) {
  const std::set<std::string> utter = token_set(tokenize(utterance));

  double best = -1.0;
  std::vector<size_t> leaders;
  for (size_t i = 0; i < templates.size(); ++i) {
    double s = template_score(templates[i], utter);
    if (s > best) {
      best = s;
      leaders.assign(1, i);
    } else if (s == best) {
      leaders.push_back(i);
    }
  }
  if (leaders.empty() || best < tau) throw NoMatchError(std::max(best, 0.0));
  if (leaders.size() > 1) {
    std::vector<std::string> ids;
    ids.reserve(leaders.size());
    for (size_t i : leaders) ids.push_back(templates[i].id.str());
    throw AmbiguousMatchError(std::move(ids));
  }
  const GoalTemplate& t = templates[leaders.front()];

  GroundedGoal out;
  out.template_id = t.id;
  out.score = best;

  for (const auto& [slot, restriction] : t.slots) {
    std::vector<std::string> cands;
    for (const scene::ObjectInstance& inst : scene.instances) {
      auto k = std::find_if(kinds.begin(), kinds.end(),
                            [&](const scene::ObjectKind& kk) { return kk.id == inst.kind; });
      if (k == kinds.end()) throw UnknownKindError(inst.id.str());
      if (ontology.isa(k->uri, restriction)) cands.push_back(inst.id.str());
    }
    std::sort(cands.begin(), cands.end());
    if (cands.size() != 1) throw AmbiguousBindingError("?" + slot, std::move(cands));
    out.bindings.emplace(slot, Symbol(cands.front()));
  }

  for (const pddl::Literal& l : t.goal) {
    pddl::GroundLiteral g;
    g.positive = l.positive;
    g.fact.predicate = l.atom.predicate;
    for (const pddl::Term& term : l.atom.args) {
      if (term.kind == pddl::Term::Kind::Constant) {
        g.fact.args.emplace_back(term.name);
      } else {
        auto it = out.bindings.find(term.name);
        if (it == out.bindings.end())
          throw ValidationError("goal variable ?" + term.name + " of template '" + t.id.str() +
                                "' has no slot entry");
        g.fact.args.push_back(it->second);
      }
    }
    out.goal.push_back(std::move(g));
  }
  return out;
}

std::vector<pddl::GroundLiteral> goal_from_demo(const scene::SceneState& initial,
                                                const scene::SceneState& final_frame) {
  auto [added, removed] = scene::diff_states(initial, final_frame);
  if (added.empty()) throw EmptyDemoDiffError();
  std::vector<pddl::GroundLiteral> out;
  out.reserve(added.size());
  for (Fact& f : added) out.push_back({std::move(f), true});
  return out;
}

}  // namespace maestrob
