#include "maestrob/planner.hpp"

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <deque>
#include <map>
#include <numeric>
#include <queue>
#include <set>
#include <sstream>
#include <unordered_set>

#include "maestrob/errors.hpp"
#include "maestrob/hash.hpp"

namespace maestrob {

namespace {

using Clock = std::chrono::steady_clock;

Fact substitute(const pddl::Atom& atom, const std::map<std::string, Symbol>& env) {
  Fact f;
  f.predicate = atom.predicate;
  for (const pddl::Term& t : atom.args) {
    if (t.kind == pddl::Term::Kind::Variable)
      f.args.push_back(env.at(t.name));
    else
      f.args.push_back(Symbol(t.name));
  }
  return f;
}

void sort_unique(std::vector<Fact>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

template <typename T>
bool sorted_subset(const std::vector<T>& sub, const std::vector<T>& super) {
  return std::includes(super.begin(), super.end(), sub.begin(), sub.end());
}

template <typename T>
bool sorted_disjoint(const std::vector<T>& a, const std::vector<T>& b) {
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j)
      ++i;
    else if (*j < *i)
      ++j;
    else
      return false;
  }
  return true;
}

struct StateHash {
  size_t operator()(const std::vector<uint32_t>& v) const {
    return static_cast<size_t>(fnv1a(std::string_view(
        reinterpret_cast<const char*>(v.data()), v.size() * sizeof(uint32_t))));
  }
};

}  // namespace

std::string GroundAction::str() const {
  std::ostringstream os;
  os << '(' << schema.str();
  for (const Symbol& b : binding) os << ' ' << b.str();
  os << ')';
  return os.str();
}

std::vector<GroundAction> ground(const pddl::Domain& domain, const pddl::Problem& problem) {
  std::map<Symbol, Symbol> parent;
  for (const pddl::TypeDecl& t : domain.types) parent[t.name] = t.parent;
  auto is_subtype = [&](Symbol sub, const Symbol& super) {
    while (true) {
      if (sub == super) return true;
      if (sub == Symbol("object")) return false;
      auto it = parent.find(sub);
      if (it == parent.end()) return false;
      sub = it->second;
    }
  };

  std::map<Symbol, std::vector<Symbol>> pool_by_type;
  auto pool = [&](const Symbol& type) -> const std::vector<Symbol>& {
    auto it = pool_by_type.find(type);
    if (it != pool_by_type.end()) return it->second;
    std::vector<Symbol> objs;
    for (const auto& [obj, obj_type] : problem.objects)
      if (is_subtype(obj_type, type)) objs.push_back(obj);
    return pool_by_type.emplace(type, std::move(objs)).first->second;
  };

  std::set<Symbol> fluent;
  for (const pddl::ActionSchema& a : domain.actions)
    for (const pddl::Literal& l : a.effects) fluent.insert(l.atom.predicate);
  std::set<Fact> init(problem.init.begin(), problem.init.end());

  std::vector<GroundAction> out;
  for (const pddl::ActionSchema& schema : domain.actions) {
    std::vector<const std::vector<Symbol>*> pools;
    bool dead = false;
    for (const pddl::Param& p : schema.params) {
      pools.push_back(&pool(p.type));
      dead = dead || pools.back()->empty();
    }
    if (dead) continue;

    std::vector<size_t> idx(pools.size(), 0);
    while (true) {
      std::map<std::string, Symbol> env;
      GroundAction ga;
      ga.schema = schema.name;
      for (size_t i = 0; i < idx.size(); ++i) {
        const Symbol& obj = (*pools[i])[idx[i]];
        env[schema.params[i].var] = obj;
        ga.binding.push_back(obj);
      }
      for (const pddl::Literal& l : schema.precondition)
        (l.positive ? ga.pre_pos : ga.pre_neg).push_back(substitute(l.atom, env));
      for (const pddl::Literal& l : schema.effects)
        (l.positive ? ga.add : ga.del).push_back(substitute(l.atom, env));
      sort_unique(ga.pre_pos);
      sort_unique(ga.pre_neg);
      sort_unique(ga.add);
      sort_unique(ga.del);

      bool keep = sorted_disjoint(ga.add, ga.del);
      if (keep) {
        for (const Fact& f : ga.pre_pos) {
          if (!fluent.count(f.predicate) && !init.count(f)) {
            keep = false;
            break;
          }
        }
      }
      if (keep) out.push_back(std::move(ga));

      size_t pos = idx.size();
      while (pos > 0 && ++idx[pos - 1] == pools[pos - 1]->size()) idx[--pos] = 0;
      if (pos == 0) break;
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::optional<PlanResult> plan(const std::vector<Fact>& init,
                               const std::vector<pddl::GroundLiteral>& goal,
                               const std::vector<GroundAction>& actions, const PlanLimits& limits,
                               SearchMode mode) {
  const auto start = Clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(Clock::now() - start).count(); };
  auto finish = [&](std::vector<GroundAction> steps, uint64_t expanded) {
    return PlanResult{std::move(steps), {expanded, elapsed()}};
  };

  // Fact universe: anything outside init and the add lists can never hold.
  std::map<Fact, uint32_t> id_of;
  auto intern = [&](const Fact& f) {
    return id_of.emplace(f, static_cast<uint32_t>(id_of.size())).first->second;
  };
  for (const Fact& f : init) intern(f);
  for (const GroundAction& a : actions)
    for (const Fact& f : a.add) intern(f);
  auto known = [&](const Fact& f) -> std::optional<uint32_t> {
    auto it = id_of.find(f);
    if (it == id_of.end()) return std::nullopt;
    return it->second;
  };

  // Deterministic expansion order regardless of caller ordering.
  std::vector<uint32_t> order(actions.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](uint32_t a, uint32_t b) {
    return std::tie(actions[a].schema, actions[a].binding) <
           std::tie(actions[b].schema, actions[b].binding);
  });

  struct Act {
    uint32_t source;  // index into the caller's vector
    std::vector<uint32_t> pre_pos, pre_neg, add, del;
  };
  std::vector<Act> acts;
  for (uint32_t i : order) {
    const GroundAction& ga = actions[i];
    Act a;
    a.source = i;
    bool feasible = true;
    for (const Fact& f : ga.pre_pos) {
      auto id = known(f);
      if (!id) {
        feasible = false;
        break;
      }
      a.pre_pos.push_back(*id);
    }
    if (!feasible) continue;
    for (const Fact& f : ga.pre_neg)
      if (auto id = known(f)) a.pre_neg.push_back(*id);
    for (const Fact& f : ga.add) a.add.push_back(*known(f));
    for (const Fact& f : ga.del)
      if (auto id = known(f)) a.del.push_back(*id);
    std::sort(a.pre_pos.begin(), a.pre_pos.end());
    std::sort(a.pre_neg.begin(), a.pre_neg.end());
    std::sort(a.add.begin(), a.add.end());
    std::sort(a.del.begin(), a.del.end());
    acts.push_back(std::move(a));
  }

  std::vector<uint32_t> goal_pos, goal_neg;
  for (const pddl::GroundLiteral& l : goal) {
    auto id = known(l.fact);
    if (l.positive) {
      if (!id) return std::nullopt;  // unreachable fact demanded
      goal_pos.push_back(*id);
    } else if (id) {
      goal_neg.push_back(*id);
    }
  }
  std::sort(goal_pos.begin(), goal_pos.end());
  std::sort(goal_neg.begin(), goal_neg.end());
  auto satisfied = [&](const std::vector<uint32_t>& s) {
    return sorted_subset(goal_pos, s) && sorted_disjoint(goal_neg, s);
  };

  std::vector<uint32_t> init_state;
  for (const Fact& f : init) init_state.push_back(*known(f));
  std::sort(init_state.begin(), init_state.end());
  init_state.erase(std::unique(init_state.begin(), init_state.end()), init_state.end());

  if (satisfied(init_state)) return finish({}, 0);

  struct Node {
    std::vector<uint32_t> state;
    uint32_t parent;
    uint32_t via;  // caller's action index
  };
  std::vector<Node> nodes;
  std::unordered_set<std::vector<uint32_t>, StateHash> visited;
  nodes.push_back({init_state, 0, 0});
  visited.insert(init_state);

  auto reconstruct = [&](size_t leaf, uint64_t expanded) {
    std::vector<GroundAction> steps;
    for (size_t n = leaf; n != 0; n = nodes[n].parent) steps.push_back(actions[nodes[n].via]);
    std::reverse(steps.begin(), steps.end());
    return finish(std::move(steps), expanded);
  };

  // frontier: FIFO for breadth-first, (unsatisfied-goal-count, age) heap
  // for greedy
  std::deque<size_t> fifo{0};
  using Ranked = std::pair<size_t, size_t>;  // (h, node)
  std::priority_queue<Ranked, std::vector<Ranked>, std::greater<>> heap;
  auto goal_distance = [&](const std::vector<uint32_t>& s) {
    size_t h = 0;
    for (uint32_t g : goal_pos)
      if (!std::binary_search(s.begin(), s.end(), g)) ++h;
    for (uint32_t g : goal_neg)
      if (std::binary_search(s.begin(), s.end(), g)) ++h;
    return h;
  };
  if (mode == SearchMode::GreedyGoalCount) heap.push({goal_distance(init_state), 0});

  uint64_t expanded = 0;
  std::vector<uint32_t> next;
  while (mode == SearchMode::Breadth ? !fifo.empty() : !heap.empty()) {
    size_t ni;
    if (mode == SearchMode::Breadth) {
      ni = fifo.front();
      fifo.pop_front();
    } else {
      ni = heap.top().second;
      heap.pop();
    }
    if (++expanded > limits.max_nodes) throw ResourceLimitError("nodes");
    if ((expanded & 1023) == 0 && elapsed() > limits.max_seconds)
      throw ResourceLimitError("time");

    const std::vector<uint32_t> state = nodes[ni].state;  // nodes may reallocate
    for (const Act& a : acts) {
      if (!sorted_subset(a.pre_pos, state) || !sorted_disjoint(a.pre_neg, state)) continue;
      next.clear();
      std::set_difference(state.begin(), state.end(), a.del.begin(), a.del.end(),
                          std::back_inserter(next));
      std::vector<uint32_t> merged;
      merged.reserve(next.size() + a.add.size());
      std::set_union(next.begin(), next.end(), a.add.begin(), a.add.end(),
                     std::back_inserter(merged));
      if (!visited.insert(merged).second) continue;
      const bool done = satisfied(merged);
      nodes.push_back({std::move(merged), static_cast<uint32_t>(ni), a.source});
      if (done) return reconstruct(nodes.size() - 1, expanded);
      if (mode == SearchMode::Breadth)
        fifo.push_back(nodes.size() - 1);
      else
        heap.push({goal_distance(nodes.back().state), nodes.size() - 1});
    }
  }
  return std::nullopt;
}

std::optional<Violation> validate(const std::vector<Fact>& init,
                                  const std::vector<GroundAction>& steps,
                                  const std::vector<pddl::GroundLiteral>& goal) {
  std::set<Fact> state(init.begin(), init.end());
  for (size_t i = 0; i < steps.size(); ++i) {
    const GroundAction& a = steps[i];
    for (const Fact& f : a.pre_pos)
      if (!state.count(f))
        return Violation{i, "step " + std::to_string(i) + " " + a.str() +
                                ": missing precondition " + f.str()};
    for (const Fact& f : a.pre_neg)
      if (state.count(f))
        return Violation{i, "step " + std::to_string(i) + " " + a.str() +
                                ": forbidden fact holds " + f.str()};
    for (const Fact& f : a.del) state.erase(f);
    for (const Fact& f : a.add) state.insert(f);
  }
  for (const pddl::GroundLiteral& l : goal) {
    if (l.positive != (state.count(l.fact) > 0))
      return Violation{steps.size(), std::string("goal literal ") + (l.positive ? "" : "(not ") +
                                         l.fact.str() + (l.positive ? "" : ")") +
                                         " unsatisfied in the final state"};
  }
  return std::nullopt;
}

std::string plan_to_string(const std::vector<GroundAction>& steps) {
  std::ostringstream os;
  for (size_t i = 0; i < steps.size(); ++i) os << i << ": " << steps[i].str() << "\n";
  return os.str();
}

}  // namespace maestrob
