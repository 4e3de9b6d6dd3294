#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "belief_game.hpp"

namespace mif {

namespace detail {

namespace {
constexpr double kEps = 1e-12;
}

bool better(const Value& a, const Value& b) {
  if (a.primary > b.primary + kEps) return true;
  if (a.primary < b.primary - kEps) return false;
  return a.secondary > b.secondary + kEps;
}

double mass(const Belief& b) { return std::accumulate(b.begin(), b.end(), 0.0); }

std::vector<std::pair<Output, Belief>> split_by_output(const FiniteModel& m, const Belief& b) {
  std::map<Output, Belief> parts;
  for (StateId s = 0; s < b.size(); ++s) {
    if (b[s] <= 0) continue;
    auto [it, fresh] = parts.try_emplace(m.outputs[s]);
    if (fresh) it->second.assign(b.size(), 0.0);
    it->second[s] = b[s];
  }
  return {parts.begin(), parts.end()};
}

void BeliefGame::charge() {
  if (++nodes_ > budget_) throw BudgetExceeded("belief search: node budget exceeded");
}

Value BeliefGame::solve(const Belief& b, std::shared_ptr<const PolicyNode>& policy) {
  History h;
  return decide(b, h, policy);
}

Value BeliefGame::decide(const Belief& b, History& h, std::shared_ptr<const PolicyNode>& policy) {
  Value best;
  bool have = false;
  std::shared_ptr<PolicyNode> chosen;
  for (Item x : obj_.alphabet) {
    charge();
    auto node = std::make_shared<PolicyNode>();
    node->input = x;
    Value v;
    for (auto& [o, part] : split_by_output(m_, propagate(m_, b, x))) {
      const double w = mass(part);
      h.inputs.push_back(x);
      h.outputs.push_back(o);
      auto [reward, stop] = obj_.score(h);
      v += reward.scaled(w);
      if (!stop) {
        if (h.inputs.size() >= obj_.horizon) {
          v += obj_.terminal(h).scaled(w);
        } else {
          std::shared_ptr<const PolicyNode> child;
          v += decide(part, h, child);
          node->next.emplace_back(o, std::move(child));
        }
      }
      h.inputs.pop_back();
      h.outputs.pop_back();
    }
    if (!have || better(v, best)) {
      best = v;
      chosen = std::move(node);
      have = true;
    }
  }
  policy = chosen;
  return best;
}

Value BeliefGame::evaluate(const Belief& b, const std::vector<Item>& inputs) {
  History h;
  return replay(b, h, inputs);
}

Value BeliefGame::replay(const Belief& b, History& h, const std::vector<Item>& inputs) {
  charge();
  const Item x = inputs[h.inputs.size()];
  Value v;
  for (auto& [o, part] : split_by_output(m_, propagate(m_, b, x))) {
    const double w = mass(part);
    h.inputs.push_back(x);
    h.outputs.push_back(o);
    auto [reward, stop] = obj_.score(h);
    v += reward.scaled(w);
    if (!stop) v += h.inputs.size() >= inputs.size() ? obj_.terminal(h).scaled(w) : replay(part, h, inputs);
    h.inputs.pop_back();
    h.outputs.pop_back();
  }
  return v;
}

}  // namespace detail

using detail::History;
using detail::Objective;
using detail::Value;

Item DecisionTree::lookup(std::span<const Output> outputs) const {
  const PolicyNode* node = root_.get();
  for (Output o : outputs) {
    if (!node) return 0;
    auto it = std::find_if(node->next.begin(), node->next.end(), [&](const auto& e) { return e.first == o; });
    node = it != node->next.end() ? it->second.get() : node->otherwise.get();
  }
  return node ? node->input : 0;
}

std::size_t DecisionTree::depth() const {
  auto walk = [](auto&& self, const PolicyNode* node) -> std::size_t {
    if (!node) return 0;
    std::size_t deepest = self(self, node->otherwise.get());
    for (const auto& [o, child] : node->next) deepest = std::max(deepest, self(self, child.get()));
    return deepest + (node->input != 0 ? 1 : 0);
  };
  return walk(walk, root_.get());
}

std::string to_string(SearchMode m) { return m == SearchMode::Exact ? "exact" : "non-adaptive"; }

namespace {

bool repeats(const History& h) {
  const Output o = h.outputs.back();
  return !o.is_abort() && std::find(h.inputs.begin(), h.inputs.end(), o.item()) != h.inputs.end();
}

std::vector<Item> all_items(Item n) {
  std::vector<Item> v(n);
  std::iota(v.begin(), v.end(), Item{1});
  return v;
}

struct Solved {
  Value value;
  std::shared_ptr<const PolicyNode> policy;
  std::size_t nodes = 0;
};

// The root observes the initial output before the first input.
Solved solve_from_start(const FiniteModel& m, const Objective& obj, Value on_initial_abort,
                        std::size_t budget) {
  detail::BeliefGame game(m, obj, budget);
  auto root = std::make_shared<PolicyNode>();
  Solved out;
  for (auto& [o, part] : detail::split_by_output(m, m.init)) {
    const double w = detail::mass(part);
    if (o.is_abort()) {
      out.value += on_initial_abort.scaled(w);
      continue;
    }
    std::shared_ptr<const PolicyNode> child;
    out.value += game.solve(part, child);
    root->next.emplace_back(o, std::move(child));
  }
  out.policy = root;
  out.nodes = game.nodes();
  return out;
}

}  // namespace

MinimaxResult minimax_worst_error(const FiniteModel& m, std::size_t ell, std::size_t budget) {
  m.validate();
  if (ell < 1 || ell > m.n) throw PreconditionError("minimax: need 1 <= ell <= n");
  Objective obj;
  obj.alphabet = all_items(m.n);
  obj.horizon = ell;

  obj.score = [](const History& h) -> std::pair<Value, bool> {
    if (h.outputs.back().is_abort()) return {{0, 1}, true};
    if (repeats(h)) return {{1, 0}, true};
    return {{}, false};
  };
  const Solved mistake = solve_from_start(m, obj, {0, 1}, budget);

  obj.score = [](const History& h) -> std::pair<Value, bool> {
    if (h.outputs.back().is_abort()) return {{1, 0}, true};
    return {{}, false};
  };
  const Solved abort = solve_from_start(m, obj, {1, 0}, budget);

  obj.score = [](const History& h) -> std::pair<Value, bool> {
    if (h.outputs.back().is_abort() || repeats(h)) return {{1, 0}, true};
    return {{}, false};
  };
  const Solved failure = solve_from_start(m, obj, {1, 0}, budget);

  MinimaxResult r;
  r.max_mistake = mistake.value.primary;
  r.induced_abort = mistake.value.secondary;
  r.max_abort = abort.value.primary;
  r.max_failure = failure.value.primary;
  r.policy = DecisionTree(mistake.policy);
  r.depth = r.policy.depth();
  r.nodes = mistake.nodes + abort.nodes + failure.nodes;
  return r;
}

MinimaxResult minimax_worst_error(const Automaton& a, const Instance& inst, std::size_t budget) {
  inst.validate();
  if (a.universe() != inst.n) throw PreconditionError("minimax: automaton universe differs from n");
  return minimax_worst_error(tabulate(a), inst.ell, budget);
}

bool divisive(const std::vector<Output>& y, const std::vector<StateId>& q, const SafeSets& h) {
  if (std::any_of(y.begin(), y.end(), [](Output o) { return o.is_abort(); })) return true;
  std::size_t inside = 0;
  for (StateId s : q) {
    const auto& hs = h[s];
    if (std::all_of(y.begin(), y.end(), [&](Output o) { return o.item() < hs.size() && hs[o.item()]; }))
      ++inside;
  }
  return 2 * inside <= q.size();
}

std::optional<Splitting> find_splitting(const FiniteModel& m, const Belief& posterior,
                                        const std::vector<StateId>& q, const SafeSets& h,
                                        std::size_t t, std::size_t budget) {
  if (t < 1) throw PreconditionError("find_splitting: phase length must be positive");
  Objective obj;
  obj.alphabet = all_items(m.n);
  obj.horizon = t;
  obj.score = [](const History& hist) -> std::pair<Value, bool> {
    if (hist.outputs.back().is_abort()) return {{1, 0}, true};
    return {{}, false};
  };
  obj.terminal = [&](const History& hist) { return Value{divisive(hist.outputs, q, h) ? 1.0 : 0.0, 0}; };

  const double total = detail::mass(posterior);
  if (!(total > 0)) return std::nullopt;
  constexpr double kHalf = 0.5 - 1e-12;

  try {
    detail::BeliefGame game(m, obj, budget);
    std::shared_ptr<const PolicyNode> root;
    const double p = game.solve(posterior, root).primary / total;
    if (p >= kHalf) return Splitting{DecisionTree(root), p, SearchMode::Exact};
    return std::nullopt;
  } catch (const BudgetExceeded&) {
  }

  // Too large for exact search: try fixed sequences, lexicographically, under the same budget.
  detail::BeliefGame game(m, obj, budget);
  std::vector<Item> seq(t, 1);
  try {
    for (;;) {
      const double p = game.evaluate(posterior, seq).primary / total;
      if (p >= kHalf) {
        std::shared_ptr<const PolicyNode> next;
        for (auto it = seq.rbegin(); it != seq.rend(); ++it) {
          auto node = std::make_shared<PolicyNode>();
          node->input = *it;
          node->otherwise = next;
          next = node;
        }
        return Splitting{DecisionTree(next), p, SearchMode::NonAdaptive};
      }
      std::size_t i = t;
      while (i > 0 && seq[i - 1] == m.n) seq[--i] = 1;
      if (i == 0) break;
      ++seq[i - 1];
    }
  } catch (const BudgetExceeded&) {
  }
  return std::nullopt;
}

}  // namespace mif
