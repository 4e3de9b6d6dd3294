#include <algorithm>
#include <cmath>

#include "mif/adversaries.hpp"

namespace mif {

namespace {

void normalise(Belief& b, double mass) {
  if (!(mass > 0)) throw PreconditionError("posterior: transcript has probability zero under the model");
  for (double& p : b) p /= mass;
}

double binomial(std::uint64_t n, std::uint64_t k) {
  double r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return r;
}

}  // namespace

Belief posterior_update(const FiniteModel& m, const Transcript& t) {
  Belief b = m.init;
  if (t.initial_output) normalise(b, condition(m, b, *t.initial_output));
  for (const auto& round : t.rounds) {
    b = propagate(m, b, round.input);
    normalise(b, condition(m, b, round.output));
  }
  return b;
}

Belief posterior_update(const Automaton& a, const Transcript& t, std::size_t state_cap) {
  return posterior_update(tabulate(a, state_cap), t);
}

SafeSets compute_safe_sets(const FiniteModel& m, std::size_t q, const SafeSetOptions& opt) {
  if (q < 1 || q > m.n) throw PreconditionError("compute_safe_sets: need 1 <= q <= n");
  const std::size_t states = m.size();
  std::vector<double> reach(states, 0.0);
  std::vector<std::vector<double>> with(states, std::vector<double>(m.n + 1, 0.0));

  auto record = [&](const Belief& b, const std::vector<Item>& prefix, double weight) {
    for (StateId s = 0; s < states; ++s) {
      if (b[s] <= 0) continue;
      const double p = b[s] * weight;
      reach[s] += p;
      for (Item x : prefix) with[s][x] += p;
    }
  };

  if (opt.exact) {
    const double count = binomial(m.n, q);
    if (count > static_cast<double>(opt.max_prefixes))
      throw BudgetExceeded("compute_safe_sets: too many prefixes for exact enumeration");
    // Depth-first over increasing prefixes, sharing propagation work.
    std::vector<Item> prefix;
    std::vector<Belief> stack{m.init};
    auto walk = [&](auto&& self, Item from) -> void {
      if (prefix.size() == q) {
        record(stack.back(), prefix, 1.0 / count);
        return;
      }
      for (Item x = from; x + (q - prefix.size()) <= m.n + 1; ++x) {
        prefix.push_back(x);
        stack.push_back(propagate(m, stack.back(), x));
        self(self, x + 1);
        stack.pop_back();
        prefix.pop_back();
      }
    };
    walk(walk, 1);
  } else {
    if (opt.samples == 0) throw PreconditionError("compute_safe_sets: sampling needs a positive sample count");
    Rng rng(opt.seed);
    for (std::size_t i = 0; i < opt.samples; ++i) {
      auto prefix = sample_without_repetition(
          m.n, q, [&](std::uint64_t k) { return std::uniform_int_distribution<std::uint64_t>(0, k - 1)(rng); });
      std::sort(prefix.begin(), prefix.end());
      Belief b = m.init;
      for (Item x : prefix) b = propagate(m, b, x);
      record(b, prefix, 1.0 / static_cast<double>(opt.samples));
    }
  }

  const double threshold = static_cast<double>(q) / (4.0 * static_cast<double>(m.n));
  SafeSets h(states, std::vector<bool>(m.n + 1, false));
  for (StateId s = 0; s < states; ++s) {
    if (reach[s] <= 0) continue;
    for (Item i = 1; i <= m.n; ++i) h[s][i] = with[s][i] <= threshold * reach[s] * (1 + 1e-12);
  }
  return h;
}

}  // namespace mif
