#include "mif/reductions.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>

#include "mif/engine.hpp"
#include "mif/randomness.hpp"

namespace mif {

void AvoidInstance::validate() const {
  if (a < 1 || b < 1) throw PreconditionError("avoid: a and b must be at least 1");
  if (a + b > m) throw PreconditionError("avoid: a + b must not exceed m");
  if (!(delta >= 0 && delta <= 1)) throw PreconditionError("avoid: delta must lie in [0,1]");
}

double avoid_lb(const AvoidInstance& inst) {
  inst.validate();
  if (inst.delta >= 1) throw PreconditionError("avoid_lb: undefined for delta = 1");
  return static_cast<double>(inst.a) * static_cast<double>(inst.b) / (static_cast<double>(inst.m) * std::log(2.0)) +
         std::log2(1 - inst.delta);
}

AvoidProtocol::AvoidProtocol(AutomatonPtr a, AvoidInstance inst) : a_(std::move(a)), inst_(inst) {
  inst_.validate();
  if (a_->universe() != inst_.m) throw PreconditionError("avoid: automaton universe must equal m");
}

AvoidRun AvoidProtocol::run(std::vector<Item> alice, std::uint64_t seed) const {
  if (alice.size() != inst_.a) throw PreconditionError("avoid: Alice's set must have size a");
  std::sort(alice.begin(), alice.end());
  if (std::adjacent_find(alice.begin(), alice.end()) != alice.end() || alice.front() < 1 || alice.back() > inst_.m)
    throw PreconditionError("avoid: Alice's set must be distinct items of [m]");

  AvoidRun r;
  r.alice = alice;
  r.message_bits = a_->declared_bits();
  GameSession session(*a_, seed);
  for (Item x : alice) {
    if (session.aborted()) break;
    session.feed(x);
  }
  r.observed_bits = session.state_width();

  // Bob's side: starts from the transmitted state.
  std::set<Item> collected;
  while (!session.aborted()) {
    const Item o = session.current_output().item();
    collected.insert(o);
    r.bob.push_back(o);
    if (r.bob.size() == inst_.b) break;
    session.feed(o);
  }
  r.aborted = session.aborted();
  const bool distinct = collected.size() == inst_.b && r.bob.size() == inst_.b;
  const bool disjoint = std::none_of(r.bob.begin(), r.bob.end(),
                                     [&](Item o) { return std::binary_search(alice.begin(), alice.end(), o); });
  r.success = !r.aborted && distinct && disjoint;
  return r;
}

AvoidProtocol avoid_from_mif(AutomatonPtr a, const AvoidInstance& inst) { return AvoidProtocol(std::move(a), inst); }

namespace {

void tally(AvoidSummary& s, AvoidRun r) {
  ++s.runs;
  if (!r.success) ++s.failures;
  s.message_bits = r.message_bits;
  s.max_observed_bits = std::max(s.max_observed_bits, r.observed_bits);
  s.details.push_back(std::move(r));
}

double binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  double r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return r;
}

// Visits sorted k-subsets of `pool` in lexicographic order.
template <class F>
void for_each_subset(const std::vector<Item>& pool, std::size_t k, F&& f) {
  if (k > pool.size()) return;
  std::vector<std::size_t> idx(k);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::vector<Item> pick(k);
  for (;;) {
    for (std::size_t i = 0; i < k; ++i) pick[i] = pool[idx[i]];
    f(pick);
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == pool.size() - k + (i - 1)) --i;
    if (i == 0) return;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

}  // namespace

AvoidSummary avoid_exhaustive(const AvoidProtocol& p, std::uint64_t seed, std::uint64_t max_sets) {
  const auto& inst = p.instance();
  if (binomial(inst.m, inst.a) > static_cast<double>(max_sets))
    throw BudgetExceeded("avoid: too many sets for exhaustive mode");
  std::vector<Item> universe(inst.m);
  std::iota(universe.begin(), universe.end(), Item{1});
  AvoidSummary s;
  std::uint64_t index = 0;
  for_each_subset(universe, inst.a, [&](const std::vector<Item>& alice) {
    tally(s, p.run(alice, derive_seed(seed, {index++})));
  });
  s.failure_rate = s.runs ? static_cast<double>(s.failures) / static_cast<double>(s.runs) : 0;
  return s;
}

AvoidSummary avoid_sampled(const AvoidProtocol& p, std::size_t trials, std::uint64_t seed) {
  const auto& inst = p.instance();
  AvoidSummary s;
  for (std::size_t i = 0; i < trials; ++i) {
    Rng rng(derive_seed(seed, {i, 0}));
    auto alice = sample_without_repetition(
        inst.m, inst.a, [&](std::uint64_t k) { return std::uniform_int_distribution<std::uint64_t>(0, k - 1)(rng); });
    tally(s, p.run(std::move(alice), derive_seed(seed, {i, 1})));
  }
  s.failure_rate = s.runs ? static_cast<double>(s.failures) / static_cast<double>(s.runs) : 0;
  return s;
}

namespace {
std::string joined(const std::vector<Item>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + std::to_string(v[i]);
  return s;
}
}  // namespace

void write_avoid_csv(std::ostream& out, const AvoidSummary& s) {
  out << "run,alice,bob,message_bits,observed_bits,aborted,success\n";
  for (std::size_t i = 0; i < s.details.size(); ++i) {
    const auto& r = s.details[i];
    out << i << ',' << joined(r.alice) << ',' << joined(r.bob) << ',' << r.message_bits << ',' << r.observed_bits
        << ',' << (r.aborted ? 1 : 0) << ',' << (r.success ? 1 : 0) << '\n';
  }
}

// ---- FindCommonOutputs -----------------------------------------------------

std::size_t FcoParams::prefix_length(std::size_t k) const {
  std::size_t total = 0;
  for (std::size_t j = k + 1; j <= d; ++j) total += t_k(j);
  return total;
}

namespace {

void fill_derived(FcoParams& p) {
  p.w.resize(p.d);
  for (std::size_t k = 1; k <= p.d; ++k) p.w[k - 1] = (std::size_t{1} << (k - 1)) * (p.t[0] + 1);
  p.eps_k.resize(p.d);
  const double base = 64.0 * static_cast<double>(p.S.size());
  for (std::size_t k = 1; k <= p.d; ++k)
    p.eps_k[k - 1] = static_cast<double>(p.w[k - 1]) * std::pow(base, static_cast<double>(k - 1)) * p.eps;
}

}  // namespace

FcoParams FcoParams::custom(Item n, std::vector<std::size_t> t, std::vector<Item> S) {
  if (t.empty()) throw PreconditionError("fco: need at least one level");
  if (std::any_of(t.begin(), t.end(), [](std::size_t v) { return v == 0; }))
    throw PreconditionError("fco: interval lengths must be positive");
  std::sort(S.begin(), S.end());
  S.erase(std::unique(S.begin(), S.end()), S.end());
  if (S.empty() || S.front() < 1 || S.back() > n) throw PreconditionError("fco: S must be a non-empty subset of [n]");
  FcoParams p;
  p.n = n;
  p.ell = std::accumulate(t.begin(), t.end(), std::size_t{0});
  p.d = t.size();
  p.p = 1;
  p.z = 1;
  p.t = std::move(t);
  p.S = std::move(S);
  fill_derived(p);
  return p;
}

FcoParams fco_params(Item n, std::size_t ell, std::size_t z, double delta, std::size_t s_size) {
  if (z < 1) throw PreconditionError("fco_params: z must be at least 1");
  if (!(delta >= 0 && delta <= 1.0 / 3)) throw PreconditionError("fco_params: need 0 <= delta <= 1/3");
  if (ell < 1 || ell > n) throw PreconditionError("fco_params: need 1 <= ell <= n");
  if (s_size < 1 || s_size > n) throw PreconditionError("fco_params: need 1 <= |S| <= n");
  FcoParams p;
  p.n = n;
  p.ell = ell;
  p.z = z;
  p.delta = delta;
  const double log_s = std::log2(64.0 * static_cast<double>(s_size));
  const double log_inv = std::log2(1.0 / (2 * delta));  // +inf at delta = 0
  const double first = std::sqrt(10.0 * static_cast<double>(ell) * log_s / (3.0 * static_cast<double>(z) * log_inv));
  const double second = 30.0 * log_s / log_inv;
  p.p = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(std::max(first, second))));
  p.d = 1 + ell / (18 * z * p.p);
  const auto tk = static_cast<std::size_t>(std::ceil(4 * std::log(2.0) * static_cast<double>(z * p.p + 2)));
  p.t.assign(p.d, tk);
  const std::size_t upper = (p.d - 1) * tk;
  if (upper > ell) throw PreconditionError("fco_params: intervals exceed ell");
  p.t[0] = ell - upper;
  if (2 * p.t[0] < ell) throw PreconditionError("fco_params: t_1 < ell/2; z is outside the supported range");
  if (p.d >= 2 && tk > 9 * z * p.p) throw PreconditionError("fco_params: t_k exceeds 9zp");
  p.eps = std::pow(2 * delta, static_cast<double>(p.p) / 30.0);
  p.S.resize(s_size);
  std::iota(p.S.begin(), p.S.end(), Item{1});
  fill_derived(p);
  return p;
}

std::string FcoParams::to_text() const {
  std::ostringstream out;
  auto list = [&](const auto& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
    return s;
  };
  out << "n=" << n << "\nell=" << ell << "\nz=" << z << "\ndelta=" << delta << "\np=" << p << "\nd=" << d
      << "\nt=" << list(t) << "\nw=" << list(w) << "\neps=" << eps << "\neps_k=";
  for (std::size_t i = 0; i < eps_k.size(); ++i) out << (i ? "," : "") << eps_k[i];
  out << "\nS_size=" << S.size() << '\n';
  return out.str();
}

OutputFunction canonical_min_missing(Item n, std::size_t ell) {
  return OutputFunction("min-missing", true, [n, ell](std::span<const Item> s) -> Item {
    if (s.size() > ell) throw PreconditionError("min-missing: stream longer than ell");
    std::vector<bool> seen(n + 2, false);
    for (Item x : s)
      if (x >= 1 && x <= n) seen[x] = true;
    for (Item v = 1; v <= n; ++v)
      if (!seen[v]) return v;
    return n;
  });
}

OutputFunction noisy(OutputFunction base, double eps, std::uint64_t seed, Item n) {
  if (!(eps >= 0 && eps <= 1)) throw PreconditionError("noisy: eps must lie in [0,1]");
  if (eps == 0) return base;
  return OutputFunction("noisy(" + base.name() + ")", false, [base, eps, seed, n](std::span<const Item> s) -> Item {
    const Item clean = base(s);
    std::uint64_t key = seed;
    for (Item x : s) key = derive_seed(key, {x});
    Rng rng(derive_seed(key, {s.size()}));
    if (n < 2 || !std::bernoulli_distribution(eps)(rng)) return clean;
    const Item other = std::uniform_int_distribution<Item>(1, n - 1)(rng);
    return other >= clean ? other + 1 : other;
  });
}

ThresholdMatrix ThresholdMatrix::constant(double c) {
  if (!(c >= 1 && c < 2)) throw PreconditionError("thresholds must lie in [1,2)");
  ThresholdMatrix m(0);
  m.fixed_ = c;
  return m;
}

double ThresholdMatrix::at(std::size_t k, std::size_t h) const {
  if (fixed_ >= 1) return fixed_;
  Rng rng(derive_seed(seed_, {k, h}));
  return 1.0 + std::generate_canonical<double, 53>(rng);
}

namespace {

class FcoRun {
 public:
  FcoRun(const OutputFunction& B, const ThresholdMatrix& C, const FcoParams& prm, std::size_t max_calls,
         FcoResult& out)
      : B_(B), C_(C), prm_(prm), max_calls_(max_calls), out_(out) {}

  std::vector<Item> call(const std::vector<Item>& x, std::size_t k, bool& failed) {
    if (++out_.calls > max_calls_) throw BudgetExceeded("fco: call budget exceeded");
    return k == 1 ? base(x, failed) : step(x, k, failed);
  }

 private:
  std::vector<Item> fallback(std::size_t k) const {
    const std::size_t wk = prm_.w_k(k);
    if (prm_.S.size() < wk) throw PreconditionError("fco: |S| is smaller than w_k");
    return {prm_.S.begin(), prm_.S.begin() + static_cast<std::ptrdiff_t>(wk)};
  }

  std::vector<Item> base(const std::vector<Item>& x, bool& failed) {
    const std::size_t t1 = prm_.t_k(1);
    std::vector<Item> stream = x;
    stream.resize(x.size() + t1, 1);
    std::vector<Item> e;
    e.push_back(B_(stream));
    for (std::size_t i = 1; i <= t1; ++i) {
      stream[x.size() + i - 1] = e.back();
      e.push_back(B_(stream));
    }
    std::vector<Item> sorted = e;
    std::sort(sorted.begin(), sorted.end());
    failed = std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end();
    out_.trace.push_back({1, x.size(), 0, e.size(), 0, failed ? "base-failure" : "base"});
    if (failed) {
      out_.any_failed = true;
      return fallback(1);
    }
    return sorted;
  }

  std::vector<Item> step(const std::vector<Item>& x, std::size_t k, bool& failed) {
    const std::size_t tk = prm_.t_k(k);
    if (tk > prm_.n) throw PreconditionError("fco: t_k exceeds n");
    std::map<std::vector<Item>, std::vector<Item>> memo;
    auto T = [&](const std::vector<Item>& y) -> const std::vector<Item>& {
      auto it = memo.find(y);
      if (it != memo.end()) return it->second;
      std::vector<Item> longer = x;
      longer.insert(longer.end(), y.begin(), y.end());
      bool sub_failed = false;
      return memo.emplace(y, call(longer, k - 1, sub_failed)).first->second;
    };

    std::vector<Item> first(tk);
    std::iota(first.begin(), first.end(), Item{1});
    std::set<Item> q(T(first).begin(), T(first).end());
    const double size_s = static_cast<double>(prm_.S.size());
    for (std::size_t h = 1; h <= 4; ++h) {
      std::map<Item, std::size_t> f;
      const std::vector<Item> pool(q.begin(), q.end());
      for_each_subset(pool, tk, [&](const std::vector<Item>& y) {
        for (Item j : T(y)) ++f[j];
      });
      const double theta = C_.at(k, h) * static_cast<double>(prm_.w_k(k - 1)) / (16.0 * size_s);
      const double cut = theta * binomial(pool.size(), tk);
      std::size_t added = 0;
      for (Item j : prm_.S) {
        auto it = f.find(j);
        const double count = it == f.end() ? 0.0 : static_cast<double>(it->second);
        if (count >= cut && q.insert(j).second) ++added;
      }
      const bool done = q.size() >= prm_.w_k(k);
      out_.trace.push_back({k, x.size(), h, q.size(), added, done ? "good" : "continue"});
      if (done) {
        failed = false;
        return {q.begin(), std::next(q.begin(), static_cast<std::ptrdiff_t>(prm_.w_k(k)))};
      }
    }
    failed = true;
    out_.any_failed = true;
    out_.trace.push_back({k, x.size(), 0, q.size(), 0, "step-failure"});
    return fallback(k);
  }

  const OutputFunction& B_;
  const ThresholdMatrix& C_;
  const FcoParams& prm_;
  std::size_t max_calls_;
  FcoResult& out_;
};

}  // namespace

FcoResult fco(const OutputFunction& B, const ThresholdMatrix& C, const std::vector<Item>& x, std::size_t k,
              const FcoParams& prm, std::size_t max_calls) {
  if (k < 1 || k > prm.d) throw PreconditionError("fco: level out of range");
  if (x.size() != prm.prefix_length(k)) throw PreconditionError("fco: prefix length must be t_d + ... + t_{k+1}");
  FcoResult r;
  FcoRun run(B, C, prm, max_calls, r);
  r.set = run.call(x, k, r.failed);
  return r;
}

void write_fco_csv(std::ostream& out, const FcoResult& r) {
  out << "k,prefix_length,round,q_size,p_size,exit\n";
  for (const auto& s : r.trace)
    out << s.k << ',' << s.prefix_length << ',' << s.round << ',' << s.q_size << ',' << s.p_size << ',' << s.exit
        << '\n';
}

}  // namespace mif
