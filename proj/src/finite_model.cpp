#include "mif/finite_model.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <unordered_map>

namespace mif {

void FiniteModel::validate() const {
  const std::size_t s = size();
  if (s == 0) throw PreconditionError("model: no states");
  if (init.size() != s || kernel.size() != s * n) throw PreconditionError("model: table sizes disagree");
  auto check = [](double total) {
    if (std::fabs(total - 1.0) > 1e-9) throw PreconditionError("model: probabilities must sum to 1");
  };
  double total = 0;
  for (double p : init) {
    if (p < 0) throw PreconditionError("model: negative probability");
    total += p;
  }
  check(total);
  const bool fixed = mode == RandomnessMode::Deterministic || mode == RandomnessMode::RandomSeed;
  if (mode == RandomnessMode::Deterministic &&
      std::count_if(init.begin(), init.end(), [](double p) { return p > 0; }) != 1)
    throw PreconditionError("model: deterministic init must be a single state");
  for (const auto& row : kernel) {
    total = 0;
    for (const auto& t : row) {
      if (t.next >= s || t.prob < 0) throw PreconditionError("model: bad transition");
      total += t.prob;
    }
    check(total);
    if (fixed && row.size() != 1) throw PreconditionError("model: transitions of this mode must be deterministic");
  }
  for (auto o : outputs)
    if (!o.is_abort() && (o.item() < 1 || o.item() > n)) throw PreconditionError("model: output outside [n]");
}

namespace {

// Replays a computation once per combination of random choices.
class BranchEnumerator final : public Randomness {
 public:
  void begin() {
    pos_ = 0;
    prob_ = 1;
  }
  double prob() const { return prob_; }

  // Moves to the next combination; false when all were visited.
  bool advance() {
    path_.resize(pos_);
    weights_.resize(pos_);
    while (!path_.empty()) {
      const auto& w = weights_.back();
      std::size_t c = path_.back() + 1;
      while (c < w.size() && w[c] <= 0) ++c;
      if (c < w.size()) {
        path_.back() = c;
        return true;
      }
      path_.pop_back();
      weights_.pop_back();
    }
    return false;
  }

  std::uint64_t uniform(std::uint64_t k) override {
    if (k == 0) throw PreconditionError("uniform(0)");
    if (k > (1u << 20)) throw BudgetExceeded("tabulate: draw too wide to enumerate");
    return choose(std::vector<double>(k, 1.0 / static_cast<double>(k)));
  }
  bool bernoulli(double p) override { return choose({1 - p, p}) == 1; }
  std::size_t categorical(std::span<const double> weights) override {
    double total = 0;
    for (double w : weights) total += w;
    std::vector<double> probs;
    for (double w : weights) probs.push_back(w / total);
    return choose(std::move(probs));
  }
  const Oracle& oracle() override { throw PreconditionError("tabulate: oracle automata are not enumerable"); }

 private:
  std::size_t choose(std::vector<double> probs) {
    if (pos_ == path_.size()) {
      std::size_t c = 0;
      while (c < probs.size() && probs[c] <= 0) ++c;
      path_.push_back(c);
      weights_.push_back(probs);
    } else {
      weights_[pos_] = probs;
    }
    const std::size_t c = path_[pos_++];
    prob_ *= probs[c];
    return c;
  }

  std::vector<std::size_t> path_;
  std::vector<std::vector<double>> weights_;
  std::size_t pos_ = 0;
  double prob_ = 1;
};

std::string key_of(const AutomatonState& s) {
  BitSink sink(BitSink::Mode::Store);
  s.encode(sink);
  return sink.key();
}

}  // namespace

FiniteModel tabulate(const Automaton& a, std::size_t state_cap) {
  if (a.mode() == RandomnessMode::RandomOracle)
    throw PreconditionError("tabulate: oracle automata are not enumerable");
  FiniteModel m;
  m.n = a.universe();
  m.mode = a.mode();
  m.name = a.name();

  std::unordered_map<std::string, StateId> index;
  std::vector<StateBox> states;
  NoRandomness none("tabulated output");
  auto intern = [&](StateBox s) {
    const std::string key = key_of(*s);
    auto it = index.find(key);
    if (it != index.end()) return it->second;
    if (states.size() >= state_cap) throw BudgetExceeded("tabulate: state cap exceeded");
    const auto id = static_cast<StateId>(states.size());
    index.emplace(key, id);
    m.outputs.push_back(a.output(*s, none));
    states.push_back(std::move(s));
    return id;
  };

  std::map<StateId, double> init;
  BranchEnumerator en;
  NoRandomness fixed_init("deterministic init");
  do {
    en.begin();
    Randomness& r = a.mode() == RandomnessMode::Deterministic ? static_cast<Randomness&>(fixed_init) : en;
    StateBox s = a.initial(r);
    init[intern(std::move(s))] += en.prob();
  } while (a.mode() != RandomnessMode::Deterministic && en.advance());

  NoRandomness fixed_step("fixed transition");
  for (StateId id = 0; id < states.size(); ++id) {
    for (Item e = 1; e <= m.n; ++e) {
      std::map<StateId, double> row;
      if (m.outputs[id].is_abort()) {
        row[id] = 1;
      } else {
        BranchEnumerator step;
        do {
          step.begin();
          StateBox s = states[id];
          Randomness& r = a.mode() == RandomnessMode::RandomTape ? static_cast<Randomness&>(step) : fixed_step;
          a.transition(*s, e, r);
          row[intern(std::move(s))] += step.prob();
        } while (a.mode() == RandomnessMode::RandomTape && step.advance());
      }
      std::vector<Transition> out;
      for (auto [next, p] : row) out.push_back({next, p});
      m.kernel.resize(std::max(m.kernel.size(), (static_cast<std::size_t>(id) + 1) * m.n));
      m.kernel[static_cast<std::size_t>(id) * m.n + (e - 1)] = std::move(out);
    }
  }
  m.init.assign(states.size(), 0);
  for (auto [id, p] : init) m.init[id] = p;
  m.kernel.resize(states.size() * m.n);
  return m;
}

namespace {

struct TableState {
  StateId id = 0;
  unsigned width = 0;
  void encode(BitSink& out) const { out.put(id, width); }
};

class Tabular final : public AutomatonImpl<Tabular, TableState> {
 public:
  explicit Tabular(FiniteModel m) : m_(std::move(m)), width_(bits_for(m_.size())) {
    m_.validate();
    for (StateId s = 0; s < m_.init.size(); ++s)
      if (m_.init[s] > 0) support_.push_back(s);
  }
  std::string name() const override { return m_.name.empty() ? "tabular" : m_.name; }
  RandomnessMode mode() const override { return m_.mode; }
  Item universe() const override { return m_.n; }
  std::size_t declared_bits() const override { return width_; }

  TableState make_initial(Randomness& r) const {
    if (support_.size() == 1) return {support_[0], width_};
    return {static_cast<StateId>(r.categorical(m_.init)), width_};
  }
  void step(TableState& s, Item input, Randomness& r) const {
    auto row = m_.next(s.id, input);
    if (row.size() == 1) {
      s.id = row[0].next;
      return;
    }
    std::vector<double> w;
    for (const auto& t : row) w.push_back(t.prob);
    s.id = row[r.categorical(w)].next;
  }
  Output emit(const TableState& s, Randomness&) const { return m_.outputs[s.id]; }

 private:
  FiniteModel m_;
  unsigned width_;
  std::vector<StateId> support_;
};

}  // namespace

AutomatonPtr make_tabular(FiniteModel m) { return std::make_shared<Tabular>(std::move(m)); }

FiniteModel uniform_output_model(Item n, std::vector<Output> outputs) {
  if (outputs.empty()) throw PreconditionError("uniform_output_model: needs at least one state");
  FiniteModel m;
  m.n = n;
  m.mode = RandomnessMode::RandomTape;
  m.name = "uniform-output";
  const auto k = static_cast<StateId>(outputs.size());
  m.outputs = std::move(outputs);
  m.init.assign(k, 1.0 / k);
  std::vector<Transition> row;
  for (StateId s = 0; s < k; ++s) row.push_back({s, 1.0 / k});
  m.kernel.assign(static_cast<std::size_t>(k) * n, row);
  m.validate();
  return m;
}

Belief propagate(const FiniteModel& m, const Belief& b, Item input) {
  Belief out(m.size(), 0.0);
  for (StateId s = 0; s < b.size(); ++s) {
    if (b[s] <= 0) continue;
    for (const auto& t : m.next(s, input)) out[t.next] += b[s] * t.prob;
  }
  return out;
}

double condition(const FiniteModel& m, Belief& b, Output o) {
  double kept = 0;
  for (StateId s = 0; s < b.size(); ++s) {
    if (m.outputs[s] != o)
      b[s] = 0;
    else
      kept += b[s];
  }
  return kept;
}

}  // namespace mif
