#include <algorithm>
#include <utility>

#include "mif/algorithms.hpp"

namespace mif {

namespace {

struct Boxes {
  std::vector<StateBox> parts;
  void encode(BitSink& out) const {
    for (const auto& p : parts) p->encode(out);
  }
};

constexpr std::uint64_t kCopyConsumer = 1ULL << 40;

const Oracle& copy_oracle(Randomness& r, std::size_t i) {
  const Oracle& parent = r.oracle();
  return parent.memo<Oracle>(kCopyConsumer + i, [&] { return parent.sub(i); });
}

class Majority final : public AutomatonImpl<Majority, Boxes> {
 private:
  template <class F>
  auto with_copy(Randomness& r, std::size_t i, F&& f) const {
    if (inner_->mode() == RandomnessMode::RandomOracle) {
      OracleRandomness h(copy_oracle(r, i));
      return f(h);
    }
    return f(r);
  }

 public:
  Majority(AutomatonPtr inner, std::size_t copies) : inner_(std::move(inner)), copies_(copies) {}
  std::string name() const override { return "majority(" + inner_->name() + ")"; }
  RandomnessMode mode() const override { return inner_->mode(); }
  Item universe() const override { return inner_->universe(); }
  std::size_t declared_bits() const override { return copies_ * inner_->declared_bits(); }

  Boxes make_initial(Randomness& r) const {
    Boxes s;
    for (std::size_t i = 0; i < copies_; ++i)
      s.parts.push_back(with_copy(r, i, [&](Randomness& h) { return inner_->initial(h); }));
    return s;
  }
  void step(Boxes& s, Item input, Randomness& r) const {
    for (std::size_t i = 0; i < copies_; ++i)
      with_copy(r, i, [&](Randomness& h) {
        inner_->transition(*s.parts[i], input, h);
        return 0;
      });
  }
  Output emit(const Boxes& s, Randomness& r) const {
    std::vector<std::pair<Output, std::size_t>> tally;
    for (std::size_t i = 0; i < copies_; ++i) {
      const Output o = with_copy(r, i, [&](Randomness& h) { return inner_->output(*s.parts[i], h); });
      auto it = std::find_if(tally.begin(), tally.end(), [&](const auto& e) { return e.first == o; });
      if (it == tally.end())
        tally.emplace_back(o, 1);
      else
        ++it->second;
    }
    auto best = tally.front();
    for (const auto& e : tally)
      if (e.second > best.second || (e.second == best.second && e.first < best.first)) best = e;
    return best.first;
  }

 private:
  AutomatonPtr inner_;
  std::size_t copies_;
};

int power(RandomnessMode m) {
  switch (m) {
    case RandomnessMode::Deterministic: return 0;
    case RandomnessMode::RandomSeed: return 1;
    case RandomnessMode::RandomTape: return 2;
    case RandomnessMode::RandomOracle: return 3;
  }
  return 0;
}

constexpr std::uint64_t kInitConsumer = 1ULL << 41;
constexpr std::uint64_t kStepConsumer = 1ULL << 42;

class ModeOverride final : public AutomatonImpl<ModeOverride, Boxes> {
 public:
  ModeOverride(AutomatonPtr inner, RandomnessMode mode) : inner_(std::move(inner)), mode_(mode) {}
  std::string name() const override { return inner_->name(); }
  RandomnessMode mode() const override { return mode_; }
  Item universe() const override { return inner_->universe(); }
  std::size_t declared_bits() const override { return inner_->declared_bits(); }

  Boxes make_initial(Randomness& r) const {
    Boxes s;
    if (inner_->mode() == RandomnessMode::Deterministic) {
      NoRandomness none("deterministic init");
      s.parts.push_back(inner_->initial(none));
    } else if (mode_ == RandomnessMode::RandomOracle) {
      Rng g = r.oracle().stream(kInitConsumer);
      StreamRandomness h(g);
      s.parts.push_back(inner_->initial(h));
    } else {
      s.parts.push_back(inner_->initial(r));
    }
    return s;
  }
  void step(Boxes& s, Item input, Randomness& r) const {
    if (inner_->mode() == mode_) {
      inner_->transition(*s.parts[0], input, r);
      return;
    }
    NoRandomness none("transition of a lower-mode automaton");
    inner_->transition(*s.parts[0], input, none);
  }
  Output emit(const Boxes& s, Randomness& r) const {
    if (inner_->mode() == mode_) return inner_->output(*s.parts[0], r);
    NoRandomness none("output of a lower-mode automaton");
    return inner_->output(*s.parts[0], none);
  }

 private:
  AutomatonPtr inner_;
  RandomnessMode mode_;
};

struct Counted {
  StateBox inner;
  std::uint64_t counter = 0;
  unsigned counter_bits = 0;
  void encode(BitSink& out) const {
    inner->encode(out);
    out.put(counter, counter_bits);
  }
};

class TapeAsOracle final : public AutomatonImpl<TapeAsOracle, Counted> {
 public:
  TapeAsOracle(AutomatonPtr inner, std::size_t ell) : inner_(std::move(inner)), ell_(ell) {}
  std::string name() const override { return "oracle(" + inner_->name() + ")"; }
  RandomnessMode mode() const override { return RandomnessMode::RandomOracle; }
  Item universe() const override { return inner_->universe(); }
  std::size_t declared_bits() const override { return inner_->declared_bits() + bits_for(ell_); }

  Counted make_initial(Randomness& r) const {
    Rng g = r.oracle().stream(kInitConsumer);
    StreamRandomness h(g);
    return {inner_->initial(h), 0, bits_for(ell_)};
  }
  void step(Counted& s, Item input, Randomness& r) const {
    Rng g = r.oracle().stream(kStepConsumer + s.counter);
    StreamRandomness h(g);
    inner_->transition(*s.inner, input, h);
    s.counter = (s.counter + 1) % ell_;
  }
  Output emit(const Counted& s, Randomness&) const {
    NoRandomness none("tape output");
    return inner_->output(*s.inner, none);
  }

 private:
  AutomatonPtr inner_;
  std::size_t ell_;
};

struct Flagged {
  StateBox inner;
  bool corrupt = false;
  void encode(BitSink& out) const {
    inner->encode(out);
    out.put_bit(corrupt);
  }
};

class CorruptOutputs final : public AutomatonImpl<CorruptOutputs, Flagged> {
 public:
  CorruptOutputs(AutomatonPtr inner, double rate) : inner_(std::move(inner)), rate_(rate) {}
  std::string name() const override { return "corrupt(" + inner_->name() + ")"; }
  RandomnessMode mode() const override { return RandomnessMode::RandomTape; }
  Item universe() const override { return inner_->universe(); }
  std::size_t declared_bits() const override { return inner_->declared_bits() + 1; }

  Flagged make_initial(Randomness& r) const {
    if (inner_->mode() == RandomnessMode::Deterministic) {
      NoRandomness none("deterministic init");
      return {inner_->initial(none), false};
    }
    return {inner_->initial(r), false};
  }
  void step(Flagged& s, Item input, Randomness& r) const {
    if (inner_->mode() == RandomnessMode::RandomTape) {
      inner_->transition(*s.inner, input, r);
    } else {
      NoRandomness none("deterministic transition");
      inner_->transition(*s.inner, input, none);
    }
    s.corrupt = r.bernoulli(rate_);
  }
  Output emit(const Flagged& s, Randomness& r) const {
    const Output o = inner_->output(*s.inner, r);
    if (!s.corrupt || o.is_abort()) return o;
    return Output::of(o.item() % universe() + 1);
  }

 private:
  AutomatonPtr inner_;
  double rate_;
};

}  // namespace

AutomatonPtr majority_amplify(AutomatonPtr a, std::size_t copies) {
  if (copies < 1 || copies % 2 == 0) throw PreconditionError("majority_amplify: copies must be odd");
  return std::make_shared<Majority>(std::move(a), copies);
}

AutomatonPtr with_mode(AutomatonPtr a, RandomnessMode mode) {
  if (power(mode) < power(a->mode()))
    throw PreconditionError("with_mode: cannot move to a weaker randomness mode");
  if (a->mode() == RandomnessMode::RandomTape && mode == RandomnessMode::RandomOracle)
    throw PreconditionError("with_mode: use tape_as_oracle for tape automata");
  if (a->mode() == mode) return a;
  return std::make_shared<ModeOverride>(std::move(a), mode);
}

AutomatonPtr tape_as_oracle(AutomatonPtr a, std::size_t ell) {
  if (a->mode() != RandomnessMode::RandomTape) throw PreconditionError("tape_as_oracle: needs a tape automaton");
  if (ell < 1) throw PreconditionError("tape_as_oracle: ell must be positive");
  return std::make_shared<TapeAsOracle>(std::move(a), ell);
}

AutomatonPtr corrupt_outputs(AutomatonPtr a, double rate) {
  if (!(rate >= 0 && rate <= 1)) throw PreconditionError("corrupt_outputs: rate must lie in [0,1]");
  if (a->mode() != RandomnessMode::Deterministic && a->mode() != RandomnessMode::RandomTape)
    throw PreconditionError("corrupt_outputs: needs a deterministic or tape automaton");
  return std::make_shared<CorruptOutputs>(std::move(a), rate);
}

}  // namespace mif
