#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "mif/adversaries.hpp"
#include "mif/algorithms.hpp"
#include "mif/engine.hpp"

using namespace mif;

namespace {

// Counts inputs in a state whose real width exceeds what it declares.
struct Counter {
  std::uint64_t value = 0;
  void encode(BitSink& out) const { out.put(value, 8); }
};

class Overweight final : public AutomatonImpl<Overweight, Counter> {
 public:
  explicit Overweight(Item n) : n_(n) {}
  std::string name() const override { return "overweight"; }
  RandomnessMode mode() const override { return RandomnessMode::Deterministic; }
  Item universe() const override { return n_; }
  std::size_t declared_bits() const override { return 4; }
  Counter make_initial(Randomness&) const { return {}; }
  void step(Counter& s, Item, Randomness&) const { ++s.value; }
  Output emit(const Counter&, Randomness&) const { return Output::of(n_); }

 private:
  Item n_;
};

// Claims to be deterministic but flips coins on every step.
class SecretCoin final : public AutomatonImpl<SecretCoin, Counter> {
 public:
  SecretCoin(Item n, RandomnessMode m) : n_(n), mode_(m) {}
  std::string name() const override { return "secret_coin"; }
  RandomnessMode mode() const override { return mode_; }
  Item universe() const override { return n_; }
  std::size_t declared_bits() const override { return 8; }
  Counter make_initial(Randomness&) const { return {}; }
  void step(Counter& s, Item, Randomness& r) const { s.value = r.uniform(2); }
  Output emit(const Counter&, Randomness&) const { return Output::of(n_); }

 private:
  Item n_;
  RandomnessMode mode_;
};

class OutOfRange final : public Adversary {
 public:
  std::string kind() const override { return "out_of_range"; }
  Item next_input(const Transcript&, Rng&) override { return 0; }
  std::unique_ptr<Adversary> clone() const override { return std::make_unique<OutOfRange>(); }
};

Transcript make(std::vector<Item> in, std::vector<Item> out) {
  Transcript t;
  for (std::size_t i = 0; i < in.size(); ++i) t.rounds.push_back({in[i], Output::of(out[i])});
  return t;
}

}  // namespace

TEST(RunGame, StoreAllNeverFails) {
  for (Item n : {3, 7, 20})
    for (std::size_t ell = 1; ell < n; ell += 2) {
      const Instance inst{n, ell, 0};
      const auto r = run_game(*store_all_mif(inst), *echo_adversary(), inst, 3);
      EXPECT_EQ(r.result.verdict, Verdict::ok());
      EXPECT_EQ(r.transcript.size(), ell);
    }
}

TEST(RunGame, ConstantOutputMistakesAtOnce) {
  const Instance inst{2, 1, 0};
  const auto r = run_game(*constant_output(2, Output::of(2)), *echo_adversary(), inst, 9);
  EXPECT_EQ(r.result.verdict, Verdict::mistake(1));
}

TEST(RunGame, OracleListSurvivesEcho) {
  const Instance inst{8, 3, 0};
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto r = run_game(*oracle_list_mif(inst), *echo_adversary(), inst, seed);
    EXPECT_EQ(r.result.verdict, Verdict::ok());
  }
}

TEST(RunGame, AbortEndsTheTranscript) {
  const Instance inst{5, 4, 0};
  const auto r = run_game(*constant_output(5, Output::abort()), *echo_adversary(), inst, 1);
  EXPECT_EQ(r.result.verdict.kind, Verdict::Kind::Abort);
  EXPECT_LE(r.transcript.size(), 1u);
}

TEST(RunGame, DeterministicInSeed) {
  const Instance inst{256, 16, 0.1};
  const auto a = seed_block_mif(inst);
  const auto adv = mixed_adversary(256, 0.5);
  for (std::uint64_t seed : {1, 2, 77}) {
    const auto x = run_game(*a, *adv, inst, seed);
    const auto y = run_game(*a, *adv, inst, seed);
    EXPECT_EQ(x.transcript, y.transcript);
    EXPECT_EQ(x.result.verdict, y.result.verdict);
  }
}

TEST(RunGame, SeedModeReplayIsBitIdentical) {
  const Instance inst{64, 8, 0};
  const auto a = seed_block_mif(inst, {4, 8, 16});
  const auto adv = replay_adversary({3, 9, 17, 33, 34, 35, 60, 61});
  const auto x = run_game(*a, *adv, inst, 5);
  const auto y = run_game(*a, *adv, inst, 5);
  std::ostringstream sx, sy;
  write_transcript(sx, x.transcript);
  write_transcript(sy, y.transcript);
  EXPECT_EQ(sx.str(), sy.str());
}

TEST(RunGame, TapeOutputIsPureInState) {
  const Instance inst{4096, 64, 0.1};
  const auto a = rt_mif(rt_params(inst));
  GameSession s(*a, 12);
  for (Item x : {5, 900, 1024, 3}) {
    s.feed(x);
    NoRandomness none("output");
    EXPECT_EQ(a->output(s.state(), none), a->output(s.state(), none));
    EXPECT_EQ(a->output(s.state(), none), s.current_output());
  }
}

TEST(RunGame, SpaceViolationIsHard) {
  const Instance inst{4, 3, 0};
  Overweight a(4);
  EXPECT_THROW(run_game(a, *replay_adversary({1, 2, 3}), inst, 0), SpaceViolation);
}

TEST(RunGame, InputOutsideUniverseIsHard) {
  const Instance inst{4, 2, 0};
  OutOfRange adv;
  EXPECT_THROW(run_game(*det_bitmap_mif(inst), adv, inst, 0), ContractViolation);
}

TEST(RunGame, RandomnessContractsAreEnforced) {
  const Instance inst{4, 2, 0};
  SecretCoin det(4, RandomnessMode::Deterministic);
  SecretCoin seed(4, RandomnessMode::RandomSeed);
  SecretCoin oracle(4, RandomnessMode::RandomOracle);
  SecretCoin tape(4, RandomnessMode::RandomTape);
  EXPECT_THROW(run_game(det, *echo_adversary(), inst, 0), ContractViolation);
  EXPECT_THROW(run_game(seed, *echo_adversary(), inst, 0), ContractViolation);
  EXPECT_THROW(run_game(oracle, *echo_adversary(), inst, 0), ContractViolation);
  EXPECT_NO_THROW(run_game(tape, *echo_adversary(), inst, 0));
}

TEST(RunGame, UniverseMismatchRejected) {
  EXPECT_THROW(run_game(*det_bitmap_mif({5, 2, 0}), *echo_adversary(), Instance{6, 2, 0}, 0), PreconditionError);
}

TEST(Instance, Validation) {
  EXPECT_THROW((Instance{3, 4, 0}.validate()), PreconditionError);
  EXPECT_THROW((Instance{3, 0, 0}.validate()), PreconditionError);
  EXPECT_THROW((Instance{3, 1, 1.5}.validate()), PreconditionError);
  EXPECT_NO_THROW((Instance{3, 3, 1}.validate()));
}

TEST(EstimateError, Examples) {
  const Instance inst{10, 5, 0};
  for (const auto& adv : {echo_adversary(), random_adversary(10), mixed_adversary(10, 0.5)}) {
    const auto e = estimate_error(*det_bitmap_mif(inst), *adv, inst, 100, 4);
    EXPECT_EQ(e.mistake_rate, 0);
    EXPECT_EQ(e.abort_rate, 0);
  }
  const Instance tiny{2, 1, 0};
  const auto e = estimate_error(*constant_output(2, Output::of(1)), *echo_adversary(), tiny, 100, 4);
  EXPECT_EQ(e.mistake_rate, 1.0);
  EXPECT_EQ(e.mistakes, 100u);
}

TEST(EstimateError, ThreadCountDoesNotMatter) {
  const Instance inst{256, 16, 0};
  const auto a = seed_block_mif(inst, {2, 4, 16});
  const auto adv = mixed_adversary(256, 0.5);
  const auto one = estimate_error(*a, *adv, inst, 300, 8, 1);
  const auto four = estimate_error(*a, *adv, inst, 300, 8, 4);
  EXPECT_EQ(one.verdicts, four.verdicts);
  EXPECT_EQ(one.space.max_observed_bits, four.space.max_observed_bits);
  EXPECT_GT(one.aborts, 0u);
}

TEST(EstimateError, RejectsZeroTrials) {
  const Instance inst{4, 2, 0};
  EXPECT_THROW(estimate_error(*det_bitmap_mif(inst), *echo_adversary(), inst, 0, 1), PreconditionError);
}

TEST(Wilson, PublishedIntervals) {
  // 95% Wilson intervals: 0/10 -> [0, 0.2775], 5/10 -> [0.2366, 0.7634], 0/100 -> [0, 0.0370].
  EXPECT_NEAR(wilson_half_width(0, 10), 0.2775 / 2, 1e-4);
  EXPECT_NEAR(wilson_half_width(5, 10), (0.7634 - 0.2366) / 2, 1e-4);
  EXPECT_NEAR(wilson_half_width(0, 100), 0.0370 / 2, 1e-4);
  EXPECT_EQ(wilson_half_width(3, 10), wilson_half_width(7, 10));
}

TEST(CheckTranscript, Examples) {
  EXPECT_TRUE(check_transcript(make({1, 2}, {2, 3})).empty());
  EXPECT_EQ(check_transcript(make({1, 2}, {3, 1})), std::vector<std::size_t>{2});
  EXPECT_TRUE(check_transcript(Transcript{}).empty());
  EXPECT_EQ(check_transcript(make({4, 1, 2}, {4, 1, 4})), (std::vector<std::size_t>{1, 2, 3}));
}

TEST(Transcript, TextRoundTrip) {
  Transcript t = make({3, 1}, {2, 4});
  t.initial_output = Output::of(1);
  t.rounds.push_back({2, Output::abort()});
  std::stringstream io;
  write_transcript(io, t);
  EXPECT_NE(io.str().find("3,2,ABORT"), std::string::npos);
  EXPECT_EQ(read_transcript(io), t);
  std::istringstream bad("x,y\n");
  EXPECT_THROW(read_transcript(bad), PreconditionError);
}

TEST(ModelHierarchy, DeterministicRunsUnchangedInRandomModes) {
  const Instance inst{12, 6, 0};
  const auto base = det_bitmap_mif(inst);
  const auto adv = random_adversary(12);
  for (auto mode : {RandomnessMode::RandomSeed, RandomnessMode::RandomTape, RandomnessMode::RandomOracle}) {
    const auto lifted = with_mode(base, mode);
    EXPECT_EQ(lifted->mode(), mode);
    EXPECT_EQ(lifted->declared_bits(), base->declared_bits());
    for (std::uint64_t seed = 0; seed < 20; ++seed)
      EXPECT_EQ(run_game(*lifted, *adv, inst, seed).transcript, run_game(*base, *adv, inst, seed).transcript);
  }
}

TEST(ModelHierarchy, TapeAsOracleCostsLogEll) {
  for (std::size_t ell : {4, 64, 100, 255}) {
    const Instance inst{4096 * 16, ell, 0.1};
    const auto tape = rt_mif(rt_params(inst));
    const auto wrapped = tape_as_oracle(tape, ell);
    EXPECT_EQ(wrapped->mode(), RandomnessMode::RandomOracle);
    const auto extra = static_cast<std::size_t>(std::ceil(std::log2(static_cast<double>(ell))));
    EXPECT_EQ(wrapped->declared_bits(), tape->declared_bits() + extra);
    const auto e = estimate_error(*wrapped, *mixed_adversary(inst.n, 0.5), inst, 50, 3);
    EXPECT_EQ(e.mistakes, 0u);
    EXPECT_LE(e.space.max_observed_bits, e.space.declared_bits);
  }
}
