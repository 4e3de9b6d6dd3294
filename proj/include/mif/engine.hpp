#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mif/automaton.hpp"
#include "mif/core.hpp"
#include "mif/randomness.hpp"

namespace mif {

struct Round {
  Item input = 0;
  Output output;
  friend bool operator==(const Round&, const Round&) = default;
};

struct Transcript {
  // Output of the initial state, shown to the adversary before the first input.
  std::optional<Output> initial_output;
  std::vector<Round> rounds;

  std::size_t size() const { return rounds.size(); }
  bool empty() const { return rounds.empty(); }
  // Most recent output, counting the initial one.
  std::optional<Output> last_output() const;

  friend bool operator==(const Transcript&, const Transcript&) = default;
};

// Steps (1-based) whose output repeats an input seen at or before that step.
std::vector<std::size_t> check_transcript(const Transcript& t);

void write_transcript(std::ostream& out, const Transcript& t);
Transcript read_transcript(std::istream& in);

struct Verdict {
  enum class Kind { Ok, Mistake, Abort };
  Kind kind = Kind::Ok;
  std::size_t step = 0;  // first mistake, or the abort step

  static Verdict ok() { return {}; }
  static Verdict mistake(std::size_t s) { return {Kind::Mistake, s}; }
  static Verdict abort(std::size_t s) { return {Kind::Abort, s}; }
  bool failed() const { return kind != Kind::Ok; }
  friend bool operator==(const Verdict&, const Verdict&) = default;
};

std::string to_string(const Verdict& v);

struct SpaceReport {
  std::size_t declared_bits = 0;
  std::size_t max_observed_bits = 0;
};

struct GameResult {
  Verdict verdict;
  SpaceReport space;
};

// A strategy choosing the next input from what it has seen so far. Instances
// carry per-run state; clone() yields a fresh copy for another run.
class Adversary {
 public:
  virtual ~Adversary() = default;
  virtual std::string kind() const = 0;
  virtual Item next_input(const Transcript& seen, Rng& rng) = 0;
  virtual std::unique_ptr<Adversary> clone() const = 0;
};

// Steps one automaton under the randomness contract of its mode, measuring
// the state width after every change. Used by run_game and by protocols that
// need to interleave their own logic with the automaton.
class GameSession {
 public:
  GameSession(const Automaton& a, std::uint64_t seed);

  Output current_output() const { return current_; }
  bool aborted() const { return current_.is_abort(); }
  // Transition on `input` and return the new output.
  Output feed(Item input);
  std::size_t state_width() const;
  SpaceReport space() const { return {automaton_->declared_bits(), max_bits_}; }
  const AutomatonState& state() const { return *state_; }

 private:
  void measure();
  Output compute_output();

  const Automaton* automaton_;
  Rng init_rng_;
  Rng tape_rng_;
  std::unique_ptr<Randomness> init_r_;
  std::unique_ptr<Randomness> step_r_;
  std::unique_ptr<Randomness> out_r_;
  StateBox state_;
  Output current_;
  std::size_t max_bits_ = 0;
};

struct GameRun {
  Transcript transcript;
  GameResult result;
};

// Plays one game; `adv` is used as-is (its per-run state advances).
GameRun run_game(const Automaton& a, Adversary& adv, const Instance& inst, std::uint64_t seed);
// Plays one game against a fresh clone of `adv`.
GameRun run_game(const Automaton& a, const Adversary& adv, const Instance& inst,
                 std::uint64_t seed);

// Half-width of the two-sided Wilson score interval.
double wilson_half_width(std::size_t successes, std::size_t trials, double z = 1.959963984540054);

struct ErrorEstimate {
  std::size_t trials = 0;
  std::size_t mistakes = 0;
  std::size_t aborts = 0;
  double mistake_rate = 0, abort_rate = 0, failure_rate = 0;
  double mistake_half_width = 0, abort_half_width = 0, failure_half_width = 0;
  SpaceReport space;
  // Per-trial verdicts in trial order.
  std::vector<Verdict> verdicts;
};

// Independent runs with seeds derived from (seed, trial). Results do not
// depend on `threads`.
ErrorEstimate estimate_error(const Automaton& a, const Adversary& adv, const Instance& inst,
                             std::size_t trials, std::uint64_t seed, unsigned threads = 1);

}  // namespace mif
