#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mif/automaton.hpp"
#include "mif/core.hpp"

namespace mif {

using StateId = std::uint32_t;

struct Transition {
  StateId next = 0;
  double prob = 0;
};

// Explicit Markov description of an automaton at micro scale: every state,
// its output, the init distribution, and the transition kernel per input.
struct FiniteModel {
  Item n = 0;
  RandomnessMode mode = RandomnessMode::RandomTape;
  std::string name;
  std::vector<Output> outputs;
  std::vector<double> init;
  std::vector<std::vector<Transition>> kernel;  // index state * n + (input - 1)

  std::size_t size() const { return outputs.size(); }
  std::span<const Transition> next(StateId s, Item input) const {
    return kernel[static_cast<std::size_t>(s) * n + (input - 1)];
  }
  // Throws PreconditionError on malformed tables.
  void validate() const;
};

// Enumerates every reachable state of `a` by replaying each randomness
// branch. Oracle-mode automata are rejected. Abort states are absorbing.
FiniteModel tabulate(const Automaton& a, std::size_t state_cap = 1u << 16);

// Runs a table as an ordinary automaton (ceil(log2 |states|) bits).
AutomatonPtr make_tabular(FiniteModel m);

// Tape model whose state, initially and after every input, is uniform over
// the given outputs (one state per entry).
FiniteModel uniform_output_model(Item n, std::vector<Output> outputs);

// A probability vector over the states of a model.
using Belief = std::vector<double>;

// b K_input, without conditioning.
Belief propagate(const FiniteModel& m, const Belief& b, Item input);
// Zeroes states whose output differs from `o`; returns the kept mass.
double condition(const FiniteModel& m, Belief& b, Output o);

}  // namespace mif
