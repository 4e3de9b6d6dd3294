#pragma once

// Builds automata and adversaries from string ids, for the CLI and the
// Python module.

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mif/adversaries.hpp"
#include "mif/algorithms.hpp"

namespace mif {

struct AlgorithmOptions {
  Item constant = 1;                 // "constant": output item, 0 for Abort
  SeedBlockConfig seed_block;
  std::uint64_t rt_root_width = 0;   // "rt_custom"
  std::vector<std::uint64_t> rt_b;   // "rt_custom"
  std::size_t states = 2;            // "uniform_output": outputs 1..states
  std::size_t copies = 1;            // majority vote when > 1
  double corrupt = 0;                // per-step output corruption when > 0
};

// det_bitmap, store_all, constant, oracle_list, seed_block, rt, rt_custom, uniform_output
AutomatonPtr make_algorithm(const std::string& id, const Instance& inst, const AlgorithmOptions& opt = {});
std::vector<std::string> algorithm_ids();

struct AdversaryOptions {
  double p_echo = 0.5;
  std::vector<Item> stream;  // "replay"
  LearnerConfig learner;     // "learning"
};

// echo, random, mixed, replay, learning
std::unique_ptr<Adversary> make_adversary(const std::string& id, const Instance& inst, const Automaton& target,
                                          const AdversaryOptions& opt = {});
std::vector<std::string> adversary_ids();

}  // namespace mif
