#pragma once

// Backward induction over belief states of a finite model. Shared by the
// minimax oracle, the splitting search and the learner's extraction phase.

#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include "mif/adversaries.hpp"

namespace mif::detail {

struct Value {
  double primary = 0;
  double secondary = 0;

  Value& operator+=(const Value& o) {
    primary += o.primary;
    secondary += o.secondary;
    return *this;
  }
  Value scaled(double k) const { return {primary * k, secondary * k}; }
};

bool better(const Value& a, const Value& b);

// Inputs and outputs since the search started.
struct History {
  std::vector<Item> inputs;
  std::vector<Output> outputs;
};

struct Objective {
  std::vector<Item> alphabet;
  std::size_t horizon = 0;
  // Reward earned by the latest round, and whether play stops there.
  std::function<std::pair<Value, bool>(const History&)> score;
  // Reward for a history that ran the full horizon.
  std::function<Value(const History&)> terminal = [](const History&) { return Value{}; };
};

class BeliefGame {
 public:
  BeliefGame(const FiniteModel& m, const Objective& obj, std::size_t budget)
      : m_(m), obj_(obj), budget_(budget) {}

  // Best adaptive strategy from belief `b` (unnormalised); values scale with its mass.
  Value solve(const Belief& b, std::shared_ptr<const PolicyNode>& policy);
  // Value of feeding a fixed input sequence.
  Value evaluate(const Belief& b, const std::vector<Item>& inputs);
  std::size_t nodes() const { return nodes_; }

 private:
  Value decide(const Belief& b, History& h, std::shared_ptr<const PolicyNode>& policy);
  Value replay(const Belief& b, History& h, const std::vector<Item>& inputs);
  void charge();

  const FiniteModel& m_;
  const Objective& obj_;
  std::size_t budget_;
  std::size_t nodes_ = 0;
};

// Splits a belief by the output of each state; outputs ascend by code.
std::vector<std::pair<Output, Belief>> split_by_output(const FiniteModel& m, const Belief& b);

double mass(const Belief& b);

}  // namespace mif::detail
