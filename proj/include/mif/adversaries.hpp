#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mif/engine.hpp"
#include "mif/finite_model.hpp"

namespace mif {

// ---- static strategies ----------------------------------------------------

std::unique_ptr<Adversary> echo_adversary();
// Uniform over [n] minus prior inputs minus the current output.
std::unique_ptr<Adversary> random_adversary(Item n);
std::unique_ptr<Adversary> mixed_adversary(Item n, double p_echo);
// Feeds a fixed stream; repeats its last item if asked for more.
std::unique_ptr<Adversary> replay_adversary(std::vector<Item> stream);

// ---- exact inference ------------------------------------------------------

// Forward filter over the model, conditioned on every observed output.
Belief posterior_update(const FiniteModel& m, const Transcript& t);
Belief posterior_update(const Automaton& a, const Transcript& t, std::size_t state_cap = 1u << 16);

// Per state: membership flags over items 1..n (index 0 unused).
using SafeSets = std::vector<std::vector<bool>>;

struct SafeSetOptions {
  bool exact = true;
  std::size_t samples = 100000;  // prefixes drawn when !exact
  std::uint64_t seed = 0;
  std::uint64_t max_prefixes = 2'000'000;  // exact enumeration limit
};

// H_s = { i : Pr[i in X | F(X) = s] <= q/(4n) } for X a uniform q-subset fed
// in increasing order. States the prefix never reaches get the empty set.
SafeSets compute_safe_sets(const FiniteModel& m, std::size_t q, const SafeSetOptions& opt = {});

// ---- adaptive search over belief states -----------------------------------

// A deterministic adaptive strategy: the input to send after observing a
// given sequence of outputs. Nodes with input 0 only observe.
struct PolicyNode {
  Item input = 0;
  std::vector<std::pair<Output, std::shared_ptr<const PolicyNode>>> next;
  std::shared_ptr<const PolicyNode> otherwise;  // used when no child matches
};

class DecisionTree {
 public:
  DecisionTree() = default;
  explicit DecisionTree(std::shared_ptr<const PolicyNode> root) : root_(std::move(root)) {}
  // Input after `outputs` (outputs observed since the tree started). 0 if the
  // tree has nothing to say.
  Item lookup(std::span<const Output> outputs) const;
  std::size_t depth() const;
  bool empty() const { return !root_; }
  const PolicyNode* root() const { return root_.get(); }

 private:
  std::shared_ptr<const PolicyNode> root_;
};

enum class SearchMode { Exact, NonAdaptive };
std::string to_string(SearchMode m);

struct MinimaxResult {
  double max_mistake = 0;   // best adversary for mistakes
  double induced_abort = 0; // abort-before-mistake probability under that adversary
  double max_abort = 0;
  double max_failure = 0;   // mistake or abort
  std::size_t depth = 0;    // decision depth of the mistake-optimal tree
  std::size_t nodes = 0;
  DecisionTree policy;      // mistake-optimal; root observes the initial output
};

// Exact optimum over deterministic adaptive adversaries.
MinimaxResult minimax_worst_error(const FiniteModel& m, std::size_t ell, std::size_t budget = 5'000'000);
MinimaxResult minimax_worst_error(const Automaton& a, const Instance& inst,
                                  std::size_t budget = 5'000'000);

struct Splitting {
  DecisionTree policy;
  double probability = 0;  // of a divisive phase output under the posterior
  SearchMode mode = SearchMode::Exact;
};

// Whether outputs `y` rule out at least half of Q: |{s in Q : y within H_s}| <= |Q|/2.
bool divisive(const std::vector<Output>& y, const std::vector<StateId>& q, const SafeSets& h);

// A t-step strategy that is 1/2-splitting for Q under `posterior`, if the
// searched space contains one.
std::optional<Splitting> find_splitting(const FiniteModel& m, const Belief& posterior,
                                        const std::vector<StateId>& q, const SafeSets& h,
                                        std::size_t t, std::size_t budget = 200'000);

// ---- the learning adversary -------------------------------------------------

struct LearnerConfig {
  std::size_t z = 0;                          // 0: ceil(log2 |states|)
  std::optional<std::size_t> phase_length;    // t
  std::optional<std::size_t> max_phases;      // h_max
  SafeSetOptions safe_sets;
  std::size_t search_budget = 200'000;
};

struct LearnerPlan {
  FiniteModel model;
  Instance inst;
  std::size_t z = 0, q = 0, w = 0, t = 0, h_max = 0;
  SafeSets safe;
  std::vector<StateId> q0;
  std::size_t search_budget = 0;
};

// Derives q, w, t, h_max and the safe sets. When the formula's phase length
// rounds to zero (always at micro scale) it uses t = 1 and as many phases as
// the remaining ell - q inputs allow, unless overridden.
std::shared_ptr<const LearnerPlan> plan_learner(FiniteModel m, const Instance& inst,
                                                const LearnerConfig& cfg = {});

struct PhaseRecord {
  std::size_t h = 0;
  std::string kind;  // "split" or "extract"
  std::size_t q_before = 0, q_after = 0;
  bool divisive = false;
  std::size_t w_size = 0;  // |W| before padding, extraction phases only
  double probability = 0;  // splitting probability, or sub-game value
  SearchMode mode = SearchMode::Exact;
};

enum class LearnerStatus { Prefix, Running, Done, FailedEmptyQ, FailedPhases };
std::string to_string(LearnerStatus s);

class LearningAdversary final : public Adversary {
 public:
  explicit LearningAdversary(std::shared_ptr<const LearnerPlan> plan);

  std::string kind() const override { return "learning"; }
  Item next_input(const Transcript& seen, Rng& rng) override;
  std::unique_ptr<Adversary> clone() const override;

  const LearnerPlan& plan() const { return *plan_; }
  LearnerStatus status() const { return status_; }
  const std::vector<PhaseRecord>& phases() const { return log_; }
  const std::vector<std::vector<Item>>& extracted() const { return extracted_; }
  // Inputs chosen by the strategy itself (prefix + phases), excluding padding.
  std::size_t strategic_inputs() const { return strategic_; }
  std::string phase_log_csv() const;
  // Closes a phase cut short by the end of the game. Call with the final transcript.
  void finish(const Transcript& seen);

 private:
  void close_phase(const Transcript& seen);
  void open_phase(const Transcript& seen);

  std::shared_ptr<const LearnerPlan> plan_;
  std::vector<Item> prefix_;
  LearnerStatus status_ = LearnerStatus::Prefix;
  std::vector<StateId> q_;
  std::size_t h_ = 0;
  DecisionTree phase_;
  bool phase_is_split_ = false;
  std::size_t phase_start_ = 0;
  bool in_phase_ = false;
  std::vector<PhaseRecord> log_;
  std::vector<std::vector<Item>> extracted_;
  std::size_t strategic_ = 0;
  Item last_ = 1;
};

std::unique_ptr<LearningAdversary> learning_adversary(const Automaton& a, const Instance& inst,
                                                      const LearnerConfig& cfg = {});

}  // namespace mif
