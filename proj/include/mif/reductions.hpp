#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "mif/automaton.hpp"
#include "mif/core.hpp"

namespace mif {

// ---- AVOID(m, a, b) --------------------------------------------------------

struct AvoidInstance {
  Item m = 0;
  std::size_t a = 0, b = 0;
  double delta = 0;
  void validate() const;  // a, b >= 1, a + b <= m, 0 <= delta <= 1
};

// Lower bound on the one-way message length, in bits. Rejects delta >= 1.
double avoid_lb(const AvoidInstance& inst);

struct AvoidRun {
  std::vector<Item> alice;
  std::vector<Item> bob;           // distinct outputs Bob collected
  std::size_t message_bits = 0;    // declared state width handed over
  std::size_t observed_bits = 0;   // serialized width at the handoff
  bool aborted = false;
  bool success = false;            // |bob| = b and disjoint from alice
};

// Alice feeds sort(A) and hands the state to Bob, who echoes the current
// output until he has seen b outputs.
class AvoidProtocol {
 public:
  AvoidProtocol(AutomatonPtr a, AvoidInstance inst);

  AvoidRun run(std::vector<Item> alice, std::uint64_t seed) const;
  const AvoidInstance& instance() const { return inst_; }
  const Automaton& automaton() const { return *a_; }

 private:
  AutomatonPtr a_;
  AvoidInstance inst_;
};

AvoidProtocol avoid_from_mif(AutomatonPtr a, const AvoidInstance& inst);

struct AvoidSummary {
  std::size_t runs = 0;
  std::size_t failures = 0;
  std::size_t message_bits = 0;
  std::size_t max_observed_bits = 0;
  double failure_rate = 0;
  std::vector<AvoidRun> details;
};

// Every a-subset of [m], run with seed derive_seed(seed, {index}).
AvoidSummary avoid_exhaustive(const AvoidProtocol& p, std::uint64_t seed, std::uint64_t max_sets = 1'000'000);
// Uniformly random a-subsets.
AvoidSummary avoid_sampled(const AvoidProtocol& p, std::size_t trials, std::uint64_t seed);

void write_avoid_csv(std::ostream& out, const AvoidSummary& s);

// ---- FindCommonOutputs -----------------------------------------------------

struct FcoParams {
  Item n = 0;
  std::size_t ell = 0;
  std::size_t z = 0;
  double delta = 0;
  std::size_t p = 0, d = 0;
  std::vector<std::size_t> t;  // t[k-1] = t_k, k = 1..d
  std::vector<std::size_t> w;  // w[k-1] = 2^{k-1} (t_1 + 1)
  double eps = 0;              // (2 delta)^{p/30}
  std::vector<double> eps_k;   // w_k (64|S|)^{k-1} eps
  std::vector<Item> S;         // valid outputs, ascending

  std::size_t t_k(std::size_t k) const { return t.at(k - 1); }
  std::size_t w_k(std::size_t k) const { return w.at(k - 1); }
  // Length of the prefix x handed to level k: t_d + ... + t_{k+1}.
  std::size_t prefix_length(std::size_t k) const;

  // Small hand-picked parameters: t = (t_1, ..., t_d), S as given.
  static FcoParams custom(Item n, std::vector<std::size_t> t, std::vector<Item> S);
  std::string to_text() const;
};

// Parameters of the pseudo-deterministic lower bound with S = {1..s_size}.
FcoParams fco_params(Item n, std::size_t ell, std::size_t z, double delta, std::size_t s_size);

// A function from full-length streams to outputs.
class OutputFunction {
 public:
  using Fn = std::function<Item(std::span<const Item>)>;
  OutputFunction(std::string name, bool canonical, Fn fn)
      : name_(std::move(name)), canonical_(canonical), fn_(std::move(fn)) {}

  Item operator()(std::span<const Item> stream) const { return fn_(stream); }
  const std::string& name() const { return name_; }
  bool canonical() const { return canonical_; }

 private:
  std::string name_;
  bool canonical_;
  Fn fn_;
};

// The least item of [n] absent from the stream (n if all are present).
OutputFunction canonical_min_missing(Item n, std::size_t ell);
// Replaces the output by a uniform other item of [n] with probability eps,
// decided once per argument (a pure function of seed and stream).
OutputFunction noisy(OutputFunction base, double eps, std::uint64_t seed, Item n);

// Thresholds C_{k,h} in [1,2), a pure function of (seed, k, h).
class ThresholdMatrix {
 public:
  explicit ThresholdMatrix(std::uint64_t seed) : seed_(seed) {}
  static ThresholdMatrix constant(double c);
  double at(std::size_t k, std::size_t h) const;

 private:
  std::uint64_t seed_ = 0;
  double fixed_ = 0;  // used when in [1,2)
};

struct FcoStep {
  std::size_t k = 0;
  std::size_t prefix_length = 0;
  std::size_t round = 0;  // h, or 0 for a base case
  std::size_t q_size = 0;
  std::size_t p_size = 0;
  std::string exit;       // "base", "good", "continue", "base-failure", "step-failure"
};

struct FcoResult {
  std::vector<Item> set;  // ascending, exactly w_k items
  bool failed = false;    // this call took a failure exit
  bool any_failed = false;  // some call in the recursion did
  std::vector<FcoStep> trace;
  std::size_t calls = 0;
};

FcoResult fco(const OutputFunction& B, const ThresholdMatrix& C, const std::vector<Item>& x, std::size_t k,
              const FcoParams& prm, std::size_t max_calls = 5'000'000);

void write_fco_csv(std::ostream& out, const FcoResult& r);

}  // namespace mif
