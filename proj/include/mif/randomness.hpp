#pragma once

#include <any>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <random>
#include <span>
#include <string>

#include "mif/core.hpp"

namespace mif {

enum class RandomnessMode { Deterministic, RandomSeed, RandomTape, RandomOracle };

std::string to_string(RandomnessMode m);

using Rng = std::mt19937_64;

// Stable 64-bit seed derived from a base seed and a list of tags.
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> tags);

// A lazily evaluated random string. Bits are addressed by (consumer, offset)
// and never count toward an automaton's space. Derived objects (a shuffled
// list, an inverse index) may be memoised here for free as well.
class Oracle {
 public:
  explicit Oracle(std::uint64_t key) : key_(key) {}

  std::uint64_t key() const { return key_; }
  std::uint64_t word(std::uint64_t consumer, std::uint64_t offset) const;
  // A reproducible generator for the given consumer.
  Rng stream(std::uint64_t consumer) const;
  // Independent oracle for a sub-component (e.g. one copy of a product).
  Oracle sub(std::uint64_t index) const;

  template <class T>
  const T& memo(std::uint64_t consumer, const std::function<T()>& make) const {
    auto it = cache_->find(consumer);
    if (it == cache_->end()) it = cache_->emplace(consumer, make()).first;
    return std::any_cast<const T&>(it->second);
  }

 private:
  std::uint64_t key_;
  std::shared_ptr<std::map<std::uint64_t, std::any>> cache_ =
      std::make_shared<std::map<std::uint64_t, std::any>>();
};

// The handle an automaton receives on each init/transition/output call. What
// it may do depends on the randomness mode; forbidden use throws
// ContractViolation.
class Randomness {
 public:
  virtual ~Randomness() = default;

  // Uniform in [0, k). k >= 1.
  virtual std::uint64_t uniform(std::uint64_t k) = 0;
  virtual bool bernoulli(double p) = 0;
  // Index drawn proportionally to non-negative weights.
  virtual std::size_t categorical(std::span<const double> weights) = 0;
  virtual const Oracle& oracle() = 0;
};

// Every call throws: used where the mode grants no randomness.
class NoRandomness final : public Randomness {
 public:
  explicit NoRandomness(std::string where) : where_(std::move(where)) {}
  std::uint64_t uniform(std::uint64_t) override;
  bool bernoulli(double) override;
  std::size_t categorical(std::span<const double>) override;
  const Oracle& oracle() override;

 private:
  [[noreturn]] void fail() const;
  std::string where_;
};

// Sequential draws from a private generator (seed or tape randomness).
class StreamRandomness final : public Randomness {
 public:
  explicit StreamRandomness(Rng& rng) : rng_(&rng) {}
  std::uint64_t uniform(std::uint64_t k) override;
  bool bernoulli(double p) override;
  std::size_t categorical(std::span<const double> weights) override;
  const Oracle& oracle() override;

 private:
  Rng* rng_;
};

// Oracle mode: only addressed access is allowed, so that transitions stay a
// deterministic function of (state, input, oracle).
class OracleRandomness final : public Randomness {
 public:
  explicit OracleRandomness(Oracle oracle) : oracle_(std::move(oracle)) {}
  std::uint64_t uniform(std::uint64_t) override;
  bool bernoulli(double) override;
  std::size_t categorical(std::span<const double>) override;
  const Oracle& oracle() override { return oracle_; }

 private:
  [[noreturn]] void fail() const;
  Oracle oracle_;
};

// Partial Fisher-Yates: the first `count` entries of a uniform random
// permutation of {1..universe}, drawn through `draw(k)` returning [0,k).
template <class Draw>
std::vector<std::uint64_t> sample_without_repetition(std::uint64_t universe, std::size_t count,
                                                     Draw&& draw);

}  // namespace mif

#include "mif/detail/sampling.ipp"
