#include "mif/randomness.hpp"

#include <array>

namespace mif {

std::string to_string(RandomnessMode m) {
  switch (m) {
    case RandomnessMode::Deterministic: return "deterministic";
    case RandomnessMode::RandomSeed: return "random-seed";
    case RandomnessMode::RandomTape: return "random-tape";
    case RandomnessMode::RandomOracle: return "random-oracle";
  }
  return "?";
}

std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> tags) {
  std::vector<std::uint32_t> words{static_cast<std::uint32_t>(base), static_cast<std::uint32_t>(base >> 32)};
  for (auto t : tags) {
    words.push_back(static_cast<std::uint32_t>(t));
    words.push_back(static_cast<std::uint32_t>(t >> 32));
  }
  std::seed_seq seq(words.begin(), words.end());
  std::array<std::uint32_t, 2> out{};
  seq.generate(out.begin(), out.end());
  return (std::uint64_t{out[1]} << 32) | out[0];
}

namespace {
// splitmix64 finaliser
std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}
}  // namespace

std::uint64_t Oracle::word(std::uint64_t consumer, std::uint64_t offset) const {
  return mix(mix(key_ ^ mix(consumer)) ^ offset);
}

Rng Oracle::stream(std::uint64_t consumer) const { return Rng(derive_seed(key_, {consumer})); }

Oracle Oracle::sub(std::uint64_t index) const { return Oracle(derive_seed(key_, {0x5ab, index})); }

void NoRandomness::fail() const {
  throw ContractViolation("randomness requested where the mode forbids it (" + where_ + ")");
}
std::uint64_t NoRandomness::uniform(std::uint64_t) { fail(); }
bool NoRandomness::bernoulli(double) { fail(); }
std::size_t NoRandomness::categorical(std::span<const double>) { fail(); }
const Oracle& NoRandomness::oracle() { fail(); }

std::uint64_t StreamRandomness::uniform(std::uint64_t k) {
  if (k == 0) throw PreconditionError("uniform(0)");
  return std::uniform_int_distribution<std::uint64_t>(0, k - 1)(*rng_);
}
bool StreamRandomness::bernoulli(double p) { return std::bernoulli_distribution(p)(*rng_); }
std::size_t StreamRandomness::categorical(std::span<const double> weights) {
  return std::discrete_distribution<std::size_t>(weights.begin(), weights.end())(*rng_);
}
const Oracle& StreamRandomness::oracle() {
  throw ContractViolation("oracle access outside random-oracle mode");
}

void OracleRandomness::fail() const {
  throw ContractViolation("sequential draws are not allowed in random-oracle mode; address the oracle");
}
std::uint64_t OracleRandomness::uniform(std::uint64_t) { fail(); }
bool OracleRandomness::bernoulli(double) { fail(); }
std::size_t OracleRandomness::categorical(std::span<const double>) { fail(); }

}  // namespace mif
