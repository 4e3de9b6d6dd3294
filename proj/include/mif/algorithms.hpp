#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mif/automaton.hpp"
#include "mif/core.hpp"

namespace mif {

// Tracks which of the candidates 1..size have been seen; reports the least
// unseen one. The inner building block of the bitmap and block algorithms.
struct LeastUnseen {
  std::vector<bool> seen;

  explicit LeastUnseen(std::size_t size = 0) : seen(size, false) {}
  void mark(Item x) {
    if (x >= 1 && x <= seen.size()) seen[x - 1] = true;
  }
  // 0 when every candidate has been seen.
  Item least() const;
  void encode(BitSink& out) const;
};

// ---- deterministic -------------------------------------------------------

class DetBitmap final : public AutomatonImpl<DetBitmap, LeastUnseen> {
 public:
  explicit DetBitmap(const Instance& inst);
  std::string name() const override { return "det_bitmap"; }
  RandomnessMode mode() const override { return RandomnessMode::Deterministic; }
  Item universe() const override { return n_; }
  std::size_t declared_bits() const override { return ell_ + 1; }

  LeastUnseen make_initial(Randomness&) const { return LeastUnseen(ell_ + 1); }
  void step(LeastUnseen& s, Item input, Randomness&) const { s.mark(input); }
  Output emit(const LeastUnseen& s, Randomness&) const;

 private:
  Item n_;
  std::size_t ell_;
};

AutomatonPtr det_bitmap_mif(const Instance& inst);
// Remembers every item of [n]; n bits.
AutomatonPtr store_all_mif(const Instance& inst);
// One state, fixed output (possibly Abort), zero bits.
AutomatonPtr constant_output(Item n, Output value);

// ---- random oracle -------------------------------------------------------

struct OracleListState {
  std::vector<bool> covered;  // positions of the oracle list seen in the input
  std::size_t count = 0;
  std::size_t cursor = 0;  // least uncovered position, derived

  void encode(BitSink& out) const;
};

class OracleList final : public AutomatonImpl<OracleList, OracleListState> {
 public:
  explicit OracleList(const Instance& inst);
  std::string name() const override { return "oracle_list"; }
  RandomnessMode mode() const override { return RandomnessMode::RandomOracle; }
  Item universe() const override { return n_; }
  std::size_t declared_bits() const override { return ell_ + 2; }

  // The ell+1 distinct items the oracle determines.
  const std::vector<Item>& list(const Oracle& oracle) const;

  OracleListState make_initial(Randomness&) const;
  void step(OracleListState& s, Item input, Randomness& r) const;
  Output emit(const OracleListState& s, Randomness& r) const;

 private:
  struct ListInfo;
  const ListInfo& info(const Oracle& oracle) const;
  Item n_;
  std::size_t ell_;
};

AutomatonPtr oracle_list_mif(const Instance& inst);

// ---- random seed (block construction) -----------------------------------

struct SeedBlockConfig {
  std::size_t parts = 0;   // t; 0 picks max(ceil(sqrt ell), ceil(ell^2/n))
  std::size_t list = 0;    // k; 0 picks 2t
  std::size_t blocks = 0;  // s; 0 picks 4*ell rounded up to a power of two
};

struct SeedBlockState {
  std::vector<std::uint32_t> list;  // block indices, 0-based
  std::vector<bool> covered;
  std::size_t current = 0;  // == list.size() once aborted
  LeastUnseen inner;
  std::size_t inner_updates = 0;
  // field widths, copied for encoding
  unsigned block_bits = 0, current_bits = 0, counter_bits = 0;

  bool aborted() const { return current == list.size(); }
  void encode(BitSink& out) const;
};

class SeedBlock final : public AutomatonImpl<SeedBlock, SeedBlockState> {
 public:
  SeedBlock(const Instance& inst, SeedBlockConfig cfg);
  std::string name() const override { return "seed_block"; }
  RandomnessMode mode() const override { return RandomnessMode::RandomSeed; }
  Item universe() const override { return n_; }
  std::size_t declared_bits() const override;

  std::size_t parts() const { return t_; }
  std::size_t list_length() const { return k_; }
  std::size_t blocks() const { return s_; }
  std::size_t block_size() const { return block_size_; }
  // ceil(ell / t): inputs the inner algorithm absorbs before it is replaced.
  std::size_t inner_capacity() const { return capacity_; }

  SeedBlockState make_initial(Randomness& r) const;
  void step(SeedBlockState& s, Item input, Randomness&) const;
  Output emit(const SeedBlockState& s, Randomness&) const;

 private:
  Item n_;
  std::size_t ell_, t_, k_, s_, block_size_, capacity_;
};

AutomatonPtr seed_block_mif(const Instance& inst, SeedBlockConfig cfg = {});

// ---- random tape (recursive construction) -------------------------------

// Number of ceil(alpha) factors among k factors from {floor, ceil}(alpha)
// whose product lies in [alpha^k, 2 alpha^k].
std::size_t fract_power_round(double alpha, std::size_t k);

// d = max(2, min(ceil(log2 ell), floor(2 log(n/4) / log(16 ell)))).
std::size_t rt_depth(Item n, std::size_t ell);

struct RtParams {
  Item n = 0;
  std::size_t ell = 0;
  double delta = 0;
  std::size_t d = 0;
  double alpha = 0;
  std::size_t u = 0;                // ceil(alpha) count among the middle levels
  std::vector<std::uint64_t> b;     // b[0] is the root level
  std::vector<std::uint64_t> w;

  // Hand-chosen levels (e.g. deliberately under-provisioned): w[0] is given,
  // w[i] for i >= 1 is the suffix product of b.
  static RtParams custom(Item n, std::size_t ell, std::uint64_t root_width,
                         std::vector<std::uint64_t> b);

  std::uint64_t leaf_count() const;  // product of w
  // Mixed-radix index of a 1-based path; 0 if out of range.
  Item index_of(std::span<const std::uint64_t> path) const;
  // Inverse of index_of; false when `item` is outside the range.
  bool path_of(Item item, std::span<std::uint64_t> path) const;
  // Sum of b_i * log2(2 w_i).
  double level_bits() const;
  std::string to_text() const;
  // Structural checks shared by rt_params and custom.
  void validate() const;
};

// Parameters for ell >= 4 and 64 * ell <= n; otherwise PreconditionError.
RtParams rt_params(const Instance& inst);

struct RtState {
  std::vector<std::vector<std::uint64_t>> lists;
  std::vector<std::vector<bool>> marks;
  std::vector<std::size_t> cursor;  // derived from marks
  bool aborted = false;
  std::vector<unsigned> entry_bits;

  void encode(BitSink& out) const;
};

class RtAutomaton final : public AutomatonImpl<RtAutomaton, RtState> {
 public:
  explicit RtAutomaton(RtParams p);
  std::string name() const override { return "rt_mif"; }
  RandomnessMode mode() const override { return RandomnessMode::RandomTape; }
  Item universe() const override { return p_.n; }
  std::size_t declared_bits() const override { return declared_; }
  const RtParams& params() const { return p_; }

  RtState make_initial(Randomness& r) const;
  void step(RtState& s, Item input, Randomness& r) const;
  Output emit(const RtState& s, Randomness&) const;

 private:
  void resample(RtState& s, std::size_t level, Randomness& r) const;
  RtParams p_;
  std::size_t declared_;
};

AutomatonPtr rt_mif(RtParams p);

// ---- combinators ----------------------------------------------------------

// p independent copies; reports the most common output (smallest on ties).
AutomatonPtr majority_amplify(AutomatonPtr a, std::size_t copies);

// Runs `a` under a richer randomness mode without changing its behavior.
AutomatonPtr with_mode(AutomatonPtr a, RandomnessMode mode);

// Random-tape automaton emulated with an oracle: a step counter modulo ell
// selects fresh oracle bits per step, costing ceil(log2 ell) extra bits.
AutomatonPtr tape_as_oracle(AutomatonPtr a, std::size_t ell);

// Test fixture: after every step, with probability `rate`, the reported
// output is replaced by the next item cyclically. Adds one bit of state.
AutomatonPtr corrupt_outputs(AutomatonPtr a, double rate);

}  // namespace mif
