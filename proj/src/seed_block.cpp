#include <algorithm>
#include <bit>
#include <cmath>

#include "mif/algorithms.hpp"

namespace mif {

void SeedBlockState::encode(BitSink& out) const {
  for (auto h : list) out.put(h, block_bits);
  for (bool c : covered) out.put_bit(c);
  out.put(current, current_bits);
  inner.encode(out);
  out.put(inner_updates, counter_bits);
}

namespace {
std::size_t ceil_div(std::size_t a, std::size_t b) { return (a + b - 1) / b; }
}  // namespace

SeedBlock::SeedBlock(const Instance& inst, SeedBlockConfig cfg) : n_(inst.n), ell_(inst.ell) {
  inst.validate();
  if (ell_ >= n_) throw PreconditionError("seed_block_mif: needs ell < n");
  t_ = cfg.parts;
  if (t_ == 0) {
    const auto root = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(ell_))));
    t_ = std::clamp<std::size_t>(std::max(root, ceil_div(ell_ * ell_, n_)), 1, ell_);
  }
  if (t_ < 1 || t_ > ell_) throw PreconditionError("seed_block_mif: need 1 <= t <= ell");
  capacity_ = ceil_div(ell_, t_);

  auto fits = [&](std::size_t s) {
    if (s < 1 || s > n_) return false;
    const std::size_t bs = ceil_div(n_, s);
    if ((s - 1) * bs >= n_) return false;
    return n_ - (s - 1) * bs >= capacity_ + 1;
  };
  s_ = cfg.blocks;
  if (s_ == 0) {
    s_ = std::bit_ceil(4 * ell_);
    while (s_ > 1 && !fits(s_)) s_ /= 2;
  }
  if (!fits(s_))
    throw PreconditionError("seed_block_mif: every block needs at least ceil(ell/t)+1 items");
  block_size_ = ceil_div(n_, s_);

  k_ = cfg.list ? cfg.list : std::min(2 * t_, s_);
  if (k_ < 1 || k_ > s_) throw PreconditionError("seed_block_mif: need 1 <= k <= s");
}

std::size_t SeedBlock::declared_bits() const {
  return k_ * bits_for(s_) + k_ + bits_for(k_ + 1) + (capacity_ + 1) + bits_for(capacity_);
}

SeedBlockState SeedBlock::make_initial(Randomness& r) const {
  SeedBlockState s;
  for (auto h : sample_without_repetition(s_, k_, [&](std::uint64_t m) { return r.uniform(m); }))
    s.list.push_back(static_cast<std::uint32_t>(h - 1));
  s.covered.assign(k_, false);
  s.inner = LeastUnseen(capacity_ + 1);
  s.block_bits = bits_for(s_);
  s.current_bits = bits_for(k_ + 1);
  s.counter_bits = bits_for(capacity_);
  return s;
}

void SeedBlock::step(SeedBlockState& s, Item input, Randomness&) const {
  if (s.aborted()) return;
  const std::size_t block = (input - 1) / block_size_;
  const Item rank = (input - 1) % block_size_ + 1;
  auto it = std::find(s.list.begin(), s.list.end(), block);
  if (it == s.list.end()) return;
  const auto j = static_cast<std::size_t>(it - s.list.begin());
  s.covered[j] = true;
  if (j != s.current) return;
  s.inner.mark(rank);
  if (++s.inner_updates < capacity_) return;

  // The inner algorithm has used its budget: move to the next untouched block.
  std::size_t next = s.current + 1;
  while (next < k_ && s.covered[next]) ++next;
  s.inner = LeastUnseen(capacity_ + 1);
  s.inner_updates = 0;
  s.current = next;
  if (next == k_) {
    std::fill(s.list.begin(), s.list.end(), 0);
    s.covered.assign(k_, false);
  }
}

Output SeedBlock::emit(const SeedBlockState& s, Randomness&) const {
  if (s.aborted()) return Output::abort();
  return Output::of(static_cast<Item>(s.list[s.current]) * block_size_ + s.inner.least());
}

AutomatonPtr seed_block_mif(const Instance& inst, SeedBlockConfig cfg) {
  return std::make_shared<SeedBlock>(inst, cfg);
}

}  // namespace mif
