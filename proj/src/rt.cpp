#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "mif/algorithms.hpp"

namespace mif {

namespace {

constexpr std::size_t kMaxDepth = 64;

// ceil, but values within rounding noise of an integer snap to it.
std::uint64_t ceil_snapped(long double x) {
  const long double r = std::round(x);
  if (std::fabs(x - r) <= 1e-9L * std::max<long double>(1, std::fabs(x)))
    return static_cast<std::uint64_t>(r);
  return static_cast<std::uint64_t>(std::ceil(x));
}

// Largest m with (16 ell)^m <= (n/4)^2, in exact integer arithmetic.
std::size_t depth_cap(Item n, std::size_t ell) {
  using u128 = unsigned __int128;
  const u128 target = static_cast<u128>(n) * n;
  const u128 base = 16 * static_cast<u128>(ell);
  u128 power = 16;  // 16 * base^m, compared against n^2
  std::size_t m = 0;
  while (power <= target / base) {
    power *= base;
    ++m;
  }
  return m;
}

}  // namespace

std::size_t rt_depth(Item n, std::size_t ell) {
  return std::max<std::size_t>(2, std::min<std::size_t>(bits_for(ell), depth_cap(n, ell)));
}

std::size_t fract_power_round(double alpha, std::size_t k) {
  if (!(alpha >= 1.0)) throw PreconditionError("fract_power_round: alpha must be >= 1");
  const long double a = alpha;
  const long double lo = std::floor(a), hi = std::ceil(a);
  if (lo == hi) return 0;
  const long double target = std::pow(a, static_cast<long double>(k));
  auto ok = [&](std::size_t u) {
    const long double prod = std::pow(hi, static_cast<long double>(u)) *
                             std::pow(lo, static_cast<long double>(k - u));
    return target <= prod && prod <= 2 * target;
  };
  auto u = static_cast<std::size_t>(
      std::max<long double>(0, std::ceil(k * std::log(a / lo) / std::log(hi / lo))));
  u = std::min(u, k);
  if (ok(u)) return u;
  for (std::size_t v = 0; v <= k; ++v)
    if (ok(v)) return v;
  return u;
}

std::uint64_t RtParams::leaf_count() const {
  long double prod = 1;
  for (auto x : w) prod *= static_cast<long double>(x);
  if (prod > 1.8e19L) return UINT64_MAX;
  std::uint64_t p = 1;
  for (auto x : w) p *= x;
  return p;
}

Item RtParams::index_of(std::span<const std::uint64_t> path) const {
  if (path.size() != d) return 0;
  std::uint64_t idx = 0;
  for (std::size_t i = 0; i < d; ++i) {
    if (path[i] < 1 || path[i] > w[i]) return 0;
    idx = idx * w[i] + (path[i] - 1);
  }
  return idx + 1;
}

bool RtParams::path_of(Item item, std::span<std::uint64_t> path) const {
  if (item < 1 || item > leaf_count() || path.size() < d) return false;
  std::uint64_t x = item - 1;
  for (std::size_t i = d; i-- > 0;) {
    path[i] = x % w[i] + 1;
    x /= w[i];
  }
  return true;
}

double RtParams::level_bits() const {
  double total = 0;
  for (std::size_t i = 0; i < d; ++i) total += b[i] * std::log2(2.0 * w[i]);
  return total;
}

std::string RtParams::to_text() const {
  std::ostringstream out;
  char buf[64];
  auto real = [&](double x) {
    std::snprintf(buf, sizeof buf, "%.10g", x);
    return std::string(buf);
  };
  auto list = [&](const std::vector<std::uint64_t>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + std::to_string(v[i]);
    return s;
  };
  out << "n = " << n << '\n'
      << "ell = " << ell << '\n'
      << "delta = " << real(delta) << '\n'
      << "d = " << d << '\n'
      << "alpha = " << real(alpha) << '\n'
      << "u = " << u << '\n'
      << "b = " << list(b) << '\n'
      << "w = " << list(w) << '\n'
      << "leaves = " << leaf_count() << '\n'
      << "level_bits = " << real(level_bits()) << '\n';
  return out.str();
}

void RtParams::validate() const {
  if (d < 1 || d > kMaxDepth || b.size() != d || w.size() != d)
    throw PreconditionError("RtParams: level vectors must have length d");
  for (std::size_t i = 0; i < d; ++i)
    if (b[i] < 1 || b[i] > w[i]) throw PreconditionError("RtParams: need 1 <= b_i <= w_i");
  std::uint64_t suffix = 1;
  for (std::size_t i = d; i-- > 1;) {
    suffix *= b[i];
    if (w[i] != suffix) throw PreconditionError("RtParams: w_i must be the product of b_i..b_d");
  }
  if (leaf_count() > n) throw PreconditionError("RtParams: index range exceeds n");
}

RtParams RtParams::custom(Item n, std::size_t ell, std::uint64_t root_width,
                          std::vector<std::uint64_t> b) {
  RtParams p;
  p.n = n;
  p.ell = ell;
  p.d = b.size();
  p.b = std::move(b);
  p.w.assign(p.d, 0);
  if (p.d > 0) p.w[0] = root_width;
  std::uint64_t suffix = 1;
  for (std::size_t i = p.d; i-- > 1;) {
    suffix *= p.b[i];
    p.w[i] = suffix;
  }
  p.validate();
  return p;
}

RtParams rt_params(const Instance& inst) {
  inst.validate();
  if (inst.ell < 4 || 64 * inst.ell > inst.n)
    throw PreconditionError("rt_params: needs 4 <= ell <= n/64; use det_bitmap_mif for this instance");
  RtParams p;
  p.n = inst.n;
  p.ell = inst.ell;
  p.delta = inst.delta;

  const std::size_t log_ell = bits_for(inst.ell);
  const std::size_t cap = depth_cap(inst.n, inst.ell);
  p.d = std::max<std::size_t>(2, std::min(log_ell, cap));
  const long double ell = static_cast<long double>(inst.ell);
  const long double quarter_n = static_cast<long double>(inst.n) / 4;
  const long double dd = static_cast<long double>(p.d);
  long double alpha = 2;
  if (!(log_ell < cap))
    alpha = std::exp2(2 * std::log2(4 * ell) / (dd - 1) - 2 * std::log2(quarter_n) / (dd * (dd - 1)));
  p.alpha = static_cast<double>(alpha);
  p.u = fract_power_round(p.alpha, p.d - 2);

  p.b.assign(p.d, 0);
  std::uint64_t root = inst.ell + 1;
  if (inst.delta > 0) {
    const std::uint64_t extra = static_cast<std::uint64_t>(std::ceil(3 * std::log2(1 / inst.delta)));
    root = std::min<std::uint64_t>(root, ceil_snapped(8 * alpha) + extra);
  }
  p.b[0] = root;
  const auto hi = static_cast<std::uint64_t>(std::ceil(alpha));
  const auto lo = static_cast<std::uint64_t>(std::floor(alpha));
  for (std::size_t i = 1; i + 1 < p.d; ++i) p.b[i] = (i - 1 < p.u) ? hi : lo;
  p.b[p.d - 1] = ceil_snapped(ell / std::pow(alpha, dd - 1));

  p.w.assign(p.d, 0);
  p.w[0] = 16 * inst.ell;
  std::uint64_t suffix = 1;
  for (std::size_t i = p.d; i-- > 1;) {
    suffix *= p.b[i];
    p.w[i] = suffix;
  }
  p.validate();
  return p;
}

void RtState::encode(BitSink& out) const {
  out.put_bit(aborted);
  for (std::size_t i = 0; i < lists.size(); ++i) {
    for (auto v : lists[i]) out.put(v - 1, entry_bits[i]);
    for (bool m : marks[i]) out.put_bit(m);
  }
}

RtAutomaton::RtAutomaton(RtParams p) : p_(std::move(p)) {
  p_.validate();
  declared_ = 1;
  for (std::size_t i = 0; i < p_.d; ++i) declared_ += p_.b[i] * (bits_for(p_.w[i]) + 1);
}

void RtAutomaton::resample(RtState& s, std::size_t level, Randomness& r) const {
  s.lists[level] = sample_without_repetition(p_.w[level], p_.b[level],
                                             [&](std::uint64_t k) { return r.uniform(k); });
  s.marks[level].assign(p_.b[level], false);
  s.cursor[level] = 0;
}

RtState RtAutomaton::make_initial(Randomness& r) const {
  RtState s;
  s.lists.resize(p_.d);
  s.marks.resize(p_.d);
  s.cursor.assign(p_.d, 0);
  for (std::size_t i = 0; i < p_.d; ++i) {
    s.entry_bits.push_back(bits_for(p_.w[i]));
    resample(s, i, r);
  }
  return s;
}

void RtAutomaton::step(RtState& s, Item input, Randomness& r) const {
  if (s.aborted) return;
  std::array<std::uint64_t, kMaxDepth> path{};
  if (!p_.path_of(input, std::span(path.data(), p_.d))) return;

  std::size_t mismatch = p_.d;
  for (std::size_t i = 0; i < p_.d; ++i) {
    if (path[i] != s.lists[i][s.cursor[i]]) {
      mismatch = i;
      break;
    }
  }

  if (mismatch == p_.d) {
    // The current leaf was seen: retire it, climbing while levels fill up.
    for (std::size_t i = p_.d; i-- > 0;) {
      auto& marks = s.marks[i];
      marks[s.cursor[i]] = true;
      std::size_t c = s.cursor[i] + 1;
      while (c < marks.size() && marks[c]) ++c;
      if (c < marks.size()) {
        s.cursor[i] = c;
        return;
      }
      if (i == 0) {
        for (std::size_t j = 0; j < p_.d; ++j) {
          s.lists[j].assign(p_.b[j], 1);
          s.marks[j].assign(p_.b[j], false);
          s.cursor[j] = 0;
        }
        s.aborted = true;
        return;
      }
      resample(s, i, r);
    }
    return;
  }

  // A future sibling was seen: mark it unsafe.
  const auto& list = s.lists[mismatch];
  auto it = std::find(list.begin(), list.end(), path[mismatch]);
  if (it != list.end()) s.marks[mismatch][static_cast<std::size_t>(it - list.begin())] = true;
}

Output RtAutomaton::emit(const RtState& s, Randomness&) const {
  if (s.aborted) return Output::abort();
  std::array<std::uint64_t, kMaxDepth> path{};
  for (std::size_t i = 0; i < p_.d; ++i) path[i] = s.lists[i][s.cursor[i]];
  return Output::of(p_.index_of(std::span<const std::uint64_t>(path.data(), p_.d)));
}

AutomatonPtr rt_mif(RtParams p) { return std::make_shared<RtAutomaton>(std::move(p)); }

}  // namespace mif
