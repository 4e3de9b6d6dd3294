#include "mif/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "mif/algorithms.hpp"

namespace mif {

namespace {

double lg(double x) { return std::log2(x); }

void check_delta(double delta) {
  if (!(delta >= 0 && delta < 1)) throw PreconditionError("bound: needs 0 <= delta < 1");
}

}  // namespace

double rt_lb_exponent(Item n, std::size_t ell, std::size_t k) {
  const double c = lg(static_cast<double>(n)) / lg(static_cast<double>(ell));
  const double kk = static_cast<double>(k);
  return 2 * (kk + 1 - c) / (kk * kk + 3 * kk - 2);
}

RtLowerBound rt_lb(Item n, std::size_t ell, std::size_t k_limit) {
  if (ell < 1 || ell >= n) throw PreconditionError("rt_lb: needs 1 <= ell < n");
  RtLowerBound r;
  if (ell == 1) return r;
  const double log_ell = lg(static_cast<double>(ell));
  const double log_n = lg(static_cast<double>(n));
  if (k_limit == 0) {
    const auto by_ell = static_cast<std::size_t>(std::ceil(log_ell));
    const auto by_ratio = static_cast<std::size_t>(std::ceil(2 * log_n / log_ell)) + 2;
    k_limit = std::max(by_ell, by_ratio);
  }
  r.k_searched = k_limit;
  double best = -INFINITY;
  for (std::size_t k = 1; k <= k_limit; ++k) {
    const double e = rt_lb_exponent(n, ell, k);
    if (e > best + 1e-15) {
      best = e;
      r.witness_k = k;
    }
  }
  r.bits = std::exp2(best * log_ell);
  r.closed_form = std::exp2(15.0 / 32.0 * log_ell * log_ell / log_n);
  return r;
}

double oracle_lb(Item n, std::size_t ell, double delta) {
  check_delta(delta);
  const double l = static_cast<double>(ell);
  return l * l / (4 * static_cast<double>(n) * std::log(2.0)) + lg(1 - delta);
}

double trivial_lb(std::size_t ell) { return lg(static_cast<double>(ell) + 1); }

namespace {

double depth_ratio(Item n, std::size_t ell, std::size_t d) {
  const double dd = static_cast<double>(d);
  return std::exp2(2 * lg(4.0 * static_cast<double>(ell)) / (dd - 1) -
                   2 * lg(static_cast<double>(n) / 4) / (dd * (dd - 1)));
}

double log_inverse(double delta, double cap) { return delta > 0 ? std::min(cap, lg(1 / delta)) : cap; }

}  // namespace

RtUpperBound rt_ub_bits(Item n, std::size_t ell, double delta) {
  if (ell < 1 || ell > n) throw PreconditionError("rt_ub_bits: needs 1 <= ell <= n");
  if (!(delta >= 0 && delta <= 1)) throw PreconditionError("rt_ub_bits: delta must lie in [0,1]");
  RtUpperBound r;
  const double l = static_cast<double>(ell);
  const double log_ell = lg(l);
  r.d = rt_depth(n, ell);
  r.formula = std::ceil(depth_ratio(n, ell, r.d)) * log_ell * log_ell + log_inverse(delta, l) * log_ell;
  r.in_range = ell >= 4 && 64 * ell <= n;
  r.bits = l;
  if (r.in_range) {
    r.exact = rt_params({n, ell, delta}).level_bits();
    r.explicit_bound = rt_space_bound_explicit(n, ell, delta);
    r.bits = *r.explicit_bound;
  }
  return r;
}

double rt_space_bound_explicit(Item n, std::size_t ell, double delta) {
  if (ell < 4 || 64 * ell > n) throw PreconditionError("rt_space_bound_explicit: needs 4 <= ell <= n/64");
  const double l = static_cast<double>(ell);
  const double root = delta > 0 ? std::min(l + 1, std::ceil(3 * lg(1 / delta))) : l + 1;
  const double levels = 32 * lg(l) * std::ceil(depth_ratio(n, ell, rt_depth(n, ell)));
  return (root + levels) * std::ceil(lg(32 * l)) + 1;
}

PdLowerBound pd_lb_terms(Item n, std::size_t ell, double delta) {
  if (!(delta >= 0 && delta <= 1.0 / 3)) throw PreconditionError("pd_lb: needs 0 <= delta <= 1/3");
  if (ell > n) throw PreconditionError("pd_lb: needs ell <= n");
  PdLowerBound r;
  if (ell == 0) return r;
  const double l = static_cast<double>(ell);
  const double spread = lg(2 * static_cast<double>(n) / l);
  const double gain = delta > 0 ? lg(1 / (2 * delta)) : INFINITY;
  r.left = std::max(l / (36 * spread), std::sqrt(l / 108));
  r.right = std::max(l * gain / (17280 * spread * spread * lg(64 * static_cast<double>(n))),
                     std::pow(l * gain / 1244160, 0.25));
  r.bits = std::min(r.left, r.right);
  return r;
}

double pd_lb(Item n, std::size_t ell, double delta) { return pd_lb_terms(n, ell, delta).bits; }

RsLowerBound rs_lb_terms(Item n, std::size_t ell) {
  RsLowerBound r;
  const double l = static_cast<double>(ell);
  const double log_n = lg(static_cast<double>(n));
  r.oracle = oracle_lb(n, ell, 1.0 / 6);
  r.sqrt_term = log_n > 0 ? std::sqrt(l / (7741440 * log_n * log_n * log_n)) : 0;
  r.fifth_root = std::pow(l / 19906560, 0.2);
  r.bits = std::max({r.oracle, r.sqrt_term, r.fifth_root});
  return r;
}

double rs_lb(Item n, std::size_t ell) { return rs_lb_terms(n, ell).bits; }

std::size_t rs_reduction_z(Item n, std::size_t ell) {
  for (std::size_t z = 0;; ++z) {
    const std::size_t t = ell / (2 * z + 2);
    if (static_cast<double>(z) >= pd_lb(n, t, 1.0 / 3)) return z;
  }
}

std::vector<BoundRow> bound_rows(Item n, double delta, const std::vector<std::size_t>& ell_grid) {
  std::vector<BoundRow> rows;
  const double log_n = lg(static_cast<double>(n));
  for (std::size_t ell : ell_grid) {
    if (ell < 1 || ell > n) throw PreconditionError("bounds: ell must lie in [1, n]");
    const double l = static_cast<double>(ell);
    const double ratio = l * l / static_cast<double>(n);
    auto add = [&](std::string model, std::string dir, double bits, bool explicit_consts,
                   std::optional<std::size_t> k = std::nullopt) {
      rows.push_back({std::move(model), std::move(dir), n, ell, delta, std::max(0.0, bits), k, explicit_consts});
    };
    add("static-seed", "upper", log_n * log_n, false);
    add("oracle", "upper", (ratio + log_n) * log_n, false);
    add("oracle", "lower", oracle_lb(n, ell, delta), true);
    add("tape", "upper", rt_ub_bits(n, ell, delta).bits, true);
    if (ell < n) {
      const auto lb = rt_lb(n, ell);
      add("tape", "lower", lb.bits, false, lb.witness_k);
    } else {
      add("tape", "lower", 0, false);
    }
    add("seed", "upper", (ratio + std::sqrt(l) + log_n) * log_n, false);
    add("seed", "lower", rs_lb(n, ell), true);
    add("pseudo-det", "lower", pd_lb(n, ell, std::min(delta, 1.0 / 3)), true);
    add("det", "lower", l / lg(2 * static_cast<double>(n) / l) + std::sqrt(l), false);
    add("det", "upper", l * lg(l) / log_n + std::sqrt(l * lg(l)), false);
  }
  return rows;
}

namespace {
std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}
}  // namespace

void emit_bounds_csv(std::ostream& out, Item n, double delta, const std::vector<std::size_t>& ell_grid) {
  out << "model,direction,n,ell,delta,bits,witness_k,constants_explicit,log2_ell,log2_bits\n";
  for (const auto& r : bound_rows(n, delta, ell_grid)) {
    out << r.model << ',' << r.direction << ',' << r.n << ',' << r.ell << ',' << num(r.delta) << ',' << num(r.bits)
        << ',' << (r.witness_k ? std::to_string(*r.witness_k) : "") << ',' << (r.constants_explicit ? 1 : 0) << ','
        << num(lg(static_cast<double>(r.ell))) << ',' << (r.bits > 0 ? num(lg(r.bits)) : "") << '\n';
  }
}

}  // namespace mif
