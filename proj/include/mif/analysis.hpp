#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mif/core.hpp"

namespace mif {

// All logarithms are base 2 unless a name says otherwise.

struct RtLowerBound {
  double bits = 0;                 // max over k of (ell^{k+1}/n)^{2/(k^2+3k-2)}
  std::optional<std::size_t> witness_k;  // smallest maximising k
  double closed_form = 0;          // ell^{(15/32) log ell / log n}
  std::size_t k_searched = 0;
};

// One term of the max, as a power of ell: 2(k+1-log_ell n)/(k^2+3k-2).
double rt_lb_exponent(Item n, std::size_t ell, std::size_t k);
RtLowerBound rt_lb(Item n, std::size_t ell, std::size_t k_limit = 0);

double oracle_lb(Item n, std::size_t ell, double delta);
double trivial_lb(std::size_t ell);

struct RtUpperBound {
  std::size_t d = 0;
  double formula = 0;  // ceil((4l)^{2/(d-1)} / (n/4)^{2/(d(d-1))}) (log l)^2 + min(l, log 1/delta) log l
  std::optional<double> exact;     // sum b_i log(2 w_i) from rt_params, when defined
  std::optional<double> explicit_bound;  // constant-explicit bound, when defined
  bool in_range = false;           // 4 <= ell <= n/64
  double bits = 0;                 // explicit bound in range, else the ell-bit fallback
};

RtUpperBound rt_ub_bits(Item n, std::size_t ell, double delta);

// (min(ell+1, ceil(3 log 1/delta)) + 32 log ell * ceil(ratio)) * ceil(log(32 ell)) + 1,
// covering the per-entry flag bits and the abort bit of the implementation.
double rt_space_bound_explicit(Item n, std::size_t ell, double delta);

struct PdLowerBound {
  double left = 0;   // max(ell/(36 log(2n/ell)), sqrt(ell/108))
  double right = 0;  // max(ell log(1/2delta)/(17280 log(2n/ell)^2 log(64n)), (ell log(1/2delta)/1244160)^{1/4})
  double bits = 0;   // min(left, right)
};

PdLowerBound pd_lb_terms(Item n, std::size_t ell, double delta);
double pd_lb(Item n, std::size_t ell, double delta);

struct RsLowerBound {
  double oracle = 0;      // oracle_lb(n, ell, 1/6)
  double sqrt_term = 0;   // sqrt(ell / (7741440 (log n)^3))
  double fifth_root = 0;  // (ell / 19906560)^{1/5}
  double bits = 0;
};

RsLowerBound rs_lb_terms(Item n, std::size_t ell);
double rs_lb(Item n, std::size_t ell);
// Smallest integer z >= 0 with z >= pd_lb(n, floor(ell/(2z+2)), 1/3).
std::size_t rs_reduction_z(Item n, std::size_t ell);

struct BoundRow {
  std::string model;      // static-seed, oracle, tape, seed, pseudo-det, det
  std::string direction;  // lower, upper
  Item n = 0;
  std::size_t ell = 0;
  double delta = 0;
  double bits = 0;
  std::optional<std::size_t> witness_k;
  bool constants_explicit = false;
};

// Ten curves per ell, in a fixed order.
std::vector<BoundRow> bound_rows(Item n, double delta, const std::vector<std::size_t>& ell_grid);
void emit_bounds_csv(std::ostream& out, Item n, double delta, const std::vector<std::size_t>& ell_grid);

}  // namespace mif
