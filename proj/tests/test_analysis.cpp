#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "mif/adversaries.hpp"
#include "mif/algorithms.hpp"
#include "mif/analysis.hpp"
#include "mif/engine.hpp"

using namespace mif;

namespace {

double lg(double x) { return std::log2(x); }

// (ell^{k+1}/n)^{2/(k^2+3k-2)} evaluated directly, in bits.
double rt_term(double n, double ell, int k) {
  return std::exp2(2.0 * ((k + 1) * lg(ell) - lg(n)) / (k * k + 3 * k - 2));
}

std::vector<std::pair<Item, std::size_t>> grid100() {
  std::vector<std::pair<Item, std::size_t>> g;
  for (int ln = 8; ln <= 62 && g.size() < 100; ln += 6)
    for (int le = 2; le < ln && g.size() < 100; le += 5) g.emplace_back(Item{1} << ln, std::size_t{1} << le);
  for (Item n = 1000; g.size() < 100; n = n * 3 + 1) g.emplace_back(n, static_cast<std::size_t>(std::sqrt(n)) + 3);
  return g;
}

}  // namespace

TEST(RtLb, SquareRootLandmark) {
  for (int e = 4; e <= 10; ++e) {
    const std::size_t ell = std::size_t{1} << e;
    const auto r = rt_lb(Item{ell} * ell, ell);
    ASSERT_TRUE(r.witness_k.has_value());
    EXPECT_TRUE(*r.witness_k == 2 || *r.witness_k == 3);
    EXPECT_DOUBLE_EQ(rt_lb_exponent(Item{ell} * ell, ell, *r.witness_k), 0.25);
    EXPECT_NEAR(r.bits, std::pow(static_cast<double>(ell), 0.25), 1e-9);
  }
}

TEST(RtLb, MatchesDirectMaximum) {
  for (const auto& [n, ell] : grid100()) {
    if (ell >= n || ell > (std::size_t{1} << 20)) continue;
    const auto r = rt_lb(n, ell);
    double best = 0;
    for (int k = 1; k <= 400; ++k) best = std::max(best, rt_term(static_cast<double>(n), static_cast<double>(ell), k));
    EXPECT_NEAR(r.bits, best, 1e-9 * best) << n << ' ' << ell;
  }
}

TEST(RtLb, RatioMinimisedAtSeven) {
  int arg = 0;
  double best = INFINITY;
  for (int k = 1; k < 1000; ++k) {
    const double v = static_cast<double>(k * k + k + 4) / ((k + 1) * (k + 1));
    if (v < best - 1e-15) best = v, arg = k;
  }
  EXPECT_EQ(arg, 7);
  EXPECT_DOUBLE_EQ(best, 15.0 / 16);
}

TEST(RtLb, ClosedFormNeverExceedsMaximum) {
  const auto g = grid100();
  ASSERT_EQ(g.size(), 100u);
  for (const auto& [n, ell] : g) {
    if (ell >= n) continue;
    const auto r = rt_lb(n, ell);
    EXPECT_NEAR(r.closed_form, std::pow(static_cast<double>(ell), 15.0 / 32 * lg(ell) / lg(n)), 1e-9 * r.closed_form);
    EXPECT_LE(r.closed_form, r.bits * (1 + 1e-12)) << n << ' ' << ell;
  }
}

TEST(RtLb, WitnessStableUnderWiderSearch) {
  for (const auto& [n, ell] : grid100()) {
    if (ell >= n || ell < 2) continue;
    const auto r = rt_lb(n, ell);
    const auto wide = rt_lb(n, ell, 2 * r.k_searched);
    EXPECT_EQ(r.witness_k, wide.witness_k);
    EXPECT_EQ(r.bits, wide.bits);
  }
}

TEST(RtLb, Domain) {
  EXPECT_THROW(rt_lb(16, 16), PreconditionError);
  const auto one = rt_lb(16, 1);
  EXPECT_EQ(one.bits, 0);
  EXPECT_FALSE(one.witness_k.has_value());
}

TEST(OracleLb, Examples) {
  EXPECT_NEAR(oracle_lb(100, 20, 0), 400 / (400 * std::log(2.0)), 1e-12);
  EXPECT_NEAR(oracle_lb(100, 20, 0), 1.4427, 1e-4);
  EXPECT_NEAR(oracle_lb(100, 20, 0.5), oracle_lb(100, 20, 0) - 1, 1e-12);
  EXPECT_THROW(oracle_lb(100, 20, 1), PreconditionError);
}

TEST(OracleLb, BelowTapeBoundWhenFirstTermWins) {
  // With k = 1 the tape bound is ell^2/n, which dominates ell^2/(4n ln 2).
  for (const auto& [n, ell] : grid100()) {
    if (ell >= n) continue;
    const auto r = rt_lb(n, ell);
    if (r.witness_k == 1u) { EXPECT_LE(oracle_lb(n, ell, 0), r.bits); }
  }
}

TEST(TrivialLb, Examples) {
  EXPECT_EQ(trivial_lb(1), 1);
  EXPECT_EQ(trivial_lb(7), 3);
  EXPECT_EQ(trivial_lb(0), 0);
}

TEST(RtUb, WorkedExample) {
  const auto r = rt_ub_bits(4096, 64, 0.1);
  ASSERT_TRUE(r.in_range);
  EXPECT_EQ(r.d, 2u);
  // 65 entries of width log2(2*1024) plus one of width log2(2*1).
  EXPECT_DOUBLE_EQ(*r.exact, 65 * 11.0 + 1);
  EXPECT_EQ(r.bits, *r.explicit_bound);
}

TEST(RtUb, ExactBelowPerEntryBound) {
  for (std::size_t ell = 4; ell <= 256; ell *= 2)
    for (Item n = 64 * ell; n <= (Item{1} << 20); n *= 2)
      for (double delta : {0.1, 1e-5}) {
        const auto p = rt_params({n, ell, delta});
        const auto r = rt_ub_bits(n, ell, delta);
        double loose = 0;
        for (auto b : p.b) loose += static_cast<double>(b) * lg(32.0 * static_cast<double>(ell));
        EXPECT_LE(*r.exact, loose + 1e-9);
        EXPECT_LE(*r.exact, *r.explicit_bound);
      }
}

TEST(RtUb, ErrorTermVanishesAtTrivialError) {
  const auto r = rt_ub_bits(1 << 16, 64, 1.0);
  const double ratio_part = r.formula;
  const auto tight = rt_ub_bits(1 << 16, 64, 0.25);
  EXPECT_NEAR(tight.formula - ratio_part, 2 * lg(64), 1e-12);
}

TEST(RtUb, FallbackOutsideRange) {
  const auto r = rt_ub_bits(100, 10, 0.1);
  EXPECT_FALSE(r.in_range);
  EXPECT_EQ(r.bits, 10);
  EXPECT_FALSE(r.exact.has_value());
  EXPECT_THROW(rt_space_bound_explicit(100, 10, 0.1), PreconditionError);
}

TEST(RtUb, MeasuredWidthWithinExplicitBound) {
  for (auto [n, ell] : std::vector<std::pair<Item, std::size_t>>{{4096, 64}, {1 << 16, 32}, {1 << 20, 256}}) {
    const Instance inst{n, ell, 0.05};
    const auto a = rt_mif(rt_params(inst));
    const auto e = estimate_error(*a, *mixed_adversary(n, 0.5), inst, 40, 2);
    EXPECT_LE(static_cast<double>(e.space.max_observed_bits), rt_space_bound_explicit(n, ell, 0.05));
    EXPECT_LE(e.space.max_observed_bits, e.space.declared_bits);
  }
}

TEST(PdLb, HalfUniverseLeftBranch) {
  for (std::size_t ell : {1000, 100000, 10000000}) {
    const auto r = pd_lb_terms(2 * ell, ell, 1.0 / 3);
    // log(2n/ell) = 2, so the linear branch is ell/72.
    EXPECT_NEAR(r.left, static_cast<double>(ell) / 72, 1e-9 * static_cast<double>(ell));
  }
}

TEST(PdLb, NonIncreasingInN) {
  for (std::size_t ell : {64, 1000, 50000})
    for (double delta : {1.0 / 3, 0.01, 1e-9}) {
      double prev = INFINITY;
      for (Item n = ell; n <= (Item{1} << 40); n *= 2) {
        const double v = pd_lb(n, ell, delta);
        EXPECT_LE(v, prev + 1e-12);
        prev = v;
      }
    }
}

TEST(PdLb, Domain) {
  EXPECT_THROW(pd_lb(100, 10, 0.34), PreconditionError);
  EXPECT_EQ(pd_lb(100, 0, 0.1), 0);
}

TEST(RsLb, DegenerateEll) { EXPECT_LT(rs_lb(1 << 20, 1), 0.1); }

TEST(RsLb, ConstantsFromTheReduction) {
  EXPECT_EQ(8 * 2 * 17280, 276480);
  EXPECT_EQ(276480 * 28, 7741440);
  EXPECT_EQ(8 * 2 * 1244160, 19906560);
  // (log 2n)^2 log 64n <= 28 (log n)^3 once n >= 2.
  for (double n = 2; n < 1e18; n *= 1.7) EXPECT_LE(std::pow(lg(2 * n), 2) * lg(64 * n), 28 * std::pow(lg(n), 3) + 1e-9);
  const auto r = rs_lb_terms(1 << 20, 1 << 30);
  EXPECT_NEAR(r.sqrt_term, std::sqrt(std::pow(2.0, 30) / (7741440.0 * 8000)), 1e-12);
  EXPECT_NEAR(r.fifth_root, std::pow(std::pow(2.0, 30) / 19906560, 0.2), 1e-12);
  EXPECT_NEAR(r.oracle, oracle_lb(1 << 20, 1 << 30, 1.0 / 6), 1e-9);
}

TEST(RsLb, ReductionSolverAgreesWithClosedForm) {
  std::size_t points = 0;
  for (Item n = 1 << 10; n <= (Item{1} << 60) && points < 50; n <<= 5)
    for (std::size_t ell = 16; ell <= n && ell < (std::size_t{1} << 40) && points < 50; ell <<= 3, ++points) {
      const auto z = static_cast<double>(rs_reduction_z(n, ell));
      const auto r = rs_lb_terms(n, ell);
      EXPECT_GE(z, std::max(r.sqrt_term, r.fifth_root) - 1) << n << ' ' << ell;
      const std::size_t t = ell / (2 * static_cast<std::size_t>(z) + 2);
      EXPECT_GE(z, pd_lb(n, t, 1.0 / 3));
    }
  EXPECT_EQ(points, 50u);
}

TEST(Bounds, RowsMatchPointFunctions) {
  const Item n = 1 << 20;
  const double delta = 1.0 / (1024.0 * 1024 * 1024 * 1024);
  std::vector<std::size_t> grid;
  for (std::size_t l = 2; l <= n / 64; l *= 2) grid.push_back(l);
  const auto rows = bound_rows(n, delta, grid);
  ASSERT_EQ(rows.size(), grid.size() * 10);
  std::set<std::pair<std::string, std::string>> curves;
  for (const auto& r : rows) {
    curves.insert({r.model, r.direction});
    EXPECT_GE(r.bits, 0);
    if (r.model == "tape" && r.direction == "lower") { EXPECT_EQ(r.bits, rt_lb(n, r.ell).bits); }
    if (r.model == "tape" && r.direction == "upper") { EXPECT_EQ(r.bits, rt_ub_bits(n, r.ell, delta).bits); }
    if (r.model == "oracle" && r.direction == "lower") { EXPECT_EQ(r.bits, std::max(0.0, oracle_lb(n, r.ell, delta))); }
    if (r.model == "seed" && r.direction == "lower") { EXPECT_EQ(r.bits, std::max(0.0, rs_lb(n, r.ell))); }
    if (r.model == "pseudo-det") { EXPECT_EQ(r.bits, std::max(0.0, pd_lb(n, r.ell, delta))); }
  }
  for (const char* model : {"det", "seed", "tape", "oracle", "pseudo-det", "static-seed"})
    EXPECT_TRUE(curves.count({model, "lower"}) || curves.count({model, "upper"})) << model;
  EXPECT_EQ(curves.size(), 10u);
}

TEST(Bounds, SqrtRowCarriesQuarterExponent) {
  const auto rows = bound_rows(1 << 20, 1e-12, {1024});
  bool found = false;
  for (const auto& r : rows)
    if (r.model == "tape" && r.direction == "lower") {
      found = true;
      EXPECT_DOUBLE_EQ(rt_lb_exponent(1 << 20, 1024, *r.witness_k), 0.25);
      EXPECT_NEAR(r.bits, std::pow(1024.0, 0.25), 1e-9);
    }
  EXPECT_TRUE(found);
}

TEST(Bounds, CsvGoldenAndStable) {
  const Item n = 1 << 20;
  const double delta = 1.0 / (static_cast<double>(n) * static_cast<double>(n));
  std::vector<std::size_t> grid;
  for (std::size_t l = 2; l < n; l *= 2) grid.push_back(l);
  std::ostringstream a, b;
  emit_bounds_csv(a, n, delta, grid);
  emit_bounds_csv(b, n, delta, grid);
  EXPECT_EQ(a.str(), b.str());
  std::ifstream in(std::string(MIF_GOLDEN_DIR) + "/bounds_n2p20.csv");
  ASSERT_TRUE(in) << "golden file missing";
  std::stringstream golden;
  golden << in.rdbuf();
  EXPECT_EQ(a.str(), golden.str());
  EXPECT_EQ(a.str().rfind("model,direction,n,ell,delta,bits,witness_k,constants_explicit,log2_ell,log2_bits\n", 0), 0u);
  EXPECT_THROW(emit_bounds_csv(a, n, delta, {n + 1}), PreconditionError);
}
