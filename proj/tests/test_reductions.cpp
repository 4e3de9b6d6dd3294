#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "mif/algorithms.hpp"
#include "mif/engine.hpp"
#include "mif/reductions.hpp"
#include "mif/analysis.hpp"

using namespace mif;

namespace {

std::vector<Item> random_prefix(Item n, std::size_t len, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Item> x;
  for (std::size_t i = 0; i < len; ++i) x.push_back(std::uniform_int_distribution<Item>(1, n)(rng));
  return x;
}

bool disjoint(const std::vector<Item>& a, const std::vector<Item>& b) {
  return std::none_of(a.begin(), a.end(), [&](Item v) { return std::find(b.begin(), b.end(), v) != b.end(); });
}

}  // namespace

// ---- AVOID ------------------------------------------------------------------------

TEST(AvoidLb, Formula) {
  EXPECT_NEAR(avoid_lb({100, 10, 10, 0}), 100 / (100 * std::log(2.0)), 1e-12);
  EXPECT_NEAR(avoid_lb({100, 10, 10, 0}), 1.4427, 1e-4);
  EXPECT_NEAR(avoid_lb({100, 10, 10, 0.5}), avoid_lb({100, 10, 10, 0}) - 1, 1e-12);
  EXPECT_NEAR(avoid_lb({8, 2, 2, 0}), 4 / (8 * std::log(2.0)), 1e-12);
  EXPECT_THROW(avoid_lb({8, 2, 2, 1}), PreconditionError);
  EXPECT_THROW(avoid_lb({8, 0, 2, 0}), PreconditionError);
  EXPECT_THROW(avoid_lb({8, 5, 4, 0}), PreconditionError);
}

TEST(AvoidLb, ReproducesOracleBound) {
  for (Item n : {64, 500, 4096})
    for (std::size_t ell : {2, 7, 16, 33}) {
      const double delta = 0.1;
      const double lb = avoid_lb({n, (ell + 1) / 2, ell / 2 + 1, delta});
      const double target = oracle_lb(n, ell, delta);
      // ceil(l/2)(floor(l/2)+1) exceeds l^2/4 by at most (l+1)/2.
      EXPECT_GE(lb, target - 1e-12);
      EXPECT_LE(lb - target, (static_cast<double>(ell) + 1) / (2 * static_cast<double>(n) * std::log(2.0)) + 1e-12);
    }
}

TEST(Avoid, DetBitmapExhaustive) {
  const AvoidInstance inst{8, 2, 2, 0};
  const auto p = avoid_from_mif(det_bitmap_mif({8, 4, 0}), inst);
  const auto s = avoid_exhaustive(p, 1);
  EXPECT_EQ(s.runs, 28u);
  EXPECT_EQ(s.failures, 0u);
  EXPECT_EQ(s.message_bits, 5u);
  EXPECT_LE(s.max_observed_bits, s.message_bits);
  for (const auto& r : s.details) {
    EXPECT_TRUE(r.success);
    EXPECT_EQ(r.bob.size(), 2u);
    EXPECT_TRUE(disjoint(r.alice, r.bob));
    EXPECT_TRUE(std::is_sorted(r.alice.begin(), r.alice.end()));
  }
  EXPECT_GE(static_cast<double>(s.message_bits), avoid_lb(inst));
}

TEST(Avoid, RejectsMismatchedAutomaton) {
  EXPECT_THROW(avoid_from_mif(det_bitmap_mif({9, 4, 0}), {8, 2, 2, 0}), PreconditionError);
  EXPECT_THROW(avoid_from_mif(det_bitmap_mif({8, 4, 0}), {8, 0, 2, 0}), PreconditionError);
}

TEST(Avoid, ZeroMistakeAutomataStayDisjoint) {
  for (Item m = 6; m <= 10; ++m) {
    const AvoidInstance inst{m, 2, 2, 0};
    const Instance mif{m, 4, 0};
    std::vector<AutomatonPtr> algs{det_bitmap_mif(mif), oracle_list_mif(mif), seed_block_mif(mif, {2, 2, 2}),
                                   rt_mif(RtParams::custom(m, 4, 3, {2, 2}))};
    for (const auto& a : algs) {
      const auto s = avoid_exhaustive(avoid_from_mif(a, inst), 5);
      for (const auto& r : s.details) {
        if (!r.aborted) { EXPECT_TRUE(r.success) << a->name() << " m=" << m; }
        EXPECT_TRUE(disjoint(r.alice, r.bob)) << a->name();
      }
      if (s.failure_rate < 1) {
        EXPECT_GE(static_cast<double>(s.message_bits), avoid_lb({m, 2, 2, s.failure_rate})) << a->name();
      }
    }
  }
}

TEST(Avoid, SampledIsReproducible) {
  const auto p = avoid_from_mif(oracle_list_mif({40, 10, 0}), {40, 5, 5, 0});
  const auto x = avoid_sampled(p, 50, 9);
  const auto y = avoid_sampled(p, 50, 9);
  std::ostringstream a, b;
  write_avoid_csv(a, x);
  write_avoid_csv(b, y);
  EXPECT_EQ(a.str(), b.str());
  EXPECT_EQ(a.str().rfind("run,alice,bob,message_bits,observed_bits,aborted,success\n", 0), 0u);
  EXPECT_EQ(x.failures, 0u);
}

TEST(Avoid, ExhaustiveBudget) {
  const auto p = avoid_from_mif(det_bitmap_mif({30, 20, 0}), {30, 10, 10, 0});
  EXPECT_THROW(avoid_exhaustive(p, 0, 1000), BudgetExceeded);
}

// ---- FCO parameters --------------------------------------------------------------

TEST(FcoParams, UnitParameters) {
  const auto p = fco_params(4096, 64, 1, 0, 64);
  EXPECT_EQ(p.p, 1u);
  ASSERT_GE(p.d, 2u);
  EXPECT_EQ(p.t_k(2), 9u);
}

TEST(FcoParams, DerivedQuantities) {
  for (std::size_t ell : {64, 200, 1000, 5000})
    for (std::size_t z : {1, 2, 4})
      for (double delta : {1.0 / 3, 0.01, 1e-9}) {
        FcoParams p;
        try {
          p = fco_params(1 << 20, ell, z, delta, 1 << 10);
        } catch (const PreconditionError&) {
          continue;  // z outside the valid range for this ell
        }
        const auto tk = static_cast<std::size_t>(std::ceil(4 * std::log(2.0) * static_cast<double>(z * p.p + 2)));
        for (std::size_t k = 2; k <= p.d; ++k) {
          EXPECT_EQ(p.t_k(k), tk);
          EXPECT_LE(p.t_k(k), 9 * z * p.p);
        }
        EXPECT_EQ(std::accumulate(p.t.begin(), p.t.end(), std::size_t{0}), ell);
        EXPECT_GE(2 * p.t_k(1), ell);
        EXPECT_EQ(p.w_k(1), p.t_k(1) + 1);
        for (std::size_t k = 2; k <= p.d; ++k) EXPECT_EQ(p.w_k(k), 2 * p.w_k(k - 1));
        EXPECT_NEAR(p.eps, std::pow(2 * delta, static_cast<double>(p.p) / 30), 1e-15);
        for (std::size_t k = 1; k <= p.d; ++k) {
          const double want = static_cast<double>(p.w_k(k)) * std::pow(64.0 * 1024, static_cast<double>(k - 1)) * p.eps;
          EXPECT_NEAR(p.eps_k[k - 1], want, 1e-9 * want);
          std::size_t tail = 0;
          for (std::size_t j = k + 1; j <= p.d; ++j) tail += p.t_k(j);
          EXPECT_EQ(p.prefix_length(k), tail);
        }
      }
}

TEST(FcoParams, Rejections) {
  EXPECT_THROW(fco_params(4096, 64, 0, 0.1, 64), PreconditionError);
  EXPECT_THROW(fco_params(4096, 64, 1, 0.5, 64), PreconditionError);
  EXPECT_THROW(fco_params(64, 65, 1, 0.1, 64), PreconditionError);
  EXPECT_THROW(fco_params(64, 32, 1, 0.1, 65), PreconditionError);
}

// ---- output functions ----------------------------------------------------------

TEST(OutputFunction, MinMissing) {
  const auto b = canonical_min_missing(10, 4);
  EXPECT_EQ(b(std::vector<Item>{1, 2}), 3u);
  EXPECT_EQ(b(std::vector<Item>{}), 1u);
  EXPECT_EQ(b(std::vector<Item>{2, 2, 1, 4}), 3u);
  EXPECT_TRUE(b.canonical());
}

TEST(OutputFunction, NoisyWrapper) {
  const auto b = canonical_min_missing(30, 6);
  const auto same = noisy(b, 0, 4, 30);
  const auto flip = noisy(canonical_min_missing(2, 1), 1, 4, 2);
  const auto some = noisy(b, 0.3, 4, 30);
  std::size_t changed = 0;
  for (std::uint64_t seed = 0; seed < 2000; ++seed) {
    const auto x = random_prefix(30, 6, seed);
    EXPECT_EQ(same(x), b(x));
    EXPECT_EQ(some(x), some(x));
    changed += some(x) != b(x);
  }
  EXPECT_NEAR(changed / 2000.0, 0.3, 3 * wilson_half_width(changed, 2000));
  EXPECT_EQ(flip(std::vector<Item>{}), 2u);
  EXPECT_EQ(flip(std::vector<Item>{1}), 1u);
  EXPECT_FALSE(some.canonical());
}

TEST(ThresholdMatrix, PureAndInRange) {
  const ThresholdMatrix c(17);
  for (std::size_t k = 1; k < 5; ++k)
    for (std::size_t h = 1; h < 5; ++h) {
      EXPECT_GE(c.at(k, h), 1);
      EXPECT_LT(c.at(k, h), 2);
      EXPECT_EQ(c.at(k, h), ThresholdMatrix(17).at(k, h));
    }
  EXPECT_NE(c.at(2, 1), c.at(2, 2));
  EXPECT_EQ(ThresholdMatrix::constant(1.25).at(3, 9), 1.25);
  EXPECT_THROW(ThresholdMatrix::constant(2), PreconditionError);
}

// ---- FindCommonOutputs ---------------------------------------------------------

TEST(Fco, BaseCaseHandTrace) {
  std::vector<Item> s(64);
  std::iota(s.begin(), s.end(), Item{1});
  const auto prm = FcoParams::custom(64, {8}, s);
  const auto r = fco(canonical_min_missing(64, 8), ThresholdMatrix(1), {}, 1, prm);
  // Padding is all 1s: outputs run 2, 3, ..., 9, and once every 1 is
  // overwritten the last one is 1.
  std::vector<Item> want(9);
  std::iota(want.begin(), want.end(), Item{1});
  EXPECT_EQ(r.set, want);
  EXPECT_FALSE(r.failed);
  ASSERT_EQ(r.trace.size(), 1u);
  EXPECT_EQ(r.trace[0].exit, "base");
}

TEST(Fco, BaseCaseDisjointFromPrefix) {
  std::vector<Item> s(64);
  std::iota(s.begin(), s.end(), Item{1});
  const auto prm = FcoParams::custom(64, {8, 8}, s);
  const auto b = canonical_min_missing(64, 16);
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto x = random_prefix(64, prm.prefix_length(1), seed);
    const auto r = fco(b, ThresholdMatrix(seed), x, 1, prm);
    EXPECT_FALSE(r.failed);
    EXPECT_EQ(r.set.size(), prm.w_k(1));
    EXPECT_EQ(std::set<Item>(r.set.begin(), r.set.end()).size(), r.set.size());
    EXPECT_TRUE(disjoint(r.set, x));
  }
}

TEST(Fco, FailureExitsKeepTheSize) {
  std::vector<Item> s{3, 5, 7, 9, 11, 13, 15, 17, 19, 21};
  const auto prm = FcoParams::custom(32, {3, 2}, s);
  const OutputFunction stuck("stuck", false, [](std::span<const Item>) -> Item { return 1; });
  const auto base = fco(stuck, ThresholdMatrix(0), {9, 9}, 1, prm);
  EXPECT_TRUE(base.failed);
  EXPECT_EQ(base.set, (std::vector<Item>{3, 5, 7, 9}));
  EXPECT_EQ(base.trace.back().exit, "base-failure");
  const auto step = fco(stuck, ThresholdMatrix(0), {}, 2, prm);
  EXPECT_EQ(step.set.size(), prm.w_k(2));
  EXPECT_TRUE(step.any_failed);
}

TEST(Fco, SecondLevelOnMinMissing) {
  std::vector<Item> s(24);
  std::iota(s.begin(), s.end(), Item{1});
  const auto prm = FcoParams::custom(24, {3, 2}, s);
  const auto r = fco(canonical_min_missing(24, 5), ThresholdMatrix(5), {}, 2, prm);
  EXPECT_EQ(r.set.size(), prm.w_k(2));
  EXPECT_EQ(std::set<Item>(r.set.begin(), r.set.end()).size(), r.set.size());
  for (Item v : r.set) EXPECT_TRUE(v >= 1 && v <= 24);
  EXPECT_GT(r.calls, 1u);
  std::ostringstream csv;
  write_fco_csv(csv, r);
  EXPECT_EQ(csv.str().rfind("k,prefix_length,round,q_size,p_size,exit\n", 0), 0u);
  // Canonical runs are pure: same thresholds, same answer.
  EXPECT_EQ(fco(canonical_min_missing(24, 5), ThresholdMatrix(5), {}, 2, prm).set, r.set);
}

TEST(Fco, CallBudget) {
  std::vector<Item> s(24);
  std::iota(s.begin(), s.end(), Item{1});
  const auto prm = FcoParams::custom(24, {3, 2}, s);
  EXPECT_THROW(fco(canonical_min_missing(24, 5), ThresholdMatrix(5), {}, 2, prm, 3), BudgetExceeded);
  EXPECT_THROW(fco(canonical_min_missing(24, 5), ThresholdMatrix(5), {1}, 2, prm), PreconditionError);
}

TEST(Fco, NoisyBaseCaseMismatchRate) {
  std::vector<Item> s(64);
  std::iota(s.begin(), s.end(), Item{1});
  const auto prm = FcoParams::custom(64, {8, 8}, s);
  const auto clean = canonical_min_missing(64, 16);
  const double eps = 0.02;
  std::size_t mismatches = 0;
  const std::size_t trials = 1000;
  for (std::uint64_t seed = 0; seed < trials; ++seed) {
    const auto x = random_prefix(64, 8, seed);
    const auto want = fco(clean, ThresholdMatrix(seed), x, 1, prm).set;
    const auto got = fco(noisy(clean, eps, seed + 1, 64), ThresholdMatrix(seed), x, 1, prm).set;
    mismatches += got != want;
  }
  EXPECT_LE(static_cast<double>(mismatches) / trials, 9 * eps + wilson_half_width(mismatches, trials));
}
