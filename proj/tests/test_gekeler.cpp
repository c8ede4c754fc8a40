#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "oracles.hpp"
#include "satocensus/classno.hpp"
#include "satocensus/gekeler.hpp"

using namespace satocensus;

TEST(LocalFactor, Examples) {
  EXPECT_EQ(v_l(3, -7).value, Rational(3, 4));
  auto f = v_l(3, -63);
  EXPECT_EQ(f.value, Rational(5, 4));
  EXPECT_EQ(f.delta_exp, 1);
  EXPECT_EQ(static_cast<int>(f.symbol), -1);
  auto g = v_l(2, -16);
  EXPECT_EQ(g.value, Rational(3, 2));
  EXPECT_EQ(g.delta_exp, 1);
  EXPECT_EQ(static_cast<int>(g.symbol), 0);
  EXPECT_THROW(v_l(3, 5), std::invalid_argument);
  EXPECT_THROW(v_l(3, -6), std::invalid_argument);
  EXPECT_THROW(v_l(4, -7), std::invalid_argument);
}

TEST(LocalFactor, MatchesLiteralFormulaAndBounds) {
  for (i64 l : primes_up_to(50)) {
    const Rational L(static_cast<long>(l));
    const Rational lo = 1 / (1 + 1 / L), hi = 1 / (1 - 1 / L);
    for (i64 D = -20000; D < 0; ++D) {
      if (floor_mod(D, 4) > 1) continue;
      Rational v = v_l(l, D).value;
      ASSERT_EQ(v, oracle::v_l_literal(l, D)) << l << " " << D;
      ASSERT_LE(lo, v);
      ASSERT_LE(v, hi);
      if (D % (l * l) != 0) { ASSERT_EQ(v, 1 / (1 - kronecker(D, l) / L)); }
    }
  }
}

TEST(TruncatedFactor, Examples) {
  EXPECT_EQ(v_lk(3, 1, -7), Rational(3, 4));
  EXPECT_EQ(v_lk(3, 1, -9), Rational(3, 2));
  // -9 is not a discriminant; v_lk still takes it
  EXPECT_EQ(v_lk(3, 2, -9), local_factor_unchecked(3, -9).value);
  EXPECT_EQ(v_lk(5, 3, 0), Rational(5, 4));
  EXPECT_THROW(v_lk(3, 0, -7), std::invalid_argument);
}

TEST(TruncatedFactor, PeriodicInTrace) {
  for (i64 p : {5, 7, 101, 1000003}) {
    for (i64 l : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97}) {
      for (int k = 1;; ++k) {
        i64 M = 1;
        for (int i = 0; i < 2 * k; ++i) M *= l;
        if (M > 10000) break;
        for (i64 t = 0; t < M; ++t) {
          i64 D1 = t * t - 4 * p, D2 = (t + M) * (t + M) - 4 * p;
          if (D1 == 0 || D2 == 0) continue;
          ASSERT_EQ(v_lk(l, k, D1), v_lk(l, k, D2)) << p << " " << l << " " << k << " " << t;
        }
      }
    }
  }
}

// |log v_{l,k} - log v_l| <= 2 l^-k
TEST(TruncatedFactor, CloseToUntruncated) {
  for (i64 l : {2, 3, 5, 7}) {
    for (int k = 1; k <= 4; ++k) {
      const double bound = 2 * std::pow(static_cast<double>(l), -k);
      for (i64 D = -30000; D < 0; ++D) {
        if (floor_mod(D, 4) > 1) continue;
        double d = std::fabs(std::log(v_lk(l, k, D).get_d()) - std::log(v_l(l, D).value.get_d()));
        ASSERT_LE(d, bound) << l << " " << k << " " << D;
      }
    }
  }
}

TEST(TruncatedProduct, Examples) {
  EXPECT_EQ(truncated_product(2, 5, 3), Rational(3, 2));
  EXPECT_EQ(truncated_product(2, 5, 2), Rational(1));
  EXPECT_EQ(truncated_product(2, 5, 8), Rational(315, 256));
  EXPECT_THROW(truncated_product(5, 5, 8), std::invalid_argument);
}

TEST(Estimate, Examples) {
  CutoffPlan plan;
  plan.l0 = 8;
  EXPECT_NEAR(gekeler_estimate(2, 5, plan), 4 / M_PI * 315.0 / 256.0, 1e-12);
  EXPECT_NEAR(gekeler_estimate(2, 5, plan), 1.566, 1e-3);
  plan.l0 = 2;
  EXPECT_NEAR(gekeler_estimate(1, 5, plan), std::sqrt(19.0) / M_PI, 1e-12);
  plan.l0 = 20000;
  EXPECT_NEAR(gekeler_estimate(2, 5, plan), 1.5, 0.02);
}

TEST(Estimate, MedianErrorDecreasesWithCutoff) {
  const i64 p = 1000003, T = isqrt(4 * p);
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<i64> pick(-T + 1, T - 1);
  std::vector<i64> ts(60);
  for (auto& t : ts) t = pick(rng);
  double prev = 1e9;
  for (i64 l0 : {10, 100, 1000, 10000}) {
    std::vector<double> errs;
    CutoffPlan plan;
    plan.l0 = l0;
    for (i64 t : ts) {
      double h = hurwitz_class_number(t * t - 4 * p).get_d();
      errs.push_back(std::fabs(gekeler_estimate(t, p, plan) - h) / h);
    }
    std::nth_element(errs.begin(), errs.begin() + errs.size() / 2, errs.end());
    double med = errs[errs.size() / 2];
    EXPECT_LT(med, prev) << l0;
    prev = med;
  }
}

TEST(TailLog, Examples) {
  auto a = tail_log_product(2, 5, 3, 8);
  EXPECT_NEAR(a.total, std::log(0.75) + std::log(1.25) + std::log(0.875), 1e-12);
  EXPECT_NEAR(a.total, -0.198, 1e-3);
  double s = 0;
  for (const auto& b : a.buckets) s += b.sum;
  EXPECT_DOUBLE_EQ(s, a.total);
  EXPECT_EQ(tail_log_product(2, 5, 50, 50).total, 0.0);
  EXPECT_THROW(tail_log_product(2, 5, 3, 2'000'000), std::invalid_argument);
}

TEST(TailLog, DyadicBuckets) {
  auto a = tail_log_product(17, 1000003, 2, 5000);
  std::size_t primes = 0;
  for (const auto& b : a.buckets) primes += b.primes;
  EXPECT_EQ(primes, primes_up_to(5000).size());
  for (std::size_t i = 1; i < a.buckets.size(); ++i) EXPECT_EQ(a.buckets[i].n, a.buckets[i - 1].n + 1);
  Rational exact = truncated_product(17, 1000003, 5000);
  EXPECT_NEAR(a.total, std::log(exact.get_d()), 1e-9);
}

TEST(Cutoff, Examples) {
  EXPECT_EQ(cutoff_l0(1000000, CutoffMode::grh_poly, 3).l0, 2637);
  EXPECT_EQ(cutoff_l0(1000000, CutoffMode::unconditional, 3, 1).l0, 140);
  EXPECT_THROW(cutoff_l0(1000000, CutoffMode::grh_poly, 0), std::invalid_argument);
  EXPECT_THROW(cutoff_l0(13, CutoffMode::grh_poly, 3), std::invalid_argument);
  EXPECT_THROW(cutoff_l0(1000000, CutoffMode::unconditional, 3, 0), std::invalid_argument);
}

TEST(Period, Examples) {
  EXPECT_EQ(period_T(3, 1), BigInt(4));
  EXPECT_EQ(period_T(4, 1), BigInt(36));
  EXPECT_EQ(period_T(6, 2), BigInt(810000));
}

// Over one full period the factors at distinct l are independent: the joint
// histogram equals the product of the marginals.
TEST(Period, FactorsIndependentOverPeriod) {
  for (i64 p : {7, 101, 1000003}) {
    for (i64 l1 : {4, 6})
      for (int k : {1, 2}) {
        const auto ls = primes_up_to(l1);
        const i64 T = period_T(l1, k).get_si();
        std::vector<std::map<Rational, i64>> marg(ls.size());
        std::map<std::vector<Rational>, i64> joint;
        for (i64 t = 0; t < T; ++t) {
          std::vector<Rational> key;
          for (std::size_t i = 0; i < ls.size(); ++i) {
            key.push_back(v_lk(ls[i], k, t * t - 4 * p));
            marg[i][key.back()] += 1;
          }
          joint[key] += 1;
        }
        std::size_t cells = 1;
        for (const auto& m : marg) cells *= m.size();
        ASSERT_EQ(joint.size(), cells);
        for (const auto& [key, n] : joint) {
          BigInt lhs = BigInt(static_cast<long>(n));
          BigInt rhs = 1;
          for (std::size_t i = 0; i < ls.size(); ++i) {
            rhs *= static_cast<long>(marg[i][key[i]]);
            if (i) lhs *= static_cast<long>(T);
          }
          ASSERT_EQ(lhs, rhs) << p << " " << l1 << " " << k;
        }
      }
  }
}
