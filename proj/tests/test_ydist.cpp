#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "satocensus/gekeler.hpp"
#include "satocensus/ydist.hpp"

using namespace satocensus;

namespace {

std::vector<PrimeClass> all_classes(i64 l) {
  if (l == 2)
    return {PrimeClass::two_adic(TwoAdicCase::p_is_2), PrimeClass::two_adic(TwoAdicCase::three_mod_4),
            PrimeClass::two_adic(TwoAdicCase::five_mod_8), PrimeClass::two_adic(TwoAdicCase::one_mod_8)};
  return {PrimeClass::odd(l, -1), PrimeClass::odd(l, 0), PrimeClass::odd(l, 1)};
}

Rational R(long a, long b = 1) { return Rational(a, b); }

// Total variation: half the sum over values of |P(v) - Q(v)|.
Rational tv_gap(const DiscreteDist& a, const DiscreteDist& b) {
  std::map<Rational, Rational> diff;
  const DiscreteDist ca = a.collapsed(), cb = b.collapsed();
  for (const auto& x : ca.atoms()) diff[x.value] += x.mass;
  for (const auto& x : cb.atoms()) diff[x.value] -= x.mass;
  Rational s = 0;
  for (auto& [v, m] : diff) s += abs(m);
  return s / 2;
}

}  // namespace

TEST(YTable, Examples) {
  auto a = y_table(3, PrimeClass::odd(3, -1), 4);
  EXPECT_EQ(a.size(), 2u);
  EXPECT_EQ(a.mass_at(R(3, 4)), R(2, 3));
  EXPECT_EQ(a.mass_at(R(3, 2)), R(1, 3));
  EXPECT_FALSE(a.tail());

  auto b = y_table(2, PrimeClass::two_adic(TwoAdicCase::three_mod_4), 4);
  EXPECT_EQ(b.size(), 4u);
  EXPECT_EQ(b.mass_at(R(2, 3)), R(1, 2));
  EXPECT_EQ(b.mass_at(R(1)), R(1, 4));
  EXPECT_EQ(b.mass_at(R(4, 3)), R(1, 8));
  EXPECT_EQ(b.mass_at(R(2)), R(1, 8));

  auto c = y_table(3, PrimeClass::odd(3, 1), 2);
  Rational listed = 0;
  for (const auto& at : c.atoms()) listed += at.mass;
  ASSERT_TRUE(c.tail());
  EXPECT_EQ(c.tail()->value, R(3, 2));
  EXPECT_EQ(listed, R(1, 3) + R(1, 12) + R(4, 9) + R(4, 81) + R(2, 27) + R(2, 243));
  EXPECT_EQ(c.tail()->mass, 1 - listed);
  EXPECT_EQ(c.total_mass(), R(1));

  EXPECT_THROW(y_table(3, PrimeClass::odd(5, 1), 2), std::invalid_argument);
  EXPECT_THROW(y_table(3, PrimeClass::odd(3, 1), 0), std::invalid_argument);
  EXPECT_THROW(PrimeClass::odd(4, 1), std::invalid_argument);
}

TEST(YTable, MassesSumToOne) {
  for (i64 l : primes_up_to(98))
    for (const auto& cls : all_classes(l))
      for (int S = 1; S <= 8; ++S) ASSERT_EQ(y_table(l, cls, S).total_mass(), R(1)) << cls.label() << " S=" << S;
}

TEST(YTable, MeanIsOneAwayFromL) {
  for (i64 l : primes_up_to(98))
    for (const auto& cls : all_classes(l)) {
      const bool p_is_l = (l == 2) ? cls.two == TwoAdicCase::p_is_2 : cls.symbol == 0;
      Rational m = moments(y_law(cls)).mean;
      for (int S : {1, 3, 8}) ASSERT_EQ(moments(y_table(l, cls, S)).mean, m) << cls.label();
      ASSERT_EQ(moments(y_law(cls)).variance, moments(y_table(l, cls, 5)).variance);
      if (!p_is_l) { ASSERT_EQ(m, R(1)) << cls.label(); }
    }
  EXPECT_EQ(moments(y_table(5, PrimeClass::odd(5, 0), 3)).mean, R(6, 5));
  EXPECT_EQ(moments(y_table(3, PrimeClass::odd(3, -1), 3)).mean, R(1));
}

TEST(YTable, LogVarianceDecaysLikeInverseSquare) {
  for (i64 l : primes_up_to(98))
    for (const auto& cls : all_classes(l)) {
      double v = log_moments(y_law(cls)).variance;
      ASSERT_LE(v, 1.0 / static_cast<double>(l * l)) << cls.label();
    }
}

TEST(YEnumerated, Examples) {
  auto a = y_k_enumerated(3, 7, 1);
  auto ta = y_table(3, PrimeClass::of(3, 7), 1);
  for (const auto& at : ta.atoms())
    if (at.mass > R(1, 9)) { EXPECT_EQ(a.mass_at(at.value), at.mass); }

  auto b = y_k_enumerated(2, 7, 2);
  auto tb = y_table(2, PrimeClass::of(2, 7), 2);
  for (const auto& at : tb.atoms())
    if (at.mass >= R(1, 16)) { EXPECT_EQ(b.mass_at(at.value), at.mass) << to_string(at.value); }

  auto c = y_k_enumerated(5, 5, 1);
  EXPECT_EQ(c.size(), 2u);
  EXPECT_EQ(c.mass_at(R(5, 4)), R(4, 5));
  EXPECT_EQ(c.mass_at(R(1)), R(1, 5));

  EXPECT_THROW(y_k_enumerated(3, 7, 20), std::invalid_argument);
  EXPECT_THROW(y_k_enumerated(3, 7, 0), std::invalid_argument);
}

// Enumeration over residues equals the table with deep entries folded into
// l/(l-1).
TEST(YEnumerated, EqualsFoldedTable) {
  for (i64 l : {2, 3, 5, 7, 11, 13})
    for (const auto& cls : all_classes(l)) {
      const i64 p = cls.representative();
      ASSERT_EQ(PrimeClass::of(l, p), cls);
      for (int k = 1;; ++k) {
        DiscreteDist e;
        try {
          e = y_k_enumerated(l, p, k, 300'000);
        } catch (const std::invalid_argument&) {
          break;
        }
        ASSERT_TRUE(e == y_k_from_table(cls, k)) << cls.label() << " k=" << k;
      }
    }
}

// Entries that are resolved at level k and heavy enough show up with exactly
// their table mass.
TEST(YEnumerated, VisibleHeavyAtomsMatchTable) {
  for (i64 l : {2, 3, 5, 7, 11, 13})
    for (const auto& cls : all_classes(l)) {
      const LocalLaw law = y_law(cls);
      for (int k = 1;; ++k) {
        DiscreteDist e;
        try {
          e = y_k_enumerated(l, cls.representative(), k, 300'000);
        } catch (const std::invalid_argument&) {
          break;
        }
        const Rational floor_mass = 1 / rational_pow(Rational(static_cast<long>(l)), 2 * k - 2);
        std::map<Rational, std::pair<Rational, bool>> table;  // value -> (mass, all visible)
        auto add = [&](const Rational& v, const Rational& m, int depth, int sym) {
          auto& slot = table[v];
          if (slot.first == 0) slot.second = true;
          slot.first += m;
          slot.second = slot.second && detail::visible_at(l, depth, sym, k);
        };
        for (const auto& a : law.atoms) add(a.value, a.mass, a.depth, a.symbol);
        for (const auto& f : law.families)
          for (int s = 1; s <= 2 * k + 2; ++s) add(f.value(s), f.mass(s), f.depth(s), f.symbol);
        for (const auto& [v, mv] : table)
          if (mv.second && mv.first >= floor_mass) { ASSERT_EQ(e.mass_at(v), mv.first) << cls.label() << " " << to_string(v); }
      }
    }
}

// Deep entries are the only disagreement and weigh at most 7 l^-2k in total.
TEST(YEnumerated, DisagreementIsSmall) {
  for (i64 l : {2, 3, 5, 7, 11, 13})
    for (const auto& cls : all_classes(l)) {
      for (int k = 1;; ++k) {
        DiscreteDist e;
        try {
          e = y_k_enumerated(l, cls.representative(), k, 300'000);
        } catch (const std::invalid_argument&) {
          break;
        }
        Rational gap = tv_gap(e, y_table(l, cls, k));
        Rational bound = 7 / rational_pow(Rational(static_cast<long>(l)), 2 * k);
        ASSERT_LE(gap, bound) << cls.label() << " k=" << k;
      }
    }
  // the worst case, l = 2 with p = 1 mod 8, sits at 105/16 * 4^-k from k = 3 on
  auto cls = PrimeClass::two_adic(TwoAdicCase::one_mod_8);
  EXPECT_EQ(tv_gap(y_k_enumerated(2, 17, 3), y_table(2, cls, 3)), R(105, 1024));
}

TEST(ZTruncated, SingleFactor) {
  auto z = z_truncated(7, 3, 1);
  EXPECT_TRUE(z.dist == y_k_enumerated(2, 7, 1));
  EXPECT_EQ(z.pruned_mass, 0.0);
  EXPECT_THROW(z_truncated(7, 2, 1), std::invalid_argument);
  EXPECT_THROW(z_truncated(7, 5, 1, -1.0), std::invalid_argument);
}

TEST(ZTruncated, TwoFactorConvolution) {
  const i64 p = 11;  // (11/3) = -1, 11 = 3 mod 4
  auto f2 = y_k_from_table(PrimeClass::of(2, p), 1), f3 = y_k_from_table(PrimeClass::of(3, p), 1);
  std::map<Rational, Rational> expect;
  for (const auto& a : f2.atoms())
    for (const auto& b : f3.atoms()) expect[a.value * b.value] += a.mass * b.mass;
  auto z = z_truncated(p, 4, 1).dist;
  ASSERT_EQ(z.size(), expect.size());
  for (auto& [v, m] : expect) EXPECT_EQ(z.mass_at(v), m);
  EXPECT_EQ(z.total_mass(), R(1));
}

// E of the product equals the product of factor means. At finite k those
// are not 1 in general, e.g. 37/36 for l = 3, (p/3) = 1, k = 1.
TEST(ZTruncated, MeanIsProductOfFactorMeans) {
  EXPECT_EQ(moments(y_k_from_table(PrimeClass::odd(3, 1), 1)).mean, R(37, 36));
  for (i64 p : {101, 1009, 10007})
    for (int k : {1, 2}) {
      Rational prod = 1;
      for (const auto& cls : class_vector(p, 12)) prod *= moments(y_k_from_table(cls, k)).mean;
      EXPECT_EQ(moments(z_truncated(p, 12, k).dist).mean, prod);
    }
}

TEST(ZTruncated, ClassFunctorial) {
  for (i64 l1 : {5, 8, 12}) {
    std::map<std::string, i64> first;
    int pairs = 0;
    for (i64 p : primes_up_to(3000)) {
      if (p < l1) continue;
      std::string key;
      for (const auto& c : class_vector(p, l1)) key += c.label() + ";";
      auto it = first.find(key);
      if (it == first.end()) {
        first.emplace(key, p);
      } else if (pairs < 6) {
        ++pairs;
        EXPECT_TRUE(z_truncated(p, l1, 2).dist == z_truncated(it->second, l1, 2).dist) << p << " " << it->second;
      }
    }
    EXPECT_GT(pairs, 0);
  }
}

TEST(ZTruncated, PruningConservesMass) {
  auto exact = z_truncated(1000003, 20, 2);
  auto pruned = z_truncated(1000003, 20, 2, 1e-6);
  EXPECT_EQ(pruned.dist.total_mass(), R(1));
  EXPECT_LT(pruned.dist.size(), exact.dist.size());
  EXPECT_GT(pruned.pruned_mass, 0.0);
  EXPECT_GT(pruned.pruned_atoms, 0u);
  for (const auto& a : pruned.dist.atoms()) EXPECT_GE(a.mass.get_d(), 1e-6);
  EXPECT_THROW(z_truncated(1000003, 20, 2, 0, 50), std::length_error);
}

TEST(ZSample, Examples) {
  auto one = z_sample(DiscreteDist::point_mass(R(1)), 5, 99);
  EXPECT_EQ(one, std::vector<double>(5, 1.0));

  auto d = y_table(3, PrimeClass::odd(3, -1), 1);
  const std::size_t n = 1'000'000;
  auto xs = z_sample(d, n, 42);
  double hits = 0;
  for (double x : xs) hits += (x == 0.75);
  const double sigma = std::sqrt(n * (2.0 / 3) * (1.0 / 3));
  EXPECT_LE(std::fabs(hits - n * 2.0 / 3), 3 * sigma);

  EXPECT_EQ(z_sample(d, 10000, 5), z_sample(d, 10000, 5));
  EXPECT_NE(z_sample(d, 10000, 5), z_sample(d, 10000, 6));
  EXPECT_THROW(z_sample(d, 0, 1), std::invalid_argument);
}

TEST(ZSample, IndependentOfThreadCount) {
  std::vector<DiscreteDist> fs;
  for (const auto& c : class_vector(1000003, 20)) fs.push_back(y_k_from_table(c, 2));
  EXPECT_EQ(z_sample(fs, 50000, 3, 1), z_sample(fs, 50000, 3, 4));
  auto d = y_table(2, PrimeClass::two_adic(TwoAdicCase::five_mod_8), 6);
  EXPECT_EQ(z_sample(d, 20000, 3, 1), z_sample(d, 20000, 3, 3));
}

TEST(ZSample, FactorSamplingMatchesMean) {
  std::vector<DiscreteDist> fs;
  for (const auto& c : class_vector(10007, 12)) fs.push_back(y_k_from_table(c, 2));
  Rational prod = 1;
  for (const auto& f : fs) prod *= moments(f).mean;
  auto xs = z_sample(fs, 400000, 11);
  double mean = 0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  EXPECT_NEAR(mean, prod.get_d(), 0.01);
}
