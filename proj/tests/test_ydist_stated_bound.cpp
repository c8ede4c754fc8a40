#include <gtest/gtest.h>

#include <map>

#include "satocensus/ydist.hpp"

using namespace satocensus;

// Checks the bound TV(enumerated, table) <= 4 l^-2k. It does not
// hold for l = 2, p = 1 mod 8, k >= 3 (the gap is 105/16 * 4^-k), so this
// binary is registered as an expected failure.
TEST(StatedBound, TotalDisagreementAtMostFourLToMinus2k) {
  for (i64 l : {2, 3, 5, 7}) {
    std::vector<PrimeClass> classes;
    if (l == 2) {
      for (auto c : {TwoAdicCase::p_is_2, TwoAdicCase::three_mod_4, TwoAdicCase::five_mod_8, TwoAdicCase::one_mod_8})
        classes.push_back(PrimeClass::two_adic(c));
    } else {
      for (int s : {-1, 0, 1}) classes.push_back(PrimeClass::odd(l, s));
    }
    for (const auto& cls : classes)
      for (int k = 1;; ++k) {
        DiscreteDist e;
        try {
          e = y_k_enumerated(l, cls.representative(), k, 100'000);
        } catch (const std::invalid_argument&) {
          break;
        }
        std::map<Rational, Rational> diff;
        for (const auto& x : e.atoms()) diff[x.value] += x.mass;
        const DiscreteDist table = y_table(l, cls, k).collapsed();
        for (const auto& x : table.atoms()) diff[x.value] -= x.mass;
        Rational gap = 0;
        for (auto& [v, m] : diff) gap += abs(m);
        gap /= 2;
        EXPECT_LE(gap, 4 / rational_pow(Rational(static_cast<long>(l)), 2 * k)) << cls.label() << " k=" << k;
      }
  }
}
