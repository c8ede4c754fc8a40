#pragma once

#include <stdexcept>
#include <vector>

#include "arith.hpp"
#include "rational.hpp"

namespace satocensus {

struct DiscriminantSplit {
  i64 delta = 0;
  i64 conductor = 1;
  i64 fundamental = 0;
};

struct ReducedForm {
  i64 a = 0, b = 0, c = 0;
  bool operator==(const ReducedForm&) const = default;
};

namespace detail {

inline void require_negative_discriminant(i64 D) {
  if (D >= 0) throw std::invalid_argument("discriminant must be negative");
  i64 m = floor_mod(D, 4);
  if (m != 0 && m != 1) throw std::invalid_argument("discriminant must be 0 or 1 mod 4");
}

inline bool squarefree(i64 n) {
  if (n < 0) n = -n;
  for (i64 q = 2; q * q <= n; ++q) {
    if (n % (q * q) == 0) return false;
    if (n % q == 0) n /= q;
  }
  return true;
}

// Six times the weighted count of all reduced forms (primitive or not).
// (a,0,a) carries 3, (a,a,a) carries 2, everything else 6.
inline i64 hurwitz_times6(i64 D) {
  const i64 N = -D;
  i64 total = 0;
  const i64 amax = isqrt(N / 3);
  const i64 b0 = N & 1;
  for (i64 a = 1; a <= amax; ++a) {
    const i64 m = 4 * a;
    // r = (b^2 + N) mod 4a, tracked as b steps by 2
    i64 r = (b0 * b0 + N) % m;
    for (i64 b = b0; b <= a; b += 2) {
      if (r == 0) {
        const i64 c = (b * b + N) / m;
        if (c >= a) {
          if (b == 0) {
            total += (c == a) ? 3 : 6;
          } else if (b == a || c == a) {
            total += (b == a && c == a) ? 2 : 6;
          } else {
            total += 12;  // (a, b, c) and (a, -b, c)
          }
        }
      }
      r += 4 * b + 4;
      while (r >= m) r -= m;
    }
  }
  return total;
}

}  // namespace detail

inline bool is_fundamental_discriminant(i64 D) {
  if (D == 0 || D == 1) return false;
  i64 m = floor_mod(D, 4);
  if (m == 1) return detail::squarefree(D);
  if (m != 0) return false;
  i64 q = D / 4;
  i64 r = floor_mod(q, 4);
  return (r == 2 || r == 3) && detail::squarefree(q);
}

inline DiscriminantSplit split_discriminant(i64 D) {
  detail::require_negative_discriminant(D);
  DiscriminantSplit s{D, 1, D};
  // strip square factors, keeping the quotient a discriminant
  for (i64 q = 2; q * q <= -s.fundamental; ++q) {
    while (s.fundamental % (q * q) == 0) {
      i64 r = s.fundamental / (q * q);
      i64 m = floor_mod(r, 4);
      if (m != 0 && m != 1) break;
      s.fundamental = r;
      s.conductor *= q;
    }
  }
  return s;
}

/// All reduced forms of discriminant D, primitive or not, sorted by (a, b).
inline std::vector<ReducedForm> reduced_forms(i64 D) {
  detail::require_negative_discriminant(D);
  const i64 N = -D;
  std::vector<ReducedForm> out;
  const i64 amax = isqrt(N / 3);
  for (i64 a = 1; a <= amax; ++a) {
    for (i64 b = -a + 1; b <= a; ++b) {
      if (floor_mod(b - N, 2) != 0) continue;
      i64 num = b * b + N;
      if (num % (4 * a)) continue;
      i64 c = num / (4 * a);
      if (c < a) continue;
      if (c == a && b < 0) continue;
      out.push_back({a, b, c});
    }
  }
  return out;
}

/// 2h/w for a fundamental discriminant.
inline Rational class_number_weighted(i64 D0) {
  if (D0 >= 0 || !is_fundamental_discriminant(D0))
    throw std::invalid_argument("class_number_weighted: not a negative fundamental discriminant");
  if (D0 == -3) return Rational(1, 3);
  if (D0 == -4) return Rational(1, 2);
  return Rational(static_cast<long>(reduced_forms(D0).size()));
}

inline Rational hurwitz_class_number(i64 D) {
  detail::require_negative_discriminant(D);
  Rational h(static_cast<long>(detail::hurwitz_times6(D)), 6);
  h.canonicalize();
  return h;
}

/// H(D) through the conductor formula h_w(d^2 D0) = h_w(D0) d prod(1 - (D0/q)/q).
inline Rational hurwitz_via_conductor(i64 D) {
  auto s = split_discriminant(D);
  Rational base = class_number_weighted(s.fundamental);
  Rational sum = 0;
  for (i64 d = 1; d <= s.conductor; ++d) {
    if (s.conductor % d) continue;
    Rational term(static_cast<long>(d));
    for (i64 q : prime_factors(d)) {
      term *= Rational(static_cast<long>(q - kronecker(s.fundamental, q)), static_cast<long>(q));
    }
    sum += term;
  }
  return base * sum;
}

}  // namespace satocensus
