#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace satocensus {

using i64 = std::int64_t;
using u64 = std::uint64_t;

/// Value of a Kronecker or Legendre symbol. Always -1, 0 or +1.
class SymbolValue {
 public:
  constexpr SymbolValue() = default;
  constexpr SymbolValue(int v) : v_(v) {  // NOLINT: implicit on purpose
    if (v < -1 || v > 1) throw std::invalid_argument("symbol value outside {-1,0,1}");
  }
  constexpr int value() const { return v_; }
  constexpr operator int() const { return v_; }  // NOLINT

 private:
  int v_ = 0;
};

inline i64 floor_mod(i64 a, i64 m) {
  i64 r = a % m;
  return r < 0 ? r + m : r;
}

inline u64 mul_mod(u64 a, u64 b, u64 m) {
  return static_cast<u64>(static_cast<unsigned __int128>(a) * b % m);
}

inline u64 pow_mod(u64 b, u64 e, u64 m) {
  u64 r = 1 % m;
  b %= m;
  while (e) {
    if (e & 1) r = mul_mod(r, b, m);
    b = mul_mod(b, b, m);
    e >>= 1;
  }
  return r;
}

/// floor(sqrt(n)) for n >= 0.
inline i64 isqrt(i64 n) {
  if (n < 0) throw std::domain_error("isqrt of negative");
  i64 r = static_cast<i64>(std::sqrt(static_cast<double>(n)));
  while (r > 0 && r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

/// Kronecker symbol (a/n) for n >= 1.
inline SymbolValue kronecker(i64 a, i64 n) {
  if (n <= 0) throw std::invalid_argument("kronecker: n must be >= 1");
  int res = 1;
  // strip factors of two from n
  while ((n & 1) == 0) {
    if ((a & 1) == 0) return 0;
    i64 r8 = floor_mod(a, 8);
    if (r8 == 3 || r8 == 5) res = -res;
    n >>= 1;
  }
  // n odd now: Jacobi symbol
  i64 x = floor_mod(a, n);
  i64 m = n;
  while (x != 0) {
    while ((x & 1) == 0) {
      x >>= 1;
      i64 r8 = m & 7;
      if (r8 == 3 || r8 == 5) res = -res;
    }
    std::swap(x, m);
    if ((x & 3) == 3 && (m & 3) == 3) res = -res;
    x %= m;
  }
  return m == 1 ? res : 0;
}

/// All primes strictly below n.
inline std::vector<i64> primes_up_to(i64 n) {
  std::vector<i64> out;
  if (n <= 2) return out;
  std::vector<bool> comp(static_cast<std::size_t>(n), false);
  for (i64 i = 2; i < n; ++i) {
    if (comp[i]) continue;
    out.push_back(i);
    for (i64 j = i * i; j < n; j += i) comp[j] = true;
  }
  return out;
}

/// Deterministic Miller-Rabin, valid for all 64-bit inputs.
inline bool is_prime(i64 n) {
  if (n < 2) return false;
  for (i64 q : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
    if (n % q == 0) return n == q;
  }
  u64 d = static_cast<u64>(n) - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (u64 a : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
    u64 x = pow_mod(a, d, static_cast<u64>(n));
    if (x == 1 || x == static_cast<u64>(n) - 1) continue;
    bool comp = true;
    for (int r = 1; r < s; ++r) {
      x = mul_mod(x, x, static_cast<u64>(n));
      if (x == static_cast<u64>(n) - 1) {
        comp = false;
        break;
      }
    }
    if (comp) return false;
  }
  return true;
}

struct PadicSplit {
  int delta = 0;
  i64 reduced = 0;
};

/// Largest delta with l^(2 delta) | D. For l = 2 the quotient must also
/// stay congruent to 0 or 1 mod 4.
inline PadicSplit padic_split(i64 D, i64 l) {
  if (D == 0) throw std::invalid_argument("padic_split: zero discriminant");
  if (l < 2) throw std::invalid_argument("padic_split: bad prime");
  const i64 l2 = l * l;
  PadicSplit r{0, D};
  while (r.reduced % l2 == 0) {
    i64 q = r.reduced / l2;
    if (l == 2) {
      i64 m = floor_mod(q, 4);
      if (m != 0 && m != 1) break;
    }
    r.reduced = q;
    ++r.delta;
  }
  return r;
}

inline i64 inverse_mod(i64 a, i64 m) {
  i64 g = m, x = 0, x1 = 1, b = floor_mod(a, m);
  while (b) {
    i64 q = g / b;
    std::tie(g, b) = std::make_pair(b, g - q * b);
    std::tie(x, x1) = std::make_pair(x1, x - q * x1);
  }
  if (g != 1) throw std::domain_error("inverse_mod: not invertible");
  return floor_mod(x, m);
}

/// Distinct prime factors by trial division.
inline std::vector<i64> prime_factors(i64 n) {
  std::vector<i64> out;
  if (n < 0) n = -n;
  for (i64 q = 2; q * q <= n; ++q) {
    if (n % q) continue;
    out.push_back(q);
    while (n % q == 0) n /= q;
  }
  if (n > 1) out.push_back(n);
  return out;
}

/// Smallest generator of (Z/p)^* for odd prime p.
inline i64 primitive_root(i64 p) {
  if (p == 2) return 1;
  auto fs = prime_factors(p - 1);
  for (i64 g = 2; g < p; ++g) {
    bool ok = true;
    for (i64 q : fs) {
      if (pow_mod(g, (p - 1) / q, p) == 1) {
        ok = false;
        break;
      }
    }
    if (ok) return g;
  }
  throw std::logic_error("no primitive root");
}

/// chi[x] = (x/p) for 0 <= x < p.
inline std::vector<signed char> quadratic_character_table(i64 p) {
  std::vector<signed char> chi(static_cast<std::size_t>(p), -1);
  chi[0] = 0;
  for (i64 x = 1; x <= p / 2; ++x) chi[mul_mod(x, x, p)] = 1;
  if (p == 2) chi[1] = 1;
  return chi;
}

/// Smallest quadratic non-residue mod odd prime p.
inline i64 least_nonresidue(i64 p) {
  for (i64 n = 2; n < p; ++n)
    if (kronecker(n, p) == -1) return n;
  throw std::domain_error("no non-residue");
}

}  // namespace satocensus
