#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "arith.hpp"
#include "rational.hpp"

namespace satocensus {

struct LocalFactor {
  i64 l = 0;
  int delta_exp = 0;
  SymbolValue symbol;
  Rational value;
};

enum class CutoffMode { grh_poly, unconditional };

struct CutoffPlan {
  CutoffMode mode = CutoffMode::grh_poly;
  i64 l0 = 2;
  double exponent = 3.0;
  double kappa = 1.0;
};

/// (1 - l^-2)^-1 (1 + l^-1 + corr), corr fixed by (delta, symbol).
inline Rational local_factor_value(i64 l, int delta, int symbol) {
  const Rational L(static_cast<long>(l));
  Rational v = 1 + 1 / L;
  if (symbol == 0) {
    v -= Rational(static_cast<long>(l + 1)) / rational_pow(L, static_cast<unsigned long>(delta + 2));
  } else if (symbol == -1) {
    v -= Rational(2) / rational_pow(L, static_cast<unsigned long>(delta + 1));
  }
  return v * (L * L) / (L * L - 1);
}

/// The factor formula without the sign and mod-4 checks on D; any D != 0.
inline LocalFactor local_factor_unchecked(i64 l, i64 D) {
  auto sp = padic_split(D, l);
  SymbolValue s = kronecker(sp.reduced, l);
  return {l, sp.delta, s, local_factor_value(l, sp.delta, s)};
}

inline LocalFactor v_l(i64 l, i64 D) {
  if (D >= 0) throw std::invalid_argument("v_l: discriminant must be negative");
  i64 m = floor_mod(D, 4);
  if (m != 0 && m != 1) throw std::invalid_argument("v_l: discriminant must be 0 or 1 mod 4");
  if (l < 2 || !is_prime(l)) throw std::invalid_argument("v_l: l must be prime");
  return local_factor_unchecked(l, D);
}

/// l^(2k) | D gives the collapsed value l/(l-1); otherwise v_l(D).
inline Rational v_lk(i64 l, int k, i64 D) {
  if (k < 1) throw std::invalid_argument("v_lk: k must be >= 1");
  if (D == 0) return Rational(static_cast<long>(l), static_cast<long>(l - 1));
  const i64 absD = D < 0 ? -D : D;
  i64 q = 1;
  bool divides = true;
  for (int i = 0; i < 2 * k; ++i) {
    q *= l;
    if (q > absD) {
      divides = false;
      break;
    }
  }
  if (divides && D % q == 0) return Rational(static_cast<long>(l), static_cast<long>(l - 1));
  return local_factor_unchecked(l, D).value;
}

namespace detail {
inline i64 trace_discriminant(i64 t, i64 p) {
  i64 D = t * t - 4 * p;
  if (D >= 0) throw std::invalid_argument("need t^2 < 4p");
  return D;
}
}  // namespace detail

/// prod_{l < l0} v_l(t^2 - 4p); with k > 0 the factors are v_{l,k}.
inline Rational truncated_product(i64 t, i64 p, i64 l0, int k = 0) {
  const i64 D = detail::trace_discriminant(t, p);
  Rational prod = 1;
  for (i64 l : primes_up_to(l0)) prod *= (k > 0) ? v_lk(l, k, D) : local_factor_unchecked(l, D).value;
  return prod;
}

inline double gekeler_estimate(i64 t, i64 p, const CutoffPlan& plan, int k = 0) {
  const i64 D = detail::trace_discriminant(t, p);
  return std::sqrt(static_cast<double>(-D)) / M_PI * truncated_product(t, p, plan.l0, k).get_d();
}

struct DyadicBucket {
  int n = 0;  // primes in [2^n, 2^(n+1))
  double sum = 0;
  std::size_t primes = 0;
};

struct TailLog {
  double total = 0;
  std::vector<DyadicBucket> buckets;
};

inline constexpr i64 kTailLogMaxL = 1'000'000;

/// sum_{l0 <= l < L} log v_l(t^2 - 4p), split over dyadic ranges.
inline TailLog tail_log_product(i64 t, i64 p, i64 l0, i64 L, i64 max_L = kTailLogMaxL) {
  const i64 D = detail::trace_discriminant(t, p);
  if (L > max_L) throw std::invalid_argument("tail_log_product: L above cap");
  TailLog out;
  if (L <= l0) return out;
  for (i64 l : primes_up_to(L)) {
    if (l < l0) continue;
    double lv;
    if (D % (l * l) != 0) {
      lv = -std::log1p(-static_cast<double>(kronecker(D, l)) / static_cast<double>(l));
    } else {
      lv = std::log(local_factor_unchecked(l, D).value.get_d());
    }
    int n = 0;
    while ((i64{2} << n) <= l) ++n;
    if (out.buckets.empty() || out.buckets.back().n != n) out.buckets.push_back({n, 0.0, 0});
    out.buckets.back().sum += lv;
    out.buckets.back().primes += 1;
  }
  for (const auto& b : out.buckets) out.total += b.sum;
  return out;
}

/// l0 = ceil((log p)^exponent) or ceil(g_kappa(p)).
inline CutoffPlan cutoff_l0(i64 p, CutoffMode mode, double exponent = 3.0, double kappa = 1.0) {
  if (p < 17) throw std::invalid_argument("cutoff_l0: p must be >= 17");
  CutoffPlan plan{mode, 2, exponent, kappa};
  const double lp = std::log(static_cast<double>(p));
  double x;
  if (mode == CutoffMode::grh_poly) {
    if (!(exponent > 2)) throw std::invalid_argument("cutoff_l0: exponent must exceed 2");
    x = std::pow(lp, exponent);
  } else {
    if (!(kappa > 0)) throw std::invalid_argument("cutoff_l0: kappa must be positive");
    const double ll = std::log(lp), lll = std::log(ll);
    x = std::exp(kappa * std::pow(ll, 5.0 / 3.0) * std::cbrt(lll));
  }
  plan.l0 = static_cast<i64>(std::ceil(x));
  if (plan.l0 < 2) throw std::invalid_argument("cutoff_l0: degenerate cutoff");
  return plan;
}

/// (prod_{l < l1} l)^(2k).
inline BigInt period_T(i64 l1, int k) {
  if (l1 < 2 || k < 1) throw std::invalid_argument("period_T: need l1 >= 2, k >= 1");
  BigInt prod = 1;
  for (i64 l : primes_up_to(l1)) prod *= static_cast<long>(l);
  BigInt out;
  mpz_pow_ui(out.get_mpz_t(), prod.get_mpz_t(), static_cast<unsigned long>(2 * k));
  return out;
}

}  // namespace satocensus
