#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>

namespace satocensus {

using Rational = mpq_class;
using BigInt = mpz_class;

inline Rational make_rational(std::int64_t num, std::int64_t den = 1) {
  Rational r(static_cast<long>(num), static_cast<long>(den));
  r.canonicalize();
  return r;
}

/// Exact power base^exp for exp >= 0.
inline Rational rational_pow(const Rational& base, unsigned long exp) {
  Rational out;
  mpz_pow_ui(out.get_num_mpz_t(), base.get_num_mpz_t(), exp);
  mpz_pow_ui(out.get_den_mpz_t(), base.get_den_mpz_t(), exp);
  out.canonicalize();
  return out;
}

/// "num/den", or "num" when the denominator is one.
inline std::string to_string(const Rational& r) {
  if (r.get_den() == 1) return r.get_num().get_str();
  return r.get_num().get_str() + "/" + r.get_den().get_str();
}

inline std::string to_string(const BigInt& z) { return z.get_str(); }

inline double to_double(const Rational& r) { return r.get_d(); }

}  // namespace satocensus
