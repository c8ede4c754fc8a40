#pragma once

#include <cstdio>
#include <fstream>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "arith.hpp"
#include "classno.hpp"
#include "discrete_dist.hpp"
#include "ntt.hpp"
#include "parallel.hpp"
#include "rational.hpp"

namespace satocensus {

inline constexpr i64 kCensusMaxPrime = 2'000'000;
inline constexpr i64 kSlowCensusMaxPrime = 500;

struct CurveClass {
  i64 p = 0;
  i64 a = 0, b = 0;
  i64 j = 0;
  i64 trace = 0;
  int aut_order = 2;
};

/// Weighted and unweighted curve counts per trace, stored densely over
/// -T..T with T = floor(2 sqrt p).
class TraceCensus {
 public:
  TraceCensus() = default;
  TraceCensus(i64 p, bool with_unweighted)
      : p_(p), T_(isqrt(4 * p)), weighted_(2 * T_ + 1, Rational(0)), has_unweighted_(with_unweighted) {
    if (with_unweighted) unweighted_.assign(2 * T_ + 1, 0);
  }

  i64 p() const { return p_; }
  i64 max_trace() const { return T_; }
  bool has_unweighted() const { return has_unweighted_; }

  const Rational& weighted(i64 t) const { return weighted_.at(index(t)); }
  Rational& weighted(i64 t) { return weighted_.at(index(t)); }
  i64 unweighted(i64 t) const {
    if (!has_unweighted_) throw std::logic_error("census has no unweighted counts");
    return unweighted_.at(index(t));
  }
  i64& unweighted(i64 t) {
    if (!has_unweighted_) throw std::logic_error("census has no unweighted counts");
    return unweighted_.at(index(t));
  }

  Rational total_weighted() const {
    Rational s = 0;
    for (const auto& w : weighted_) s += w;
    return s;
  }

  i64 total_unweighted() const { return std::accumulate(unweighted_.begin(), unweighted_.end(), i64{0}); }

  /// Equality of weighted counts, plus unweighted ones when both carry them.
  bool same_counts(const TraceCensus& o) const {
    if (p_ != o.p_ || weighted_ != o.weighted_) return false;
    if (has_unweighted_ && o.has_unweighted_) return unweighted_ == o.unweighted_;
    return true;
  }

  /// CSV: t,weighted_num,weighted_den,unweighted (last column empty if absent).
  void write_csv(std::ostream& os) const {
    os << "t,weighted_num,weighted_den,unweighted\n";
    for (i64 t = -T_; t <= T_; ++t) {
      const auto& w = weighted(t);
      os << t << ',' << w.get_num().get_str() << ',' << w.get_den().get_str() << ',';
      if (has_unweighted_) os << unweighted(t);
      os << '\n';
    }
  }

 private:
  std::size_t index(i64 t) const {
    if (t < -T_ || t > T_) throw std::out_of_range("trace outside Hasse range");
    return static_cast<std::size_t>(t + T_);
  }

  i64 p_ = 0;
  i64 T_ = 0;
  std::vector<Rational> weighted_;
  std::vector<i64> unweighted_;
  bool has_unweighted_ = false;
};

namespace detail {

inline void require_census_prime(i64 p, i64 pmax) {
  if (p <= 3) throw std::invalid_argument("census needs p > 3");
  if (p > pmax) throw std::invalid_argument("p exceeds census ceiling " + std::to_string(pmax));
  if (!is_prime(p)) throw std::invalid_argument("census needs a prime p");
}

// sum_x chi(x^3 + a x + b) by forward differences
inline i64 char_sum(i64 a, i64 b, i64 p, const std::vector<signed char>& chi) {
  i64 f = floor_mod(b, p), d1 = floor_mod(1 + a, p), d2 = 6 % p;
  const i64 d3 = 6 % p;
  i64 s = 0;
  for (i64 x = 0; x < p; ++x) {
    s += chi[f];
    f += d1;
    if (f >= p) f -= p;
    d1 += d2;
    if (d1 >= p) d1 -= p;
    d2 += d3;
    if (d2 >= p) d2 -= p;
  }
  return s;
}

inline i64 j_invariant(i64 a, i64 b, i64 p) {
  i64 a3 = static_cast<i64>(mul_mod(mul_mod(floor_mod(a, p), floor_mod(a, p), p), floor_mod(a, p), p));
  i64 num = static_cast<i64>(mul_mod(1728 % p, mul_mod(4, a3, p), p));
  i64 den = floor_mod(4 * a3 + static_cast<i64>(mul_mod(27, mul_mod(floor_mod(b, p), floor_mod(b, p), p), p)), p);
  return static_cast<i64>(mul_mod(num, inverse_mod(den, p), p));
}

inline bool singular(i64 a, i64 b, i64 p) {
  i64 a3 = static_cast<i64>(mul_mod(mul_mod(floor_mod(a, p), floor_mod(a, p), p), floor_mod(a, p), p));
  i64 b2 = static_cast<i64>(mul_mod(floor_mod(b, p), floor_mod(b, p), p));
  return floor_mod(4 * a3 + 27 * b2, p) == 0;
}

// Traces of y^2 = x^3 + c x + c for every c in F_p, via one exact correlation.
// Entries at c = 0 and c = -27/4 are meaningless and left for the caller to skip.
inline std::vector<i64> generic_traces_batched(i64 p, const std::vector<signed char>& chi) {
  std::vector<i64> inv(static_cast<std::size_t>(p), 0);
  inv[1] = 1;
  for (i64 i = 2; i < p; ++i) inv[i] = floor_mod(-(p / i) * inv[p % i] % p, p);
  // A(w) = sum over x != -1 with x^3/(x+1) = w of chi(x+1)
  std::vector<i64> A(static_cast<std::size_t>(p), 0);
  for (i64 x = 0; x + 1 < p; ++x) {
    i64 x3 = static_cast<i64>(mul_mod(mul_mod(x, x, p), x, p));
    i64 w = static_cast<i64>(mul_mod(x3, inv[x + 1], p));
    A[w] += chi[x + 1];
  }
  std::vector<i64> rev(static_cast<std::size_t>(p)), ch(static_cast<std::size_t>(p));
  for (i64 u = 0; u < p; ++u) {
    rev[u] = A[(p - u) % p];
    ch[u] = chi[u];
  }
  auto conv = ntt::convolve(rev, ch);
  const i64 chi_m1 = chi[p - 1];
  std::vector<i64> trace(static_cast<std::size_t>(p), 0);
  for (i64 c = 0; c < p; ++c) {
    i64 r = conv[c] + (c + p < static_cast<i64>(conv.size()) ? conv[c + p] : 0);
    trace[c] = -(chi_m1 + r);
  }
  return trace;
}

}  // namespace detail

/// t = p + 1 - #E(F_p) for y^2 = x^3 + a x + b.
inline i64 point_count_trace(i64 a, i64 b, i64 p) {
  if (p <= 3 || !is_prime(p)) throw std::invalid_argument("point_count_trace: p must be a prime > 3");
  if (detail::singular(a, b, p)) throw std::invalid_argument("point_count_trace: singular curve");
  auto chi = quadratic_character_table(p);
  return -detail::char_sum(floor_mod(a, p), floor_mod(b, p), p, chi);
}

enum class CensusMethod { batched, direct };

struct CensusOptions {
  unsigned threads = 1;
  CensusMethod method = CensusMethod::batched;
};

/// One representative per F_p-isomorphism class: y^2 = x^3 + c x + c and its
/// quadratic twist for j outside {0, 1728}, explicit twist cosets otherwise.
inline std::vector<CurveClass> curve_classes(i64 p, CensusOptions opt = {}) {
  detail::require_census_prime(p, kCensusMaxPrime);
  const auto chi = quadratic_character_table(p);
  const i64 n = least_nonresidue(p);
  const i64 n2 = static_cast<i64>(mul_mod(n, n, p)), n3 = static_cast<i64>(mul_mod(n2, n, p));
  const i64 bad = static_cast<i64>(mul_mod(floor_mod(-27, p), inverse_mod(4, p), p));

  std::vector<i64> trace;
  if (opt.method == CensusMethod::batched) {
    trace = detail::generic_traces_batched(p, chi);
  } else {
    trace.assign(static_cast<std::size_t>(p), 0);
    parallel_chunks(static_cast<std::size_t>(p), 256, opt.threads, [&](std::size_t, std::size_t lo, std::size_t hi) {
      for (std::size_t c = lo; c < hi; ++c) {
        if (c == 0 || static_cast<i64>(c) == bad) continue;
        trace[c] = -detail::char_sum(static_cast<i64>(c), static_cast<i64>(c), p, chi);
      }
    });
  }

  std::vector<CurveClass> out;
  out.reserve(static_cast<std::size_t>(2 * p + 10));
  for (i64 c = 1; c < p; ++c) {
    if (c == bad) continue;
    i64 j = detail::j_invariant(c, c, p);
    out.push_back({p, c, c, j, trace[c], 2});
    out.push_back({p, static_cast<i64>(mul_mod(c, n2, p)), static_cast<i64>(mul_mod(c, n3, p)), j, -trace[c], 2});
  }
  const i64 g = primitive_root(p);
  const int aut0 = static_cast<int>(std::gcd<i64, i64>(6, p - 1));
  const int aut1728 = static_cast<int>(std::gcd<i64, i64>(4, p - 1));
  i64 gi = 1;
  for (int i = 0; i < aut0; ++i) {
    out.push_back({p, 0, gi, 0, -detail::char_sum(0, gi, p, chi), aut0});
    gi = static_cast<i64>(mul_mod(gi, g, p));
  }
  gi = 1;
  for (int i = 0; i < aut1728; ++i) {
    out.push_back({p, gi, 0, 1728 % p, -detail::char_sum(gi, 0, p, chi), aut1728});
    gi = static_cast<i64>(mul_mod(gi, g, p));
  }
  return out;
}

/// N_{t,p} with weights 2/#Aut, and the plain class count per trace.
inline TraceCensus weighted_census(i64 p, CensusOptions opt = {}) {
  auto classes = curve_classes(p, opt);
  TraceCensus out(p, true);
  const i64 T = out.max_trace();
  std::vector<i64> six(static_cast<std::size_t>(2 * T + 1), 0);
  for (const auto& e : classes) {
    six.at(static_cast<std::size_t>(e.trace + T)) += 12 / e.aut_order;
    out.unweighted(e.trace) += 1;
  }
  for (i64 t = -T; t <= T; ++t) {
    Rational w(static_cast<long>(six[t + T]), 6);
    w.canonicalize();
    out.weighted(t) = w;
  }
  return out;
}

/// Oracle: point-count every nonsingular (a, b). Each class owns (p-1)/#Aut
/// pairs, so N_t = 2 #{(a,b) : trace t}/(p-1). Classes are the orbits of
/// (a, b) -> (u^4 a, u^6 b).
inline TraceCensus slow_pair_census(i64 p) {
  detail::require_census_prime(p, kSlowCensusMaxPrime);
  const auto chi = quadratic_character_table(p);
  TraceCensus out(p, true);
  const i64 T = out.max_trace();
  std::vector<i64> pairs(static_cast<std::size_t>(2 * T + 1), 0);
  std::vector<i64> tr(static_cast<std::size_t>(p * p), 0);
  std::vector<i64> cnt(static_cast<std::size_t>(p));
  for (i64 a = 0; a < p; ++a) {
    std::fill(cnt.begin(), cnt.end(), 0);
    for (i64 x = 0; x < p; ++x) cnt[(x * x % p * x + a * x) % p]++;
    for (i64 b = 0; b < p; ++b) {
      if (detail::singular(a, b, p)) continue;
      i64 s = 0;
      for (i64 v = 0; v < p; ++v) {
        if (cnt[v]) s += cnt[v] * chi[(v + b) % p];
      }
      tr[a * p + b] = -s;
      pairs.at(static_cast<std::size_t>(-s + T)) += 1;
    }
  }
  for (i64 t = -T; t <= T; ++t) {
    Rational w(static_cast<long>(2 * pairs[t + T]), static_cast<long>(p - 1));
    w.canonicalize();
    out.weighted(t) = w;
  }
  std::vector<char> seen(static_cast<std::size_t>(p * p), 0);
  for (i64 a = 0; a < p; ++a) {
    for (i64 b = 0; b < p; ++b) {
      if (seen[a * p + b] || detail::singular(a, b, p)) continue;
      out.unweighted(tr[a * p + b]) += 1;
      for (i64 u = 1; u < p; ++u) {
        i64 u2 = u * u % p, u4 = u2 * u2 % p, u6 = u4 * u2 % p;
        seen[(a * u4 % p) * p + (b * u6 % p)] = 1;
      }
    }
  }
  return out;
}

/// N_{t,p} = H(t^2 - 4p) for every trace. Weighted counts only.
inline TraceCensus census_via_class_numbers(i64 p, unsigned threads = 1) {
  if (p <= 3 || !is_prime(p)) throw std::invalid_argument("census_via_class_numbers: p must be a prime > 3");
  TraceCensus out(p, false);
  const i64 T = out.max_trace();
  std::vector<i64> six(static_cast<std::size_t>(T + 1));
  parallel_chunks(static_cast<std::size_t>(T + 1), 16, threads, [&](std::size_t, std::size_t lo, std::size_t hi) {
    for (std::size_t t = lo; t < hi; ++t) {
      i64 ti = static_cast<i64>(t);
      six[t] = detail::hurwitz_times6(ti * ti - 4 * p);
    }
  });
  for (i64 t = 0; t <= T; ++t) {
    Rational w(static_cast<long>(six[t]), 6);
    w.canonicalize();
    out.weighted(t) = w;
    out.weighted(-t) = w;
  }
  return out;
}

/// Law of N_{t,p} (or N'_{t,p}) for t uniform on the integer Hasse range.
inline DiscreteDist isogeny_size_distribution(const TraceCensus& c, bool weighted = true) {
  const i64 T = c.max_trace();
  const Rational m(1, static_cast<unsigned long>(2 * T + 1));
  std::vector<Atom> atoms;
  atoms.reserve(static_cast<std::size_t>(2 * T + 1));
  for (i64 t = -T; t <= T; ++t) {
    Rational v = weighted ? c.weighted(t) : Rational(static_cast<long>(c.unweighted(t)));
    atoms.push_back({v, m});
  }
  return DiscreteDist::from_atoms(std::move(atoms));
}

}  // namespace satocensus
