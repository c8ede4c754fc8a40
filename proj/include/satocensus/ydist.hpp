#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "arith.hpp"
#include "discrete_dist.hpp"
#include "gekeler.hpp"
#include "parallel.hpp"
#include "rational.hpp"

namespace satocensus {

enum class TwoAdicCase { p_is_2, three_mod_4, five_mod_8, one_mod_8 };

inline const char* to_string(TwoAdicCase c) {
  switch (c) {
    case TwoAdicCase::p_is_2: return "p=2";
    case TwoAdicCase::three_mod_4: return "3mod4";
    case TwoAdicCase::five_mod_8: return "5mod8";
    case TwoAdicCase::one_mod_8: return "1mod8";
  }
  return "?";
}

/// What the law of v_l(t^2 - 4p) remembers about p: (p/l) for odd l (0 when
/// p = l), the residue case mod 8 for l = 2.
struct PrimeClass {
  i64 l = 3;
  int symbol = 1;
  TwoAdicCase two = TwoAdicCase::one_mod_8;

  static PrimeClass odd(i64 l, int symbol) {
    if (l == 2 || !is_prime(l)) throw std::invalid_argument("PrimeClass::odd: l must be an odd prime");
    if (symbol < -1 || symbol > 1) throw std::invalid_argument("PrimeClass::odd: bad symbol");
    return {l, symbol, TwoAdicCase::one_mod_8};
  }
  static PrimeClass two_adic(TwoAdicCase c) { return {2, 0, c}; }

  static PrimeClass of(i64 l, i64 p) {
    if (!is_prime(l) || !is_prime(p)) throw std::invalid_argument("PrimeClass::of: needs primes");
    if (l != 2) return odd(l, kronecker(p, l));
    if (p == 2) return two_adic(TwoAdicCase::p_is_2);
    if (p % 4 == 3) return two_adic(TwoAdicCase::three_mod_4);
    if (p % 8 == 5) return two_adic(TwoAdicCase::five_mod_8);
    return two_adic(TwoAdicCase::one_mod_8);
  }

  /// A prime in this class.
  i64 representative() const {
    if (l == 2) {
      switch (two) {
        case TwoAdicCase::p_is_2: return 2;
        case TwoAdicCase::three_mod_4: return 3;
        case TwoAdicCase::five_mod_8: return 5;
        case TwoAdicCase::one_mod_8: return 17;
      }
    }
    if (symbol == 0) return l;
    for (i64 q = 2;; ++q)
      if (q != l && is_prime(q) && kronecker(q, l) == symbol) return q;
  }

  std::string label() const {
    if (l == 2) return std::string("l=2,") + to_string(two);
    return "l=" + std::to_string(l) + ",(p/l)=" + std::to_string(symbol);
  }

  bool operator==(const PrimeClass& o) const {
    if (l != o.l) return false;
    return l == 2 ? two == o.two : symbol == o.symbol;
  }
};

/// One table entry. depth/symbol record the (delta, symbol) event behind the
/// value; kMixedDepth marks entries whose value is already l/(l-1).
struct LawAtom {
  Rational value;
  Rational mass;
  int depth = 0;
  int symbol = 0;
};

inline constexpr int kMixedDepth = -1;

/// Entries value = base + coeff * ratio^s with mass mass_coeff * mass_ratio^s
/// for s >= 1, event depth s + depth_offset.
struct LawFamily {
  Rational base, coeff, ratio;
  Rational mass_coeff, mass_ratio;
  int depth_offset = 0;
  int symbol = 0;

  Rational value(int s) const { return base + coeff * rational_pow(ratio, static_cast<unsigned long>(s)); }
  Rational mass(int s) const { return mass_coeff * rational_pow(mass_ratio, static_cast<unsigned long>(s)); }
  int depth(int s) const { return s + depth_offset; }

  // sum_{s > from} mass(s) * value(s)^j for j = 0, 1, 2
  std::array<Rational, 3> tail_sums(int from) const {
    auto geo = [&](const Rational& q) -> Rational {  // sum_{s > from} q^s
      return rational_pow(q, static_cast<unsigned long>(from + 1)) / (1 - q);
    };
    const Rational& A = base;
    const Rational& B = coeff;
    const Rational& r = ratio;
    const Rational& q = mass_ratio;
    Rational g0 = geo(q), g1 = geo(r * q), g2 = geo(r * r * q);
    std::array<Rational, 3> out;
    out[0] = mass_coeff * g0;
    out[1] = mass_coeff * (A * g0 + B * g1);
    out[2] = mass_coeff * (A * A * g0 + 2 * A * B * g1 + B * B * g2);
    return out;
  }
};

struct LocalLaw {
  i64 l = 2;
  PrimeClass cls;
  std::vector<LawAtom> atoms;
  std::vector<LawFamily> families;
};

inline Rational collapse_value(i64 l) { return Rational(static_cast<long>(l), static_cast<long>(l - 1)); }

/// Exact law of Y_{l,p} for the given class.
inline LocalLaw y_law(const PrimeClass& cls) {
  const i64 l = cls.l;
  LocalLaw law{l, cls, {}, {}};
  const Rational L(static_cast<long>(l));
  const Rational top = collapse_value(l);
  if (l != 2) {
    const Rational down = L / (L + 1);
    if (cls.symbol == 0) {
      law.atoms.push_back({top, (L - 1) / L, kMixedDepth, 1});
      law.atoms.push_back({Rational(1), 1 / L, 0, 0});
    } else if (cls.symbol == -1) {
      law.atoms.push_back({down, (L + 1) / (2 * L), 0, -1});
      law.atoms.push_back({top, (L - 1) / (2 * L), kMixedDepth, 1});
    } else {
      law.atoms.push_back({down, (L - 1) / (2 * L), 0, -1});
      law.atoms.push_back({top, (L * L - 2 * L - 1) / (2 * (L * L + L)), kMixedDepth, 1});
      law.families.push_back({top, -top, 1 / L, 2 * (L - 1), 1 / (L * L), -1, 0});
      law.families.push_back({top, -2 * L / (L * L - 1), 1 / L, (L - 1) / L, 1 / (L * L), 0, -1});
    }
    return law;
  }
  auto R = [](long a, long b) { return Rational(a, b); };
  switch (cls.two) {
    case TwoAdicCase::p_is_2:
      law.atoms = {{R(1, 1), R(1, 2), 0, 0}, {R(2, 1), R(1, 2), kMixedDepth, 1}};
      break;
    case TwoAdicCase::three_mod_4:
      law.atoms = {{R(2, 3), R(1, 2), 0, -1},
                   {R(1, 1), R(1, 4), 0, 0},
                   {R(4, 3), R(1, 8), 1, -1},
                   {R(2, 1), R(1, 8), kMixedDepth, 1}};
      break;
    case TwoAdicCase::five_mod_8:
      law.atoms = {{R(2, 3), R(1, 2), 0, -1},
                   {R(1, 1), R(1, 4), 0, 0},
                   {R(3, 2), R(1, 8), 1, 0},
                   {R(5, 3), R(1, 16), 2, -1},
                   {R(2, 1), R(1, 16), kMixedDepth, 1}};
      break;
    case TwoAdicCase::one_mod_8:
      law.atoms = {{R(2, 3), R(1, 2), 0, -1},
                   {R(1, 1), R(1, 4), 0, 0},
                   {R(3, 2), R(1, 8), 1, 0},
                   {R(2, 1), R(1, 48), kMixedDepth, 1}};
      law.families.push_back({R(2, 1), R(-1, 2), R(1, 2), R(1, 4), R(1, 4), 1, 0});
      law.families.push_back({R(2, 1), R(-1, 3), R(1, 2), R(1, 16), R(1, 4), 2, -1});
      break;
  }
  return law;
}

/// Table with family entries s <= S spelled out and the remaining family mass
/// parked as a tail at l/(l-1). The tail keeps its exact moment sums.
inline DiscreteDist y_table(i64 l, const PrimeClass& cls, int S) {
  if (S < 1) throw std::invalid_argument("y_table: S must be >= 1");
  if (cls.l != l) throw std::invalid_argument("y_table: class belongs to a different l");
  const LocalLaw law = y_law(cls);
  std::vector<Atom> atoms;
  for (const auto& a : law.atoms) atoms.push_back({a.value, a.mass});
  std::optional<TailMass> tail;
  if (!law.families.empty()) {
    TailMass tm{Rational(0), collapse_value(l), Rational(0), Rational(0), true};
    for (const auto& f : law.families) {
      for (int s = 1; s <= S; ++s) atoms.push_back({f.value(s), f.mass(s)});
      auto ts = f.tail_sums(S);
      tm.mass += ts[0];
      tm.first_moment += ts[1];
      tm.second_moment += ts[2];
    }
    tail = tm;
  }
  return DiscreteDist::from_atoms(std::move(atoms), tail);
}

inline DiscreteDist y_table(const PrimeClass& cls, int S) { return y_table(cls.l, cls, S); }

namespace detail {

inline i64 checked_power(i64 l, int e, i64 ceiling) {
  i64 M = 1;
  for (int i = 0; i < e; ++i) {
    if (M > ceiling / l) throw std::invalid_argument("enumeration ceiling exceeded");
    M *= l;
  }
  if (M > ceiling) throw std::invalid_argument("enumeration ceiling exceeded");
  return M;
}

// An entry at depth d with the given symbol is still resolved at level k
// (i.e. l^(2k) does not divide Delta on its event).
inline bool visible_at(i64 l, int depth, int symbol, int k) {
  if (depth == kMixedDepth) return false;
  const int bound = k - 1 - ((l == 2 && symbol == 0) ? 1 : 0);
  return depth <= bound;
}

}  // namespace detail

inline constexpr i64 kEnumerationCeiling = 10'000'000;

/// Law of v_{l,k}(t^2 - 4p) for t uniform mod l^(2k), by direct enumeration.
inline DiscreteDist y_k_enumerated(i64 l, i64 p, int k, i64 ceiling = kEnumerationCeiling) {
  if (k < 1) throw std::invalid_argument("y_k_enumerated: k must be >= 1");
  const i64 M = detail::checked_power(l, 2 * k, ceiling);
  // counts[delta][symbol+1], plus the collapsed bucket
  std::vector<std::array<i64, 3>> counts(static_cast<std::size_t>(k), {0, 0, 0});
  i64 collapsed = 0;
  const i64 fp = 4 * p;
  for (i64 t = 0; t < M; ++t) {
    const i64 D = t * t - fp;
    if (D % M == 0) {
      ++collapsed;
      continue;
    }
    auto sp = padic_split(D, l);
    int s = kronecker(sp.reduced, l);
    counts.at(static_cast<std::size_t>(sp.delta))[s + 1] += 1;
  }
  std::vector<Atom> atoms;
  const Rational denom(static_cast<long>(M));
  if (collapsed) atoms.push_back({collapse_value(l), Rational(static_cast<long>(collapsed)) / denom});
  for (int d = 0; d < k; ++d)
    for (int s = -1; s <= 1; ++s)
      if (counts[d][s + 1]) atoms.push_back({local_factor_value(l, d, s), Rational(static_cast<long>(counts[d][s + 1])) / denom});
  return DiscreteDist::from_atoms(std::move(atoms));
}

/// Law of Y_{l,p,k} read off the table: entries whose event is too deep for
/// level k move to l/(l-1).
inline DiscreteDist y_k_from_table(const PrimeClass& cls, int k) {
  if (k < 1) throw std::invalid_argument("y_k_from_table: k must be >= 1");
  const LocalLaw law = y_law(cls);
  const i64 l = cls.l;
  std::vector<Atom> atoms;
  Rational deep = 0;
  for (const auto& a : law.atoms) {
    if (detail::visible_at(l, a.depth, a.symbol, k)) atoms.push_back({a.value, a.mass});
    else deep += a.mass;
  }
  for (const auto& f : law.families) {
    int s = 1;
    for (; detail::visible_at(l, f.depth(s), f.symbol, k); ++s) atoms.push_back({f.value(s), f.mass(s)});
    deep += f.tail_sums(s - 1)[0];
  }
  atoms.push_back({collapse_value(l), deep});
  return DiscreteDist::from_atoms(std::move(atoms));
}

struct Moments {
  Rational mean;
  Rational variance;
};

struct RealMoments {
  double mean = 0;
  double variance = 0;
};

inline Moments moments(const LocalLaw& law) {
  Rational m1 = 0, m2 = 0;
  for (const auto& a : law.atoms) {
    m1 += a.value * a.mass;
    m2 += a.value * a.value * a.mass;
  }
  for (const auto& f : law.families) {
    auto ts = f.tail_sums(0);
    m1 += ts[1];
    m2 += ts[2];
  }
  return {m1, m2 - m1 * m1};
}

/// Exact moments. A tail carrying exact moment sums uses them.
inline Moments moments(const DiscreteDist& d) {
  Rational m1 = 0, m2 = 0;
  for (const auto& a : d.atoms()) {
    m1 += a.value * a.mass;
    m2 += a.value * a.value * a.mass;
  }
  if (d.tail()) {
    const auto& t = *d.tail();
    if (t.exact_moments) {
      m1 += t.first_moment;
      m2 += t.second_moment;
    } else {
      m1 += t.value * t.mass;
      m2 += t.value * t.value * t.mass;
    }
  }
  return {m1, m2 - m1 * m1};
}

inline RealMoments log_moments(const LocalLaw& law, int max_s = 400) {
  double m1 = 0, m2 = 0;
  auto add = [&](const Rational& v, const Rational& m) {
    double lv = std::log(v.get_d()), mm = m.get_d();
    m1 += lv * mm;
    m2 += lv * lv * mm;
  };
  for (const auto& a : law.atoms) add(a.value, a.mass);
  for (const auto& f : law.families)
    for (int s = 1; s <= max_s; ++s) {
      Rational m = f.mass(s);
      if (m.get_d() < 1e-300) break;
      add(f.value(s), m);
    }
  return {m1, m2 - m1 * m1};
}

inline RealMoments log_moments(const DiscreteDist& d) {
  double m1 = 0, m2 = 0;
  auto add = [&](const Rational& v, const Rational& m) {
    double lv = std::log(v.get_d()), mm = m.get_d();
    m1 += lv * mm;
    m2 += lv * lv * mm;
  };
  for (const auto& a : d.atoms()) add(a.value, a.mass);
  if (d.tail()) add(d.tail()->value, d.tail()->mass);
  return {m1, m2 - m1 * m1};
}

/// Classes of p at every prime l < l1.
inline std::vector<PrimeClass> class_vector(i64 p, i64 l1) {
  std::vector<PrimeClass> out;
  for (i64 l : primes_up_to(l1)) out.push_back(PrimeClass::of(l, p));
  return out;
}

struct ZTruncation {
  DiscreteDist dist;
  double pruned_mass = 0;
  std::size_t pruned_atoms = 0;
};

inline constexpr std::size_t kZAtomCap = 100'000;

namespace detail {

struct KeyedAtom {
  double approx;
  Rational value;
  Rational mass;
};

inline void sort_merge(std::vector<KeyedAtom>& v) {
  std::sort(v.begin(), v.end(), [](const KeyedAtom& a, const KeyedAtom& b) {
    if (a.approx != b.approx) return a.approx < b.approx;
    return a.value < b.value;
  });
  std::size_t w = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (w && v[w - 1].value == v[i].value) {
      v[w - 1].mass += v[i].mass;
    } else {
      if (w != i) v[w] = std::move(v[i]);
      ++w;
    }
  }
  v.resize(w);
}

// Fold atoms lighter than eps into the nearest kept value.
inline void prune(std::vector<KeyedAtom>& v, double eps, double& pruned_mass, std::size_t& pruned_atoms) {
  if (eps <= 0 || v.empty()) return;
  std::vector<char> keep(v.size());
  bool any = false;
  for (std::size_t i = 0; i < v.size(); ++i) {
    keep[i] = v[i].mass.get_d() >= eps;
    any = any || keep[i];
  }
  if (!any) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < v.size(); ++i)
      if (v[i].mass > v[best].mass) best = i;
    keep[best] = 1;
  }
  const std::size_t n = v.size(), none = static_cast<std::size_t>(-1);
  std::vector<std::size_t> left(n, none), right(n, none);
  for (std::size_t i = 0, last = none; i < n; ++i) {
    left[i] = last;
    if (keep[i]) last = i;
  }
  for (std::size_t i = n, last = none; i-- > 0;) {
    right[i] = last;
    if (keep[i]) last = i;
  }
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < n; ++i) {
    if (keep[i]) {
      kept.push_back(i);
      continue;
    }
    std::size_t target = left[i];
    if (target == none || (right[i] != none && v[right[i]].approx - v[i].approx < v[i].approx - v[target].approx))
      target = right[i];
    v[target].mass += v[i].mass;
    pruned_mass += v[i].mass.get_d();
    ++pruned_atoms;
  }
  std::vector<KeyedAtom> out;
  out.reserve(kept.size());
  for (std::size_t i : kept) out.push_back(std::move(v[i]));
  v.swap(out);
}

}  // namespace detail

/// Independent product of Y_{l,p,k} over the given classes, exact up to the
/// reported pruning.
inline ZTruncation z_truncated(const std::vector<PrimeClass>& classes, int k, double prune_eps = 0,
                               std::size_t cap = kZAtomCap) {
  if (prune_eps < 0) throw std::invalid_argument("z_truncated: prune_eps must be >= 0");
  std::vector<detail::KeyedAtom> cur{{1.0, Rational(1), Rational(1)}};
  ZTruncation out;
  for (const auto& cls : classes) {
    const DiscreteDist f = y_k_from_table(cls, k);
    std::vector<detail::KeyedAtom> next;
    next.reserve(cur.size() * f.size());
    for (const auto& a : cur)
      for (const auto& b : f.atoms()) {
        Rational v = a.value * b.value;
        next.push_back({v.get_d(), v, a.mass * b.mass});
      }
    detail::sort_merge(next);
    detail::prune(next, prune_eps, out.pruned_mass, out.pruned_atoms);
    if (next.size() > cap)
      throw std::length_error("z_truncated: support exceeds cap of " + std::to_string(cap) +
                              " atoms; raise prune_eps");
    cur.swap(next);
  }
  std::vector<Atom> atoms;
  atoms.reserve(cur.size());
  for (auto& a : cur) atoms.push_back({std::move(a.value), std::move(a.mass)});
  out.dist = DiscreteDist::from_atoms(std::move(atoms));
  return out;
}

inline ZTruncation z_truncated(i64 p, i64 l1, int k, double prune_eps = 0, std::size_t cap = kZAtomCap) {
  if (l1 < 3) throw std::invalid_argument("z_truncated: l1 must be >= 3");
  return z_truncated(class_vector(p, l1), k, prune_eps, cap);
}

inline constexpr std::size_t kSampleChunk = 4096;

/// Inverse-CDF sampler on exact cumulative masses. A 53-bit uniform integer u
/// selects the first atom whose cumulative threshold ceil(cum * 2^53) exceeds u.
class AtomSampler {
 public:
  explicit AtomSampler(const DiscreteDist& d) {
    const DiscreteDist c = d.collapsed();
    Rational cum = 0;
    const BigInt scale = BigInt(1) << 53;
    for (const auto& a : c.atoms()) {
      cum += a.mass;
      BigInt num = cum.get_num() * scale;
      BigInt q;
      mpz_cdiv_q(q.get_mpz_t(), num.get_mpz_t(), cum.get_den().get_mpz_t());
      thresholds_.push_back(static_cast<u64>(q.get_ui()));
      values_.push_back(a.value.get_d());
    }
  }

  template <class Rng>
  double draw(Rng& rng) const {
    const u64 u = rng() >> 11;
    auto it = std::upper_bound(thresholds_.begin(), thresholds_.end(), u);
    std::size_t i = static_cast<std::size_t>(it - thresholds_.begin());
    if (i >= values_.size()) i = values_.size() - 1;
    return values_[i];
  }

 private:
  std::vector<u64> thresholds_;
  std::vector<double> values_;
};

/// Per-chunk generator: chunk c of a run seeded by seed.
inline std::mt19937_64 chunk_rng(std::uint64_t seed, std::uint64_t chunk) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(chunk & 0xffffffffu), static_cast<std::uint32_t>(chunk >> 32)};
  return std::mt19937_64(seq);
}

inline std::vector<double> z_sample(const DiscreteDist& d, std::size_t n, std::uint64_t seed, unsigned threads = 1) {
  if (n == 0) throw std::invalid_argument("z_sample: n must be >= 1");
  const AtomSampler s(d);
  std::vector<double> out(n);
  parallel_chunks(n, kSampleChunk, threads, [&](std::size_t c, std::size_t lo, std::size_t hi) {
    auto rng = chunk_rng(seed, c);
    for (std::size_t i = lo; i < hi; ++i) out[i] = s.draw(rng);
  });
  return out;
}

/// Draws of the product of independent factors, one factor after another.
inline std::vector<double> z_sample(const std::vector<DiscreteDist>& factors, std::size_t n, std::uint64_t seed,
                                    unsigned threads = 1) {
  if (n == 0) throw std::invalid_argument("z_sample: n must be >= 1");
  std::vector<AtomSampler> ss;
  for (const auto& f : factors) ss.emplace_back(f);
  std::vector<double> out(n);
  parallel_chunks(n, kSampleChunk, threads, [&](std::size_t c, std::size_t lo, std::size_t hi) {
    auto rng = chunk_rng(seed, c);
    for (std::size_t i = lo; i < hi; ++i) {
      double v = 1;
      for (const auto& s : ss) v *= s.draw(rng);
      out[i] = v;
    }
  });
  return out;
}

}  // namespace satocensus
