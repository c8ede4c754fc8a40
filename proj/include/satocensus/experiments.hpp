#pragma once

#if __has_include(<nlohmann/json.hpp>)
#include <nlohmann/json.hpp>
#else
#include "json.hpp"
#endif

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "census.hpp"
#include "classno.hpp"
#include "gekeler.hpp"
#include "histogram.hpp"
#include "metric.hpp"
#include "ydist.hpp"

namespace satocensus {

using json = nlohmann::json;

/// Run record. stats must only hold values that depend on the inputs, so two
/// runs with equal params give equal stats.
struct ExperimentReport {
  std::string name;
  json params = json::object();
  json stats = json::object();
  std::vector<std::string> artifacts;
  double runtime_seconds = 0;

  json to_json() const {
    return json{{"name", name}, {"params", params}, {"stats", stats}, {"artifacts", artifacts},
                {"runtime_seconds", runtime_seconds}};
  }
};

enum class Mod8Tag { one_mod_8, three_mod_4, five_mod_8 };

inline const char* to_string(Mod8Tag t) {
  switch (t) {
    case Mod8Tag::one_mod_8: return "1mod8";
    case Mod8Tag::three_mod_4: return "3mod4";
    case Mod8Tag::five_mod_8: return "5mod8";
  }
  return "?";
}

inline bool matches(Mod8Tag t, i64 p) {
  switch (t) {
    case Mod8Tag::one_mod_8: return p % 8 == 1;
    case Mod8Tag::three_mod_4: return p % 4 == 3;
    case Mod8Tag::five_mod_8: return p % 8 == 5;
  }
  return false;
}

struct PatternConstraint {
  std::map<i64, int> symbols;  // odd prime l -> required (p/l)
  std::optional<Mod8Tag> mod8;

  PatternConstraint& require_symbol(i64 l, int e) {
    if (l == 2 || !is_prime(l)) throw std::invalid_argument("require_symbol: l must be an odd prime");
    if (e != 1 && e != -1) throw std::invalid_argument("require_symbol: symbol must be +1 or -1");
    auto [it, fresh] = symbols.emplace(l, e);
    if (!fresh && it->second != e) throw std::invalid_argument("inconsistent constraint at l = " + std::to_string(l));
    return *this;
  }

  PatternConstraint& require_mod8(Mod8Tag t) {
    if (mod8 && *mod8 != t) throw std::invalid_argument("inconsistent mod 8 constraint");
    mod8 = t;
    return *this;
  }

  bool accepts(i64 p) const {
    if (mod8 && !matches(*mod8, p)) return false;
    for (auto [l, e] : symbols)
      if (kronecker(p, l) != e) return false;
    return true;
  }

  json to_json() const {
    json j = json::object();
    json s = json::object();
    for (auto [l, e] : symbols) s[std::to_string(l)] = e;
    j["symbols"] = s;
    j["mod8"] = mod8 ? json(to_string(*mod8)) : json(nullptr);
    return j;
  }
};

inline std::vector<i64> find_primes_with_pattern(const PatternConstraint& c, std::size_t count, i64 start = 2) {
  std::vector<i64> out;
  for (i64 n = std::max<i64>(start, 2); out.size() < count; ++n)
    if (is_prime(n) && c.accepts(n)) out.push_back(n);
  return out;
}

// ---- CSV helpers -----------------------------------------------------------

inline std::string fmt17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline void write_cloud_csv(const std::string& path, const PointCloud& c) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  os << (c.dim == 1 ? "x,mass\n" : "x,y,mass\n");
  for (std::size_t i = 0; i < c.size(); ++i) {
    os << fmt17(c.points[i][0]);
    if (c.dim == 2) os << ',' << fmt17(c.points[i][1]);
    os << ',' << fmt17(c.masses[i]) << '\n';
  }
}

inline PointCloud read_cloud_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot read " + path);
  std::string line;
  std::getline(is, line);
  const int cols = static_cast<int>(std::count(line.begin(), line.end(), ',')) + 1;
  if (cols != 2 && cols != 3) throw std::runtime_error("bad point cloud header in " + path);
  PointCloud c;
  c.dim = cols - 1;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> v;
    while (std::getline(ss, cell, ',')) v.push_back(std::stod(cell));
    if (static_cast<int>(v.size()) != cols) throw std::runtime_error("bad row in " + path);
    c.points.push_back({v[0], c.dim == 2 ? v[1] : 0.0});
    c.masses.push_back(v.back());
  }
  c.validate();
  return c;
}

inline void write_dist_csv(const std::string& path, const DiscreteDist& d) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  os << "value_num,value_den,mass_num,mass_den\n";
  const DiscreteDist c = d.collapsed();
  for (const auto& a : c.atoms())
    os << a.value.get_num().get_str() << ',' << a.value.get_den().get_str() << ',' << a.mass.get_num().get_str()
       << ',' << a.mass.get_den().get_str() << '\n';
}

inline PointCloud to_cloud(const DiscreteDist& d) {
  const DiscreteDist c = d.collapsed();
  std::vector<double> xs, ms;
  for (const auto& a : c.atoms()) {
    xs.push_back(a.value.get_d());
    ms.push_back(a.mass.get_d());
  }
  double s = std::accumulate(ms.begin(), ms.end(), 0.0);
  for (auto& m : ms) m /= s;
  return PointCloud::from_1d(xs, ms);
}

namespace detail {

class Stopwatch {
 public:
  double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count(); }

 private:
  std::chrono::steady_clock::time_point t0_ = std::chrono::steady_clock::now();
};

inline std::string artifact_path(const std::string& dir, const std::string& file) {
  std::filesystem::create_directories(dir);
  return (std::filesystem::path(dir) / file).string();
}

inline TraceCensus best_census(i64 p, unsigned threads) {
  if (p <= kCensusMaxPrime) return weighted_census(p, {threads, CensusMethod::batched});
  return census_via_class_numbers(p, threads);
}

// Seeded choice of k indices out of n, returned sorted.
inline std::vector<std::size_t> subsample_indices(std::size_t n, std::size_t k, std::uint64_t seed) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  if (k >= n) return idx;
  auto rng = chunk_rng(seed, 0xC0FFEEull);
  for (std::size_t i = 0; i < k; ++i) {
    std::size_t j = i + static_cast<std::size_t>(rng() % (n - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  return idx;
}

inline PointCloud uniform_cloud_2d(const std::vector<std::array<double, 2>>& pts) {
  PointCloud c;
  c.dim = 2;
  c.points = pts;
  c.masses.assign(pts.size(), 1.0 / static_cast<double>(pts.size()));
  return c;
}

// Kolmogorov-Smirnov statistic of a sample against uniform on [a, b].
inline double ks_uniform(std::vector<double> xs, double a, double b) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double f = std::clamp((xs[i] - a) / (b - a), 0.0, 1.0);
    d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
  }
  return d;
}

}  // namespace detail

// ---- commands --------------------------------------------------------------

/// N_{t,p} = H(t^2 - 4p) for every prime in range and every trace.
inline ExperimentReport cmd_gekeler_verify(i64 p_min, i64 p_max, unsigned threads = 1) {
  detail::Stopwatch sw;
  if (p_min < 4 || p_max < p_min || p_max > kSlowCensusMaxPrime)
    throw std::invalid_argument("cmd_gekeler_verify: need 4 <= p_min <= p_max <= 500");
  ExperimentReport r;
  r.name = "verify";
  r.params = {{"p_min", p_min}, {"p_max", p_max}};
  std::size_t primes = 0, comparisons = 0;
  json mismatches = json::array(), supersingular = json::array();
  std::vector<i64> checked;
  for (i64 p = p_min; p <= p_max; ++p) {
    if (p <= 3 || !is_prime(p)) continue;
    ++primes;
    checked.push_back(p);
    auto c = weighted_census(p, {threads, CensusMethod::batched});
    for (i64 t = -c.max_trace(); t <= c.max_trace(); ++t) {
      ++comparisons;
      Rational h = hurwitz_class_number(t * t - 4 * p);
      if (h != c.weighted(t)) {
        mismatches.push_back({{"p", p}, {"t", t}, {"census", to_string(c.weighted(t))}, {"hurwitz", to_string(h)}});
        if (t == 0) supersingular.push_back(p);
      }
    }
  }
  r.stats = {{"primes_checked", primes},
             {"primes", checked},
             {"comparisons", comparisons},
             {"mismatch_count", mismatches.size()},
             {"mismatches", mismatches},
             {"t0_counterexamples", supersingular}};
  r.runtime_seconds = sw.seconds();
  return r;
}

/// Histogram of t / sqrt p over equal bins against semicircle bin masses.
inline ExperimentReport cmd_vertical_st(i64 p, int bins, const std::string& out_dir = "", unsigned threads = 1) {
  detail::Stopwatch sw;
  ExperimentReport r;
  r.name = "vertical";
  const bool enumerated = p <= kCensusMaxPrime;
  r.params = {{"p", p}, {"bins", bins}, {"source", enumerated ? "census" : "class_numbers"}};
  auto c = detail::best_census(p, threads);
  auto bd = bin_deviation(c, bins);
  r.stats = {{"sup_deviation", bd.sup_deviation}, {"traces", 2 * c.max_trace() + 1}};
  if (!out_dir.empty()) {
    auto path = detail::artifact_path(out_dir, "vertical_p" + std::to_string(p) + ".csv");
    std::ofstream os(path);
    os << "bin_lo,bin_hi,empirical,semicircle\n";
    for (int b = 0; b < bins; ++b)
      os << fmt17(bd.edges[b]) << ',' << fmt17(bd.edges[b + 1]) << ',' << fmt17(bd.empirical[b]) << ','
         << fmt17(bd.semicircle[b]) << '\n';
    r.artifacts.push_back(path);
  }
  r.runtime_seconds = sw.seconds();
  return r;
}

inline i64 window_width(i64 p, double alpha) {
  return static_cast<i64>(std::ceil(std::pow(static_cast<double>(p), alpha)));
}

/// Windowed sup error with w = ceil(p^alpha).
inline ExperimentReport cmd_strong_st(i64 p, double alpha, const std::string& out_dir = "", bool sliding = false,
                                      unsigned threads = 1) {
  detail::Stopwatch sw;
  if (!(alpha > 0 && alpha < 0.5)) throw std::invalid_argument("cmd_strong_st: need 0 < alpha < 0.5");
  ExperimentReport r;
  r.name = "strong";
  const i64 w = window_width(p, alpha);
  r.params = {{"p", p}, {"alpha", alpha}, {"w", w}, {"sliding", sliding}};
  auto c = census_via_class_numbers(p, threads);
  auto we = histogram_sup_error(c, w, sliding);
  r.stats = {{"sup_error", we.sup_error}, {"argmax_start", we.argmax_start}, {"windows", we.starts.size()}};
  if (!out_dir.empty()) {
    auto path = detail::artifact_path(out_dir, "strong_p" + std::to_string(p) + ".csv");
    std::ofstream os(path);
    os << "t0,ratio,density,abs_error\n";
    const double sp = std::sqrt(static_cast<double>(p));
    for (std::size_t i = 0; i < we.starts.size(); ++i)
      os << we.starts[i] << ',' << fmt17(we.ratios[i]) << ','
         << fmt17(semicircle_density(static_cast<double>(we.starts[i]) / sp)) << ',' << fmt17(we.errors[i]) << '\n';
    r.artifacts.push_back(path);
  }
  r.runtime_seconds = sw.seconds();
  return r;
}

struct TwoDOptions {
  i64 l1 = 20;
  int k = 3;
  std::size_t n_samples = 40000;
  std::uint64_t seed = 1;
  double prune_eps = 1e-9;
  std::size_t transport_points = 1000;  // per side, for W1
  std::size_t exact_points = 150;       // per side, for the exact distance
  unsigned threads = 1;
};

struct TwoDClouds {
  PointCloud rho;
  PointCloud heuristic;
};

/// rho_p = uniform over integer traces of (t / sqrt p, N_t / (2 sqrt p)) and
/// n draws of (X, sqrt(4 - X^2) Z / (2 pi)).
inline TwoDClouds build_2d_clouds(const TraceCensus& c, const DiscreteDist& z, std::size_t n, std::uint64_t seed,
                                  unsigned threads = 1) {
  const double sp = std::sqrt(static_cast<double>(c.p()));
  std::vector<std::array<double, 2>> rho;
  for (i64 t = -c.max_trace(); t <= c.max_trace(); ++t)
    rho.push_back({static_cast<double>(t) / sp, c.weighted(t).get_d() / (2 * sp)});
  auto zs = z_sample(z, n, seed, threads);
  std::vector<std::array<double, 2>> heu(n);
  parallel_chunks(n, kSampleChunk, threads, [&](std::size_t ch, std::size_t lo, std::size_t hi) {
    auto rng = chunk_rng(seed ^ 0x9E3779B97F4A7C15ull, ch);
    for (std::size_t i = lo; i < hi; ++i) {
      double x = -2.0 + 4.0 * static_cast<double>(rng() >> 11) * 0x1.0p-53;
      heu[i] = {x, std::sqrt(std::max(0.0, 4 - x * x)) * zs[i] / (2 * M_PI)};
    }
  });
  return {detail::uniform_cloud_2d(rho), detail::uniform_cloud_2d(heu)};
}

inline ExperimentReport cmd_2dst(i64 p, const TwoDOptions& o = {}, const std::string& out_dir = "") {
  detail::Stopwatch sw;
  if (p < 10000) throw std::invalid_argument("cmd_2dst: p must be >= 10^4");
  ExperimentReport r;
  r.name = "twod";
  r.params = {{"p", p},         {"l1", o.l1}, {"k", o.k}, {"n_samples", o.n_samples}, {"seed", o.seed},
              {"prune_eps", o.prune_eps}, {"transport_points", o.transport_points}, {"exact_points", o.exact_points}};
  auto c = detail::best_census(p, o.threads);
  auto z = z_truncated(p, o.l1, o.k, o.prune_eps);
  auto clouds = build_2d_clouds(c, z.dist, o.n_samples, o.seed, o.threads);

  std::vector<double> xs;
  for (const auto& q : clouds.heuristic.points) xs.push_back(q[0]);
  const double ks = detail::ks_uniform(xs, -2, 2);

  auto pick = [&](const PointCloud& cl, std::size_t k, std::uint64_t s) {
    std::vector<std::array<double, 2>> pts;
    for (auto i : detail::subsample_indices(cl.size(), k, s)) pts.push_back(cl.points[i]);
    return detail::uniform_cloud_2d(pts);
  };
  auto rho_w = pick(clouds.rho, o.transport_points, o.seed + 1);
  auto heu_w = pick(clouds.heuristic, o.transport_points, o.seed + 2);
  const double w1 = wasserstein1(rho_w, heu_w);
  auto rho_e = pick(clouds.rho, o.exact_points, o.seed + 3);
  auto heu_e = pick(clouds.heuristic, o.exact_points, o.seed + 4);
  const double exact = prokhorov_exact(rho_e, heu_e);

  r.stats = {{"prokhorov_upper", std::min(1.0, std::sqrt(w1))},
             {"w1", w1},
             {"prokhorov_exact_subsample", exact},
             {"rho_points", clouds.rho.size()},
             {"transport_sizes", {rho_w.size(), heu_w.size()}},
             {"exact_sizes", {rho_e.size(), heu_e.size()}},
             {"z_atoms", z.dist.size()},
             {"z_pruned_mass", z.pruned_mass},
             {"marginal_ks", ks}};
  if (!out_dir.empty()) {
    auto a = detail::artifact_path(out_dir, "rho_p" + std::to_string(p) + ".csv");
    auto b = detail::artifact_path(out_dir, "rho_heu_p" + std::to_string(p) + ".csv");
    write_cloud_csv(a, clouds.rho);
    write_cloud_csv(b, clouds.heuristic);
    r.artifacts = {a, b};
  }
  r.runtime_seconds = sw.seconds();
  return r;
}

/// Distance between the truncated Z laws of two primes: exact when the
/// supports fit, with equality of the exact laws short-circuiting to 0.
inline double z_distance(const DiscreteDist& a, const DiscreteDist& b, bool* exact = nullptr) {
  if (a == b) {
    if (exact) *exact = true;
    return 0.0;
  }
  auto ca = to_cloud(a), cb = to_cloud(b);
  if (ca.size() + cb.size() <= kProkhorovCap) {
    if (exact) *exact = true;
    return prokhorov_exact(ca, cb);
  }
  if (exact) *exact = false;
  return prokhorov_upper(ca, cb);
}

struct PrimeSeqOptions {
  std::size_t count = 3;
  i64 l1 = 5;
  int k = 2;
  double prune_eps = 0;
  i64 start = 2;
};

/// z_truncated along primes sharing a pattern, and against companion
/// sequences that keep the odd symbols but switch the mod 8 tag.
inline ExperimentReport cmd_prime_seq(const PatternConstraint& pc, const PrimeSeqOptions& o = {}) {
  detail::Stopwatch sw;
  ExperimentReport r;
  r.name = "primeseq";
  r.params = {{"constraint", pc.to_json()}, {"count", o.count}, {"l1", o.l1}, {"k", o.k}, {"prune_eps", o.prune_eps},
              {"start", o.start}};
  auto seq = find_primes_with_pattern(pc, o.count, o.start);
  std::vector<DiscreteDist> zs;
  for (i64 p : seq) zs.push_back(z_truncated(p, o.l1, o.k, o.prune_eps).dist);
  json intra = json::array();
  double intra_max = 0;
  for (std::size_t i = 0; i < seq.size(); ++i)
    for (std::size_t j = i + 1; j < seq.size(); ++j) {
      bool ex = false;
      double d = z_distance(zs[i], zs[j], &ex);
      intra_max = std::max(intra_max, d);
      intra.push_back({{"p", seq[i]}, {"q", seq[j]}, {"distance", d}, {"exact", ex}});
    }
  json cross = json::array();
  double cross_min = std::numeric_limits<double>::infinity();
  for (Mod8Tag tag : {Mod8Tag::one_mod_8, Mod8Tag::three_mod_4, Mod8Tag::five_mod_8}) {
    if (pc.mod8 && *pc.mod8 == tag) continue;
    PatternConstraint other = pc;
    other.mod8 = tag;
    auto oseq = find_primes_with_pattern(other, o.count, o.start);
    for (std::size_t i = 0; i < seq.size() && i < oseq.size(); ++i) {
      bool ex = false;
      auto zo = z_truncated(oseq[i], o.l1, o.k, o.prune_eps).dist;
      double d = z_distance(zs[i], zo, &ex);
      cross_min = std::min(cross_min, d);
      cross.push_back({{"p", seq[i]}, {"q", oseq[i]}, {"tag", to_string(tag)}, {"distance", d}, {"exact", ex}});
    }
  }
  r.stats = {{"primes", seq}, {"intra", intra}, {"intra_max", intra_max}, {"cross", cross},
             {"cross_min", std::isfinite(cross_min) ? json(cross_min) : json(nullptr)}};
  r.runtime_seconds = sw.seconds();
  return r;
}

struct IsogenyOptions {
  bool weighted = true;
  i64 l1 = 20;
  int k = 3;
  std::size_t n_samples = 40000;
  std::uint64_t seed = 1;
  double prune_eps = 1e-9;
  unsigned threads = 1;
};

/// Law of N_{t,p} / sqrt p against draws of sqrt(4 - X^2) Z / pi.
inline ExperimentReport cmd_isogeny_dist(i64 p, const IsogenyOptions& o = {}, const std::string& out_dir = "") {
  detail::Stopwatch sw;
  ExperimentReport r;
  r.name = "isogeny";
  r.params = {{"p", p}, {"weighted", o.weighted}, {"l1", o.l1}, {"k", o.k}, {"n_samples", o.n_samples},
              {"seed", o.seed}, {"prune_eps", o.prune_eps}};
  TraceCensus c = o.weighted ? detail::best_census(p, o.threads) : weighted_census(p, {o.threads});
  auto dist = isogeny_size_distribution(c, o.weighted);
  const double sp = std::sqrt(static_cast<double>(p));
  std::vector<double> xs, ms;
  double mean = 0;
  for (const auto& a : dist.atoms()) {
    xs.push_back(a.value.get_d() / sp);
    ms.push_back(a.mass.get_d());
    mean += xs.back() * ms.back();
  }
  double msum = std::accumulate(ms.begin(), ms.end(), 0.0);
  for (auto& m : ms) m /= msum;
  auto emp = PointCloud::from_1d(xs, ms);
  r.stats = {{"atoms", dist.size()}, {"mean_scaled", mean}};
  {
    auto z = z_truncated(p, o.l1, o.k, o.prune_eps);
    auto zs = z_sample(z.dist, o.n_samples, o.seed, o.threads);
    std::vector<double> hs(o.n_samples);
    parallel_chunks(o.n_samples, kSampleChunk, o.threads, [&](std::size_t ch, std::size_t lo, std::size_t hi) {
      auto rng = chunk_rng(o.seed ^ 0x9E3779B97F4A7C15ull, ch);
      for (std::size_t i = lo; i < hi; ++i) {
        double x = -2.0 + 4.0 * static_cast<double>(rng() >> 11) * 0x1.0p-53;
        hs[i] = std::sqrt(std::max(0.0, 4 - x * x)) * zs[i] / M_PI;
      }
    });
    r.stats["w1_to_heuristic"] = wasserstein1(emp, PointCloud::uniform_1d(hs));
    r.stats["z_pruned_mass"] = z.pruned_mass;
  }
  if (!out_dir.empty()) {
    auto path = detail::artifact_path(out_dir, "isogeny_p" + std::to_string(p) + ".csv");
    std::ofstream os(path);
    os << "value_num,value_den,mass_num,mass_den,scaled\n";
    for (const auto& a : dist.atoms())
      os << a.value.get_num().get_str() << ',' << a.value.get_den().get_str() << ',' << a.mass.get_num().get_str()
         << ',' << a.mass.get_den().get_str() << ',' << fmt17(a.value.get_d() / sp) << '\n';
    r.artifacts.push_back(path);
  }
  r.runtime_seconds = sw.seconds();
  return r;
}

}  // namespace satocensus
