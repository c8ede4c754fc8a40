#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <stdexcept>
#include <vector>

namespace satocensus {

/// Weighted finite point set in R^1 or R^2. Unused coordinates are zero.
struct PointCloud {
  int dim = 1;
  std::vector<std::array<double, 2>> points;
  std::vector<double> masses;

  std::size_t size() const { return points.size(); }

  static PointCloud from_1d(const std::vector<double>& xs, const std::vector<double>& ms) {
    PointCloud c;
    c.dim = 1;
    for (double x : xs) c.points.push_back({x, 0.0});
    c.masses = ms;
    c.validate();
    return c;
  }

  static PointCloud uniform_1d(const std::vector<double>& xs) {
    return from_1d(xs, std::vector<double>(xs.size(), 1.0 / static_cast<double>(xs.size())));
  }

  static PointCloud dirac(double x) { return from_1d({x}, {1.0}); }

  void validate() const {
    if (dim != 1 && dim != 2) throw std::invalid_argument("PointCloud: dim must be 1 or 2");
    if (points.size() != masses.size()) throw std::invalid_argument("PointCloud: size mismatch");
    if (points.empty()) throw std::invalid_argument("PointCloud: empty");
    // Neumaier summation
    double s = 0, comp = 0;
    for (double m : masses) {
      if (!(m >= 0) || !std::isfinite(m)) throw std::invalid_argument("PointCloud: bad mass");
      double t = s + m;
      comp += std::fabs(s) >= std::fabs(m) ? (s - t) + m : (m - t) + s;
      s = t;
    }
    if (std::fabs(s + comp - 1.0) > 1e-12) throw std::invalid_argument("PointCloud: masses do not sum to 1");
  }
};

inline double point_distance(const PointCloud& a, std::size_t i, const PointCloud& b, std::size_t j) {
  double dx = a.points[i][0] - b.points[j][0];
  double dy = a.points[i][1] - b.points[j][1];
  return std::sqrt(dx * dx + dy * dy);
}

namespace detail {

inline void require_same_dim(const PointCloud& a, const PointCloud& b) {
  a.validate();
  b.validate();
  if (a.dim != b.dim) throw std::invalid_argument("point clouds differ in dimension");
}

class Dinic {
 public:
  explicit Dinic(std::size_t n) : g_(n), level_(n), it_(n) {}

  void add_edge(std::size_t u, std::size_t v, double cap) {
    g_[u].push_back({v, g_[v].size(), cap});
    g_[v].push_back({u, g_[u].size() - 1, 0.0});
  }

  double max_flow(std::size_t s, std::size_t t) {
    double flow = 0;
    while (bfs(s, t)) {
      std::fill(it_.begin(), it_.end(), 0);
      for (;;) {
        double f = dfs(s, t, std::numeric_limits<double>::infinity());
        if (f <= kEps) break;
        flow += f;
      }
    }
    return flow;
  }

 private:
  struct Edge {
    std::size_t to, rev;
    double cap;
  };
  static constexpr double kEps = 1e-15;

  bool bfs(std::size_t s, std::size_t t) {
    std::fill(level_.begin(), level_.end(), -1);
    std::queue<std::size_t> q;
    level_[s] = 0;
    q.push(s);
    while (!q.empty()) {
      auto u = q.front();
      q.pop();
      for (const auto& e : g_[u])
        if (e.cap > kEps && level_[e.to] < 0) {
          level_[e.to] = level_[u] + 1;
          q.push(e.to);
        }
    }
    return level_[t] >= 0;
  }

  double dfs(std::size_t u, std::size_t t, double f) {
    if (u == t) return f;
    for (auto& i = it_[u]; i < g_[u].size(); ++i) {
      Edge& e = g_[u][i];
      if (e.cap > kEps && level_[e.to] == level_[u] + 1) {
        double d = dfs(e.to, t, std::min(f, e.cap));
        if (d > kEps) {
          e.cap -= d;
          g_[e.to][e.rev].cap += d;
          return d;
        }
      }
    }
    return 0;
  }

  std::vector<std::vector<Edge>> g_;
  std::vector<int> level_;
  std::vector<std::size_t> it_;
};

// Largest mass of mu that can be moved into nu along pairs at distance <= r.
inline double matched_mass(const PointCloud& from, const PointCloud& to, const std::vector<double>& dist, double r) {
  const std::size_t n = from.size(), m = to.size();
  Dinic g(n + m + 2);
  const std::size_t s = n + m, t = n + m + 1;
  for (std::size_t i = 0; i < n; ++i) g.add_edge(s, i, from.masses[i]);
  for (std::size_t j = 0; j < m; ++j) g.add_edge(n + j, t, to.masses[j]);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j)
      if (dist[i * m + j] <= r) g.add_edge(i, n + j, std::numeric_limits<double>::infinity());
  return g.max_flow(s, t);
}

}  // namespace detail

inline constexpr std::size_t kProkhorovCap = 5000;
inline constexpr double kFlowTolerance = 1e-12;

/// Exact Levy-Prokhorov distance on finite supports via Strassen's
/// characterisation: pi <= eps iff at least 1 - eps of mass can be matched
/// along pairs at distance <= eps.
inline double prokhorov_exact(const PointCloud& mu, const PointCloud& nu, std::size_t cap = kProkhorovCap) {
  detail::require_same_dim(mu, nu);
  const std::size_t n = mu.size(), m = nu.size();
  if (n + m > cap) throw std::length_error("prokhorov_exact: support above cap; use prokhorov_upper");
  std::vector<double> dist(n * m), dist_t(n * m);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) dist_t[j * n + i] = dist[i * m + j] = point_distance(mu, i, nu, j);
  std::vector<double> thr(dist);
  thr.push_back(0.0);
  std::sort(thr.begin(), thr.end());
  thr.erase(std::unique(thr.begin(), thr.end()), thr.end());

  // slack(i) = unmatched mass when pairs up to thr[i] are allowed, worst direction
  std::vector<double> memo(thr.size(), -1.0);
  auto slack = [&](std::size_t i) {
    if (memo[i] < 0) {
      double a = 1.0 - detail::matched_mass(mu, nu, dist, thr[i]);
      double b = 1.0 - detail::matched_mass(nu, mu, dist_t, thr[i]);
      memo[i] = std::clamp(std::max(a, b), 0.0, 1.0);
    }
    return memo[i];
  };
  std::size_t lo = 0, hi = thr.size() - 1;  // slack(hi) = 0 <= thr[hi]
  while (lo < hi) {
    std::size_t mid = lo + (hi - lo) / 2;
    if (slack(mid) <= thr[mid] + kFlowTolerance) hi = mid;
    else lo = mid + 1;
  }
  if (lo == 0) return std::min(1.0, std::min(thr[0], slack(0)));
  return std::min(1.0, std::min(thr[lo], slack(lo - 1)));
}

inline constexpr std::size_t kSubsetOracleMax = 10;

/// Levy-Prokhorov distance by brute force over every subset A, both
/// directions, with bisection on eps. Test oracle for small supports.
inline double prokhorov_subset_oracle(const PointCloud& mu, const PointCloud& nu, int iterations = 80) {
  detail::require_same_dim(mu, nu);
  if (mu.size() > kSubsetOracleMax || nu.size() > kSubsetOracleMax)
    throw std::length_error("prokhorov_subset_oracle: at most 10 support points per side");
  auto holds_one = [](const PointCloud& a, const PointCloud& b, double eps) {
    const std::size_t n = a.size(), m = b.size();
    for (std::size_t mask = 1; mask < (std::size_t{1} << n); ++mask) {
      double ma = 0, mb = 0;
      for (std::size_t i = 0; i < n; ++i)
        if (mask >> i & 1) ma += a.masses[i];
      for (std::size_t j = 0; j < m; ++j) {
        bool near = false;
        for (std::size_t i = 0; i < n && !near; ++i)
          if ((mask >> i & 1) && point_distance(a, i, b, j) <= eps) near = true;
        if (near) mb += b.masses[j];
      }
      if (ma > mb + eps + kFlowTolerance) return false;
    }
    return true;
  };
  auto holds = [&](double eps) { return holds_one(mu, nu, eps) && holds_one(nu, mu, eps); };
  if (holds(0.0)) return 0.0;
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < iterations; ++it) {
    double mid = 0.5 * (lo + hi);
    if (holds(mid)) hi = mid;
    else lo = mid;
  }
  return hi;
}

namespace detail {

inline double w1_line(const PointCloud& a, const PointCloud& b) {
  struct Ev {
    double x;
    double dm;
  };
  std::vector<Ev> ev;
  for (std::size_t i = 0; i < a.size(); ++i) ev.push_back({a.points[i][0], a.masses[i]});
  for (std::size_t j = 0; j < b.size(); ++j) ev.push_back({b.points[j][0], -b.masses[j]});
  std::sort(ev.begin(), ev.end(), [](const Ev& x, const Ev& y) { return x.x < y.x; });
  double cdf = 0, total = 0;
  for (std::size_t i = 0; i + 1 < ev.size(); ++i) {
    cdf += ev[i].dm;
    total += std::fabs(cdf) * (ev[i + 1].x - ev[i].x);
  }
  return total;
}

// Successive shortest paths on the complete bipartite transport graph, with
// Johnson potentials and Dijkstra stopped at the first sink still in deficit.
inline double w1_transport(const PointCloud& a, const PointCloud& b) {
  const std::size_t n = a.size(), m = b.size(), V = n + m;
  constexpr double kInf = std::numeric_limits<double>::infinity();
  constexpr double kTiny = 1e-15;
  std::vector<double> cost(n * m);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) cost[i * m + j] = point_distance(a, i, b, j);
  std::vector<double> supply(a.masses), demand(b.masses), flow(n * m, 0.0), pot(V, 0.0), dist(V);
  std::vector<std::vector<std::size_t>> senders(m);  // sources with flow into sink j
  std::vector<std::size_t> prev(V);
  std::vector<char> done(V);
  double total = 0;
  for (;;) {
    double left = 0;
    for (double s : supply) left += s;
    if (left <= 1e-13) break;
    std::fill(dist.begin(), dist.end(), kInf);
    std::fill(done.begin(), done.end(), 0);
    using Item = std::pair<double, std::size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    for (std::size_t i = 0; i < n; ++i)
      if (supply[i] > kTiny) {
        dist[i] = 0;
        prev[i] = V;
        pq.push({0.0, i});
      }
    std::size_t target = V;
    while (!pq.empty()) {
      auto [d, u] = pq.top();
      pq.pop();
      if (done[u]) continue;
      done[u] = 1;
      if (u >= n && demand[u - n] > kTiny) {
        target = u;
        break;
      }
      if (u < n) {
        for (std::size_t j = 0; j < m; ++j) {
          std::size_t v = n + j;
          if (done[v]) continue;
          double nd = d + cost[u * m + j] + pot[u] - pot[v];
          if (nd < dist[v]) {
            dist[v] = nd;
            prev[v] = u;
            pq.push({nd, v});
          }
        }
      } else {
        std::size_t j = u - n;
        for (std::size_t i : senders[j]) {
          if (done[i] || flow[i * m + j] <= kTiny) continue;
          double nd = d - cost[i * m + j] + pot[u] - pot[i];
          if (nd < dist[i]) {
            dist[i] = nd;
            prev[i] = u;
            pq.push({nd, i});
          }
        }
      }
    }
    if (target == V) break;
    const double dt = dist[target];
    for (std::size_t v = 0; v < V; ++v) pot[v] += std::min(dist[v], dt);
    // bottleneck along the path
    double f = demand[target - n];
    std::size_t v = target;
    while (prev[v] != V) {
      std::size_t u = prev[v];
      if (u >= n) f = std::min(f, flow[v * m + (u - n)]);  // backward edge sink u -> source v
      v = u;
    }
    f = std::min(f, supply[v]);
    supply[v] -= f;
    demand[target - n] -= f;
    v = target;
    while (prev[v] != V) {
      std::size_t u = prev[v];
      if (u < n) {
        std::size_t j = v - n;
        if (flow[u * m + j] <= kTiny) senders[j].push_back(u);
        flow[u * m + j] += f;
        total += f * cost[u * m + j];
      } else {
        flow[v * m + (u - n)] -= f;
        total -= f * cost[v * m + (u - n)];
      }
      v = u;
    }
  }
  return std::max(0.0, total);
}

}  // namespace detail

inline constexpr std::size_t kTransportCap = 2000;

inline double wasserstein1(const PointCloud& mu, const PointCloud& nu, std::size_t cap = kTransportCap) {
  detail::require_same_dim(mu, nu);
  if (mu.dim == 1) return detail::w1_line(mu, nu);
  if (mu.size() > cap || nu.size() > cap) throw std::length_error("wasserstein1: 2D support above cap; subsample first");
  return detail::w1_transport(mu, nu);
}

/// Markov on an optimal W1 coupling: P(|X - Y| >= sqrt(W1)) <= sqrt(W1).
inline double prokhorov_upper(const PointCloud& mu, const PointCloud& nu, std::size_t cap = kTransportCap) {
  return std::min(1.0, std::sqrt(wasserstein1(mu, nu, cap)));
}

/// delta + eps^(1/3): a coupling with |E(X - Y)| <= delta and variance <= eps.
inline double coupling_variance_bound(double mean_diff_bound, double variance_bound) {
  if (mean_diff_bound < 0 || variance_bound < 0) throw std::invalid_argument("coupling_variance_bound: negative input");
  return mean_diff_bound + std::cbrt(variance_bound);
}

inline double semicircle_density(double x) {
  if (x <= -2 || x >= 2) return 0.0;
  return std::sqrt(4 - x * x) / (2 * M_PI);
}

inline double semicircle_cdf_raw(double x) {
  x = std::clamp(x, -2.0, 2.0);
  return (x * std::sqrt(std::max(0.0, 4 - x * x)) / 2 + 2 * std::asin(x / 2)) / (2 * M_PI);
}

inline double semicircle_mass(double a, double b) {
  a = std::clamp(a, -2.0, 2.0);
  b = std::clamp(b, -2.0, 2.0);
  if (b <= a) return 0.0;
  return semicircle_cdf_raw(b) - semicircle_cdf_raw(a);
}

}  // namespace satocensus
