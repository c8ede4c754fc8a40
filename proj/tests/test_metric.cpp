#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "satocensus/histogram.hpp"
#include "satocensus/metric.hpp"

using namespace satocensus;

namespace {

PointCloud random_cloud(std::mt19937_64& rng, int dim, std::size_t n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  PointCloud c;
  c.dim = dim;
  double s = 0;
  for (std::size_t i = 0; i < n; ++i) {
    c.points.push_back({u(rng), dim == 2 ? u(rng) : 0.0});
    c.masses.push_back(0.05 + u(rng));
    s += c.masses.back();
  }
  for (auto& m : c.masses) m /= s;
  c.validate();
  return c;
}

PointCloud two_point(double a, double ma, double b) { return PointCloud::from_1d({a, b}, {ma, 1 - ma}); }

}  // namespace

TEST(Prokhorov, Examples) {
  EXPECT_EQ(prokhorov_exact(PointCloud::dirac(0), PointCloud::dirac(0)), 0.0);
  EXPECT_EQ(prokhorov_exact(PointCloud::dirac(0), PointCloud::dirac(0.3)), 0.3);
  EXPECT_EQ(prokhorov_exact(two_point(0, 0.5, 1), PointCloud::dirac(0)), 0.5);
  EXPECT_EQ(prokhorov_exact(PointCloud::dirac(0), PointCloud::dirac(5)), 1.0);
  EXPECT_NEAR(prokhorov_subset_oracle(two_point(0, 0.5, 1), PointCloud::dirac(0)), 0.5, 1e-12);
  EXPECT_NEAR(prokhorov_subset_oracle(PointCloud::dirac(0), PointCloud::dirac(0.3)), 0.3, 1e-12);
}

TEST(Prokhorov, Errors) {
  std::mt19937_64 rng(1);
  auto big = random_cloud(rng, 1, 11);
  EXPECT_THROW(prokhorov_subset_oracle(big, big), std::length_error);
  EXPECT_THROW(prokhorov_exact(big, big, 20), std::length_error);
  EXPECT_THROW(prokhorov_exact(random_cloud(rng, 1, 3), random_cloud(rng, 2, 3)), std::invalid_argument);
  EXPECT_THROW(PointCloud::from_1d({0, 1}, {0.5, 0.6}), std::invalid_argument);
}

TEST(Prokhorov, MatchesSubsetOracle) {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> size(1, 10);
  for (int it = 0; it < 150; ++it) {
    int dim = it % 2 ? 2 : 1;
    auto mu = random_cloud(rng, dim, size(rng)), nu = random_cloud(rng, dim, size(rng));
    double e = prokhorov_exact(mu, nu), o = prokhorov_subset_oracle(mu, nu);
    ASSERT_NEAR(e, o, 1e-9) << it;
    ASSERT_LE(e, prokhorov_upper(mu, nu) + 1e-12);
    ASSERT_LE(prokhorov_upper(mu, nu), 1.0);
  }
}

TEST(Prokhorov, MetricAxioms) {
  std::mt19937_64 rng(77);
  for (int it = 0; it < 60; ++it) {
    int dim = it % 2 ? 2 : 1;
    auto a = random_cloud(rng, dim, 8), b = random_cloud(rng, dim, 9), c = random_cloud(rng, dim, 7);
    double ab = prokhorov_exact(a, b), ba = prokhorov_exact(b, a);
    EXPECT_NEAR(ab, ba, 1e-12);
    EXPECT_NEAR(prokhorov_exact(a, a), 0.0, 1e-9);
    EXPECT_NEAR(prokhorov_subset_oracle(a, a), 0.0, 1e-9);
    EXPECT_LE(ab, prokhorov_exact(a, c) + prokhorov_exact(c, b) + 1e-9);
    EXPECT_GT(ab, 0.0);
    EXPECT_LE(ab, 1.0);
  }
}

// A coupling moving at most eps of the mass by eps or more certifies pi <= eps.
TEST(Prokhorov, CouplingCertificate) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int it = 0; it < 40; ++it) {
    const std::size_t n = 200;
    const double eps = 0.05 + 0.2 * u(rng);
    std::vector<double> xs(n), ys(n);
    std::size_t far = static_cast<std::size_t>(std::floor(eps * n));
    for (std::size_t i = 0; i < n; ++i) {
      xs[i] = 3 * u(rng);
      ys[i] = xs[i] + (i < far ? 1 + u(rng) : (u(rng) - 0.5) * 1.99 * eps);
    }
    double pi = prokhorov_exact(PointCloud::uniform_1d(xs), PointCloud::uniform_1d(ys));
    EXPECT_LE(pi, eps + 1e-12);
  }
}

TEST(Wasserstein, Examples) {
  EXPECT_NEAR(wasserstein1(PointCloud::dirac(0), PointCloud::dirac(0.25)), 0.25, 1e-15);
  EXPECT_NEAR(wasserstein1(PointCloud::dirac(0), two_point(0, 0.5, 1)), 0.5, 1e-15);
  EXPECT_NEAR(wasserstein1(PointCloud::uniform_1d({0, 1}), PointCloud::uniform_1d({0.5, 1.5})), 0.5, 1e-15);
  EXPECT_NEAR(prokhorov_upper(PointCloud::dirac(0), PointCloud::dirac(0.25)), 0.5, 1e-15);
  std::mt19937_64 rng(3);
  auto a = random_cloud(rng, 2, 30);
  EXPECT_NEAR(wasserstein1(a, a), 0.0, 1e-12);
  EXPECT_NEAR(prokhorov_upper(a, a), 0.0, 1e-6);
  auto big = random_cloud(rng, 2, 30);
  EXPECT_THROW(wasserstein1(big, big, 10), std::length_error);
}

// A 2D cloud embedded on the x-axis has the same W1 as the 1D formula.
TEST(Wasserstein, TransportMatchesLineFormula) {
  std::mt19937_64 rng(9);
  for (int it = 0; it < 40; ++it) {
    auto a = random_cloud(rng, 1, 1 + it % 25), b = random_cloud(rng, 1, 1 + (it * 7) % 30);
    PointCloud a2 = a, b2 = b;
    a2.dim = b2.dim = 2;
    EXPECT_NEAR(wasserstein1(a2, b2), wasserstein1(a, b), 1e-9) << it;
  }
}

TEST(Wasserstein, TwoDimensionalProperties) {
  std::mt19937_64 rng(10);
  for (int it = 0; it < 20; ++it) {
    auto a = random_cloud(rng, 2, 40), b = random_cloud(rng, 2, 35), c = random_cloud(rng, 2, 30);
    double ab = wasserstein1(a, b);
    EXPECT_NEAR(ab, wasserstein1(b, a), 1e-9);
    EXPECT_LE(ab, wasserstein1(a, c) + wasserstein1(c, b) + 1e-9);
    // shifting every point by (s, 0) costs exactly s
    PointCloud shifted = a;
    for (auto& pt : shifted.points) pt[0] += 0.3;
    EXPECT_NEAR(wasserstein1(a, shifted), 0.3, 1e-9);
  }
}

TEST(CouplingBound, Examples) {
  EXPECT_NEAR(coupling_variance_bound(0, 0.001), 0.1, 1e-12);
  EXPECT_NEAR(coupling_variance_bound(0.05, 0), 0.05, 1e-15);
  EXPECT_NEAR(coupling_variance_bound(0.01, 0.008), 0.21, 1e-12);
  EXPECT_THROW(coupling_variance_bound(-1, 0), std::invalid_argument);
}

TEST(Semicircle, Masses) {
  EXPECT_NEAR(semicircle_mass(-2, 2), 1.0, 1e-12);
  EXPECT_NEAR(semicircle_mass(0, 2), 0.5, 1e-12);
  EXPECT_NEAR(semicircle_mass(-1, 1), 1.0 / 3 + std::sqrt(3.0) / (2 * M_PI), 1e-12);
  EXPECT_NEAR(semicircle_mass(-1, 1), 0.6090, 1e-4);
  EXPECT_EQ(semicircle_mass(-5, -3), 0.0);
  for (double a = -2; a < 2; a += 0.37)
    for (double b = a; b <= 2; b += 0.41) EXPECT_NEAR(semicircle_mass(a, b), oracle::semicircle_simpson(a, b), 1e-6);
}

TEST(Histogram, SemicircleInputIsNearZero) {
  const i64 p = 1000003, T = isqrt(4 * p);
  const double sp = std::sqrt(static_cast<double>(p));
  std::vector<double> counts;
  for (i64 t = -T; t <= T; ++t) counts.push_back(2 * sp * semicircle_density(t / sp));
  for (i64 w : {1, 16, 64}) {
    auto r = histogram_sup_error(p, counts, w);
    for (std::size_t i = 0; i < r.starts.size(); ++i) {
      double lip = 0, d0 = semicircle_density(r.starts[i] / sp);
      for (i64 t = r.starts[i]; t < r.starts[i] + w; ++t) lip = std::max(lip, std::fabs(semicircle_density(t / sp) - d0));
      ASSERT_LE(r.errors[i], lip + 1e-12) << w << " " << r.starts[i];
    }
  }
  EXPECT_THROW(histogram_sup_error(p, counts, 0), std::invalid_argument);
  EXPECT_THROW(histogram_sup_error(p, counts, 4 * 1001), std::invalid_argument);
}

TEST(Histogram, SlidingBoundsDisjoint) {
  auto c = weighted_census(10007);
  auto d = histogram_sup_error(c, 7, false), s = histogram_sup_error(c, 7, true);
  EXPECT_GE(s.sup_error, d.sup_error);
  EXPECT_GT(d.sup_error, 0.0);
  EXPECT_TRUE(std::isfinite(d.sup_error));
  EXPECT_EQ(d.starts.size(), static_cast<std::size_t>((2 * c.max_trace() + 1) / 7));
}

TEST(Histogram, BinsSumToOne) {
  auto c = weighted_census(10007);
  auto b = bin_deviation(c, 50);
  double s = 0, t = 0;
  for (double x : b.empirical) s += x;
  for (double x : b.semicircle) t += x;
  EXPECT_NEAR(s, 1.0, 1e-12);
  EXPECT_NEAR(t, 1.0, 1e-12);
  EXPECT_GT(b.sup_deviation, 0.0);
  EXPECT_LT(b.sup_deviation, 0.05);
}
