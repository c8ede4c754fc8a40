#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "census.hpp"
#include "metric.hpp"

namespace satocensus {

struct WindowError {
  double sup_error = 0;
  i64 argmax_start = 0;
  std::vector<i64> starts;
  std::vector<double> ratios;  // normalized window counts
  std::vector<double> errors;
};

/// Windowed comparison of per-trace counts with the semicircle density:
/// |sum_{t in [t0, t0+w)} N_t / ((w / sqrt p) * total) - density(t0 / sqrt p)|,
/// maximised over window starts. counts[t + T] holds N_t for |t| <= T.
inline WindowError histogram_sup_error(i64 p, const std::vector<double>& counts, i64 w, bool sliding = false,
                                       double total = -1) {
  if (counts.size() % 2 == 0) throw std::invalid_argument("histogram_sup_error: counts must cover -T..T");
  const i64 T = static_cast<i64>(counts.size() / 2);
  const double sp = std::sqrt(static_cast<double>(p));
  if (w < 1 || static_cast<double>(w) > 4 * sp) throw std::invalid_argument("histogram_sup_error: need 1 <= w <= 4 sqrt p");
  if (total < 0) total = 2.0 * static_cast<double>(p);
  WindowError out;
  std::vector<double> prefix(counts.size() + 1, 0.0);
  for (std::size_t i = 0; i < counts.size(); ++i) prefix[i + 1] = prefix[i] + counts[i];
  const i64 step = sliding ? 1 : w;
  for (i64 t0 = -T; t0 + w - 1 <= T; t0 += step) {
    double s = prefix[t0 + w + T] - prefix[t0 + T];
    double ratio = s / ((static_cast<double>(w) / sp) * total);
    double err = std::fabs(ratio - semicircle_density(static_cast<double>(t0) / sp));
    out.starts.push_back(t0);
    out.ratios.push_back(ratio);
    out.errors.push_back(err);
    if (err > out.sup_error) {
      out.sup_error = err;
      out.argmax_start = t0;
    }
  }
  return out;
}

inline std::vector<double> census_counts(const TraceCensus& c) {
  std::vector<double> v;
  for (i64 t = -c.max_trace(); t <= c.max_trace(); ++t) v.push_back(c.weighted(t).get_d());
  return v;
}

inline WindowError histogram_sup_error(const TraceCensus& c, i64 w, bool sliding = false) {
  return histogram_sup_error(c.p(), census_counts(c), w, sliding);
}

struct BinDeviation {
  double sup_deviation = 0;
  std::vector<double> edges;
  std::vector<double> empirical;
  std::vector<double> semicircle;
};

/// Mass of x_p = t / sqrt p per equal-width bin on [-2, 2] against the
/// semicircle bin masses.
inline BinDeviation bin_deviation(i64 p, const std::vector<double>& counts, int bins) {
  if (bins < 1) throw std::invalid_argument("bin_deviation: bins must be >= 1");
  const i64 T = static_cast<i64>(counts.size() / 2);
  const double sp = std::sqrt(static_cast<double>(p));
  BinDeviation out;
  out.empirical.assign(bins, 0.0);
  double total = 0;
  for (double c : counts) total += c;
  for (i64 t = -T; t <= T; ++t) {
    double x = static_cast<double>(t) / sp;
    int b = static_cast<int>(std::floor((x + 2) / 4 * bins));
    b = std::clamp(b, 0, bins - 1);
    out.empirical[b] += counts[t + T] / total;
  }
  for (int b = 0; b <= bins; ++b) out.edges.push_back(-2 + 4.0 * b / bins);
  for (int b = 0; b < bins; ++b) {
    out.semicircle.push_back(semicircle_mass(out.edges[b], out.edges[b + 1]));
    out.sup_deviation = std::max(out.sup_deviation, std::fabs(out.empirical[b] - out.semicircle[b]));
  }
  return out;
}

inline BinDeviation bin_deviation(const TraceCensus& c, int bins) { return bin_deviation(c.p(), census_counts(c), bins); }

}  // namespace satocensus
