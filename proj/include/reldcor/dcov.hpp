#pragma once

// Empirical distance covariance (the plug-in V-statistic), distance
// variances and distance correlation.
//
// With a_ij = d_X(x_i, x_j), b_ij = d_Y(y_i, y_j) and double-centered
// A_ij = a_ij - a_i. - a_.j + a_.., the V-statistic equals
//
//     dcov_n = (1/n^2) sum_ij A_ij B_ij
//            = S/n^2 - 2 P/n^3 + G_a G_b / n^4
//
// where S = sum_ij a_ij b_ij, P = sum_i r^a_i r^b_i over row sums and G are
// the grand sums. The batch estimator centers explicitly in two passes (O(n)
// memory, distances recomputed); the aggregate form drives the streaming
// estimator in sequential.hpp.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "reldcor/common.hpp"
#include "reldcor/metric.hpp"

namespace reldcor {

/// Distance variances below this are treated as "almost surely constant".
inline constexpr double kDegenerateVariance = 1e-14;

/// Slack allowed when clamping dcor into [0, 1].
inline constexpr double kDcorSlack = 1e-12;

struct CenteredDistanceSummary {
  std::size_t n = 0;
  double cross_sum = 0.0;
  std::vector<double> row_sums_a;
  std::vector<double> row_sums_b;
  double grand_a = 0.0;
  double grand_b = 0.0;
};

namespace detail {

template <class DistA, class DistB>
CenteredDistanceSummary summarize(std::size_t n, DistA&& a, DistB&& b) {
  CenteredDistanceSummary s;
  s.n = n;
  std::vector<CompensatedSum> ra(n), rb(n);
  CompensatedSum cross;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double aij = a(i, j);
      const double bij = b(i, j);
      ra[i] += aij;
      ra[j] += aij;
      rb[i] += bij;
      rb[j] += bij;
      cross += 2.0 * aij * bij;
    }
  }
  s.cross_sum = cross.value();
  s.row_sums_a.resize(n);
  s.row_sums_b.resize(n);
  CompensatedSum ga, gb;
  for (std::size_t i = 0; i < n; ++i) {
    s.row_sums_a[i] = ra[i].value();
    s.row_sums_b[i] = rb[i].value();
    ga += s.row_sums_a[i];
    gb += s.row_sums_b[i];
  }
  s.grand_a = ga.value();
  s.grand_b = gb.value();
  return s;
}

// Two-pass explicit double centering: sum_ij A_ij B_ij / n^2.
template <class DistA, class DistB>
double centered_vstat(std::size_t n, DistA&& a, DistB&& b) {
  if (n < 2) return 0.0;
  std::vector<CompensatedSum> ra(n), rb(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double aij = a(i, j);
      const double bij = b(i, j);
      ra[i] += aij;
      ra[j] += aij;
      rb[i] += bij;
      rb[j] += bij;
    }
  }
  const double nn = static_cast<double>(n);
  std::vector<double> ma(n), mb(n);
  CompensatedSum ga, gb;
  for (std::size_t i = 0; i < n; ++i) {
    ma[i] = ra[i].value() / nn;
    mb[i] = rb[i].value() / nn;
    ga += ma[i];
    gb += mb[i];
  }
  const double mean_a = ga.value() / nn;
  const double mean_b = gb.value() / nn;

  CompensatedSum off, diag;
  for (std::size_t i = 0; i < n; ++i) {
    diag += (mean_a - 2.0 * ma[i]) * (mean_b - 2.0 * mb[i]);
    for (std::size_t j = i + 1; j < n; ++j) {
      const double A = a(i, j) - ma[i] - ma[j] + mean_a;
      const double B = b(i, j) - mb[i] - mb[j] + mean_b;
      off += A * B;
    }
  }
  return (2.0 * off.value() + diag.value()) / (nn * nn);
}

}  // namespace detail

/// Aggregates behind dcov_n(X, Y).
inline CenteredDistanceSummary summarize(const PairedSample& s) {
  return detail::summarize(
      s.size(), [&](std::size_t i, std::size_t j) { return s.dx(i, j); },
      [&](std::size_t i, std::size_t j) { return s.dy(i, j); });
}

/// dcov from the aggregates: S/n^2 - 2P/n^3 + G_a G_b/n^4.
inline double dcov_from_summary(const CenteredDistanceSummary& s) {
  if (s.n < 2) return 0.0;
  const double n = static_cast<double>(s.n);
  CompensatedSum p;
  for (std::size_t i = 0; i < s.n; ++i) p += s.row_sums_a[i] * s.row_sums_b[i];
  return s.cross_sum / (n * n) - 2.0 * p.value() / (n * n * n) + (s.grand_a / (n * n)) * (s.grand_b / (n * n));
}

/// Row sums of the double-centered X matrix, sum_j A_ij, computed from the
/// aggregates. Identically zero in exact arithmetic.
inline std::vector<double> centered_row_sums_a(const CenteredDistanceSummary& s) {
  const double n = static_cast<double>(s.n);
  std::vector<double> out(s.n);
  for (std::size_t i = 0; i < s.n; ++i) {
    const double row_mean = s.row_sums_a[i] / n;
    // sum_j (a_ij - a_i. - a_.j + a_..) = r_i - n a_i. - G/n + n G/n^2
    out[i] = (s.row_sums_a[i] - n * row_mean) - (s.grand_a / n - n * (s.grand_a / (n * n)));
  }
  return out;
}

/// Plug-in distance covariance dcov_n(X, Y). Exactly 0 for n = 1.
inline double dcov_empirical(const PairedSample& s) {
  return detail::centered_vstat(
      s.size(), [&](std::size_t i, std::size_t j) { return s.dx(i, j); },
      [&](std::size_t i, std::size_t j) { return s.dy(i, j); });
}

/// Distance variance dcov_n(X, X) = (1/n^2) sum A_ij^2.
inline double dcov_variance_x(const PairedSample& s) {
  auto a = [&](std::size_t i, std::size_t j) { return s.dx(i, j); };
  return detail::centered_vstat(s.size(), a, a);
}

/// Distance variance dcov_n(Y, Y).
inline double dcov_variance_y(const PairedSample& s) {
  auto b = [&](std::size_t i, std::size_t j) { return s.dy(i, j); };
  return detail::centered_vstat(s.size(), b, b);
}

/// dcor from its three dcov ingredients. Returns 0 when either variance is
/// degenerate. Values outside [0,1] by more than the slack signal a bug.
inline double dcor_from(double dcov_xy, double dcov_xx, double dcov_yy) {
  if (dcov_xx <= kDegenerateVariance || dcov_yy <= kDegenerateVariance) return 0.0;
  const double r = dcov_xy / std::sqrt(dcov_xx * dcov_yy);
  if (!(r >= -kDcorSlack && r <= 1.0 + kDcorSlack)) {
    throw std::logic_error("distance correlation out of range: " + std::to_string(r));
  }
  return r < 0.0 ? 0.0 : (r > 1.0 ? 1.0 : r);
}

struct DcovTriple {
  double xy = 0.0;
  double xx = 0.0;
  double yy = 0.0;
  [[nodiscard]] double dcor() const { return dcor_from(xy, xx, yy); }
};

/// All three V-statistics in two passes over the sample.
inline DcovTriple dcov_all(const PairedSample& s) {
  const std::size_t n = s.size();
  if (n < 2) return {};
  std::vector<CompensatedSum> ra(n), rb(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double aij = s.dx(i, j);
      const double bij = s.dy(i, j);
      ra[i] += aij;
      ra[j] += aij;
      rb[i] += bij;
      rb[j] += bij;
    }
  }
  const double nn = static_cast<double>(n);
  std::vector<double> ma(n), mb(n);
  CompensatedSum ga, gb;
  for (std::size_t i = 0; i < n; ++i) {
    ma[i] = ra[i].value() / nn;
    mb[i] = rb[i].value() / nn;
    ga += ma[i];
    gb += mb[i];
  }
  const double mean_a = ga.value() / nn;
  const double mean_b = gb.value() / nn;
  CompensatedSum xy, xx, yy;
  for (std::size_t i = 0; i < n; ++i) {
    const double Ad = mean_a - 2.0 * ma[i];
    const double Bd = mean_b - 2.0 * mb[i];
    xy += Ad * Bd;
    xx += Ad * Ad;
    yy += Bd * Bd;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double A = s.dx(i, j) - ma[i] - ma[j] + mean_a;
      const double B = s.dy(i, j) - mb[i] - mb[j] + mean_b;
      xy += 2.0 * A * B;
      xx += 2.0 * A * A;
      yy += 2.0 * B * B;
    }
  }
  const double n2 = nn * nn;
  return {xy.value() / n2, xx.value() / n2, yy.value() / n2};
}

/// Empirical distance correlation dcor_n(X, Y) in [0, 1].
inline double dcor_empirical(const PairedSample& s) { return dcov_all(s).dcor(); }

}  // namespace reldcor
