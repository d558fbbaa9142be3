#pragma once

// Metric spaces of negative type supported by the library, and the paired
// sample type every estimator consumes.
//
// Only (weighted) Euclidean metrics are offered. Both embed isometrically in
// a Hilbert space, which is what the distance covariance theory needs. A
// discretized L2 function is a weighted-Euclidean point whose weights are
// quadrature weights on the evaluation grid.

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "reldcor/common.hpp"

namespace reldcor {

enum class MetricKind { euclidean, weighted_euclidean };

class MetricDescriptor {
 public:
  static MetricDescriptor euclidean(std::size_t dimension) {
    if (dimension == 0) throw InputError("metric dimension must be >= 1");
    return MetricDescriptor(MetricKind::euclidean, dimension, {});
  }

  static MetricDescriptor weighted(std::vector<double> weights) {
    if (weights.empty()) throw InputError("metric dimension must be >= 1");
    for (std::size_t i = 0; i < weights.size(); ++i) {
      if (!(weights[i] > 0.0) || !std::isfinite(weights[i])) {
        throw InputError("metric weight " + std::to_string(i + 1) + " must be finite and > 0");
      }
    }
    const std::size_t d = weights.size();
    return MetricDescriptor(MetricKind::weighted_euclidean, d, std::move(weights));
  }

  /// Trapezoidal quadrature weights for `points` equispaced nodes on [0,1].
  static MetricDescriptor trapezoid(std::size_t points) {
    if (points < 2) throw InputError("trapezoidal grid needs at least 2 points");
    const double h = 1.0 / static_cast<double>(points - 1);
    std::vector<double> w(points, h);
    w.front() = w.back() = h / 2.0;
    return weighted(std::move(w));
  }

  [[nodiscard]] MetricKind kind() const { return kind_; }
  [[nodiscard]] std::size_t dimension() const { return dimension_; }
  [[nodiscard]] std::span<const double> weights() const { return weights_; }

  /// sqrt(sum_i w_i (p_i - q_i)^2), w_i = 1 for the plain Euclidean metric.
  [[nodiscard]] double operator()(std::span<const double> p, std::span<const double> q) const {
    if (p.size() != dimension_ || q.size() != dimension_) {
      throw InputError("dimension mismatch: metric has dimension " + std::to_string(dimension_) +
                       ", got points of dimension " + std::to_string(p.size()) + " and " +
                       std::to_string(q.size()));
    }
    return unchecked(p.data(), q.data());
  }

  [[nodiscard]] double unchecked(const double* p, const double* q) const {
    if (dimension_ == 1 && kind_ == MetricKind::euclidean) return std::fabs(p[0] - q[0]);
    double s = 0.0;
    if (kind_ == MetricKind::euclidean) {
      for (std::size_t i = 0; i < dimension_; ++i) {
        const double d = p[i] - q[i];
        s += d * d;
      }
    } else {
      for (std::size_t i = 0; i < dimension_; ++i) {
        const double d = p[i] - q[i];
        s += weights_[i] * (d * d);
      }
    }
    return std::sqrt(s);
  }

  friend bool operator==(const MetricDescriptor&, const MetricDescriptor&) = default;

 private:
  MetricDescriptor(MetricKind k, std::size_t d, std::vector<double> w)
      : kind_(k), dimension_(d), weights_(std::move(w)) {}

  MetricKind kind_;
  std::size_t dimension_;
  std::vector<double> weights_;
};

inline double distance(const MetricDescriptor& desc, std::span<const double> p, std::span<const double> q) {
  return desc(p, q);
}

/// Unvalidated input: one vector per observation.
struct RawSample {
  MetricDescriptor x_metric;
  MetricDescriptor y_metric;
  std::vector<std::vector<double>> xs;
  std::vector<std::vector<double>> ys;
};

/// n aligned observations (x_i, y_i), stored row-major. Only constructible
/// through validation, so every instance satisfies the sample invariants.
class PairedSample {
 public:
  [[nodiscard]] std::size_t size() const { return n_; }
  [[nodiscard]] const MetricDescriptor& x_metric() const { return x_metric_; }
  [[nodiscard]] const MetricDescriptor& y_metric() const { return y_metric_; }

  [[nodiscard]] std::span<const double> x(std::size_t i) const {
    return {xs_.data() + i * x_metric_.dimension(), x_metric_.dimension()};
  }
  [[nodiscard]] std::span<const double> y(std::size_t i) const {
    return {ys_.data() + i * y_metric_.dimension(), y_metric_.dimension()};
  }

  [[nodiscard]] double dx(std::size_t i, std::size_t j) const {
    const std::size_t d = x_metric_.dimension();
    return x_metric_.unchecked(xs_.data() + i * d, xs_.data() + j * d);
  }
  [[nodiscard]] double dy(std::size_t i, std::size_t j) const {
    const std::size_t d = y_metric_.dimension();
    return y_metric_.unchecked(ys_.data() + i * d, ys_.data() + j * d);
  }

  [[nodiscard]] std::span<const double> flat_xs() const { return xs_; }
  [[nodiscard]] std::span<const double> flat_ys() const { return ys_; }

  /// First m observations.
  [[nodiscard]] PairedSample prefix(std::size_t m) const {
    if (m == 0 || m > n_) throw InputError("prefix length out of range");
    return PairedSample(x_metric_, y_metric_,
                        {xs_.begin(), xs_.begin() + static_cast<std::ptrdiff_t>(m * x_metric_.dimension())},
                        {ys_.begin(), ys_.begin() + static_cast<std::ptrdiff_t>(m * y_metric_.dimension())}, m);
  }

  /// Sample (x_i, x_i): the projection whose dcov is the distance variance of X.
  [[nodiscard]] PairedSample x_doubled() const { return PairedSample(x_metric_, x_metric_, xs_, xs_, n_); }
  [[nodiscard]] PairedSample y_doubled() const { return PairedSample(y_metric_, y_metric_, ys_, ys_, n_); }

  /// Validating constructor from flat row-major storage.
  static PairedSample from_flat(MetricDescriptor xm, MetricDescriptor ym, std::vector<double> xs,
                                std::vector<double> ys) {
    const std::size_t dx = xm.dimension();
    const std::size_t dy = ym.dimension();
    if (xs.size() % dx != 0) throw InputError("dimension mismatch: x storage not a multiple of dimension");
    if (ys.size() % dy != 0) throw InputError("dimension mismatch: y storage not a multiple of dimension");
    const std::size_t n = xs.size() / dx;
    if (ys.size() / dy != n) {
      throw InputError("length mismatch: " + std::to_string(n) + " x rows vs " + std::to_string(ys.size() / dy) +
                       " y rows");
    }
    if (n == 0) throw InputError("sample must contain at least one observation");
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < dx; ++k) {
        if (!std::isfinite(xs[i * dx + k])) throw InputError("non-finite x coordinate at row " + std::to_string(i + 1));
      }
      for (std::size_t k = 0; k < dy; ++k) {
        if (!std::isfinite(ys[i * dy + k])) throw InputError("non-finite y coordinate at row " + std::to_string(i + 1));
      }
    }
    return PairedSample(std::move(xm), std::move(ym), std::move(xs), std::move(ys), n);
  }

 private:
  PairedSample(MetricDescriptor xm, MetricDescriptor ym, std::vector<double> xs, std::vector<double> ys,
               std::size_t n)
      : x_metric_(std::move(xm)), y_metric_(std::move(ym)), xs_(std::move(xs)), ys_(std::move(ys)), n_(n) {}

  MetricDescriptor x_metric_;
  MetricDescriptor y_metric_;
  std::vector<double> xs_;
  std::vector<double> ys_;
  std::size_t n_;
};

/// Checks lengths, per-row dimensions and finiteness. Errors name the
/// offending (1-based) row.
inline PairedSample validate_sample(const RawSample& raw) {
  if (raw.xs.size() != raw.ys.size()) {
    throw InputError("length mismatch: " + std::to_string(raw.xs.size()) + " x rows vs " +
                     std::to_string(raw.ys.size()) + " y rows");
  }
  if (raw.xs.empty()) throw InputError("sample must contain at least one observation");
  const std::size_t dx = raw.x_metric.dimension();
  const std::size_t dy = raw.y_metric.dimension();
  std::vector<double> xs;
  std::vector<double> ys;
  xs.reserve(raw.xs.size() * dx);
  ys.reserve(raw.ys.size() * dy);
  for (std::size_t i = 0; i < raw.xs.size(); ++i) {
    if (raw.xs[i].size() != dx) {
      throw InputError("dimension mismatch at row " + std::to_string(i + 1) + ": x has " +
                       std::to_string(raw.xs[i].size()) + " coordinates, metric expects " + std::to_string(dx));
    }
    if (raw.ys[i].size() != dy) {
      throw InputError("dimension mismatch at row " + std::to_string(i + 1) + ": y has " +
                       std::to_string(raw.ys[i].size()) + " coordinates, metric expects " + std::to_string(dy));
    }
    xs.insert(xs.end(), raw.xs[i].begin(), raw.xs[i].end());
    ys.insert(ys.end(), raw.ys[i].begin(), raw.ys[i].end());
  }
  return PairedSample::from_flat(raw.x_metric, raw.y_metric, std::move(xs), std::move(ys));
}

/// Scalar Euclidean sample, the common case in tests and simulations.
inline PairedSample scalar_sample(std::vector<double> xs, std::vector<double> ys) {
  return PairedSample::from_flat(MetricDescriptor::euclidean(1), MetricDescriptor::euclidean(1), std::move(xs),
                                 std::move(ys));
}

}  // namespace reldcor
