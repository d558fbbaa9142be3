#pragma once

// Sequential (prefix) distance covariance/correlation processes and the
// self-normalizers built from them.

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "reldcor/common.hpp"
#include "reldcor/dcov.hpp"
#include "reldcor/metric.hpp"

namespace reldcor {

/// Finite discrete probability measure on (0, 1].
class GammaMeasure {
 public:
  GammaMeasure(std::vector<double> support, std::vector<double> weights)
      : support_(std::move(support)), weights_(std::move(weights)) {
    if (support_.empty()) throw InputError("gamma measure needs at least one atom");
    if (support_.size() != weights_.size()) throw InputError("gamma support and weights differ in length");
    CompensatedSum total;
    for (std::size_t k = 0; k < support_.size(); ++k) {
      const double l = support_[k];
      if (!(l > 0.0 && l <= 1.0)) throw InputError("gamma atom " + std::to_string(l) + " outside (0, 1]");
      if (k > 0 && !(support_[k - 1] < l)) throw InputError("gamma support must be strictly increasing");
      if (!(weights_[k] > 0.0) || !std::isfinite(weights_[k])) throw InputError("gamma weights must be positive");
      total += weights_[k];
    }
    if (std::fabs(total.value() - 1.0) > 1e-12) throw InputError("gamma weights must sum to 1");
  }

  /// Discrete uniform measure on j/denominator, j = 1..denominator-1.
  static GammaMeasure uniform_grid(int denominator) {
    if (denominator < 2) throw InputError("uniform grid needs denominator >= 2");
    std::vector<double> s, w;
    const int k = denominator - 1;
    for (int j = 1; j <= k; ++j) {
      s.push_back(static_cast<double>(j) / static_cast<double>(denominator));
      w.push_back(1.0 / static_cast<double>(k));
    }
    return {std::move(s), std::move(w)};
  }

  /// The 19-atom measure on j/20 used for the bundled quantile table.
  static GammaMeasure default_measure() { return uniform_grid(20); }

  /// Uniform weights over the given atoms.
  static GammaMeasure uniform_over(std::vector<double> atoms) {
    std::vector<double> w(atoms.size(), atoms.empty() ? 0.0 : 1.0 / static_cast<double>(atoms.size()));
    return {std::move(atoms), std::move(w)};
  }

  [[nodiscard]] const std::vector<double>& support() const { return support_; }
  [[nodiscard]] const std::vector<double>& weights() const { return weights_; }
  [[nodiscard]] std::size_t size() const { return support_.size(); }

  friend bool operator==(const GammaMeasure&, const GammaMeasure&) = default;

 private:
  std::vector<double> support_;
  std::vector<double> weights_;
};

/// floor(n * lambda), snapping products that land within 1e-9 below an
/// integer (decimal atoms like 0.15 are not exact in binary).
inline std::size_t prefix_length(std::size_t n, double lambda) {
  const double x = static_cast<double>(n) * lambda;
  double f = std::floor(x);
  if (x - f > 1.0 - 1e-9) f += 1.0;
  return f <= 0.0 ? 0 : static_cast<std::size_t>(f);
}

/// True when every atom of gamma selects a non-empty prefix of an n-sample.
inline bool gamma_resolves(const GammaMeasure& gamma, std::size_t n) {
  return prefix_length(n, gamma.support().front()) >= 1;
}

/// Prefix trajectories; entry m-1 holds the statistic of the first m rows.
struct SequentialPath {
  std::size_t n = 0;
  std::vector<double> dcov_xy;
  std::vector<double> dcov_xx;
  std::vector<double> dcov_yy;
  std::vector<double> dcor;

  /// Statistic of the first m rows; m = 0 maps to 0.
  [[nodiscard]] double dcov_at(std::size_t m) const { return m == 0 ? 0.0 : dcov_xy[m - 1]; }
  [[nodiscard]] double dcor_at(std::size_t m) const { return m == 0 ? 0.0 : dcor[m - 1]; }
};

/// Streams the prefix processes in O(n^2) time and O(n) working memory.
///
/// Appending point m updates every row sum r_i by a_im, so with
/// P = sum_i r^a_i r^b_i the increment is sum_i (r^a_i b_im + a_im r^b_i +
/// a_im b_im) plus the new row's r^a_m r^b_m.
inline SequentialPath prefix_processes(const PairedSample& s) {
  const std::size_t n = s.size();
  SequentialPath path;
  path.n = n;
  path.dcov_xy.assign(n, 0.0);
  path.dcov_xx.assign(n, 0.0);
  path.dcov_yy.assign(n, 0.0);
  path.dcor.assign(n, 0.0);

  std::vector<CompensatedSum> ra(n), rb(n);
  CompensatedSum s_ab, s_aa, s_bb;
  CompensatedSum p_ab, p_aa, p_bb;
  CompensatedSum g_a, g_b;

  for (std::size_t m = 1; m < n; ++m) {
    CompensatedSum new_a, new_b;
    for (std::size_t i = 0; i < m; ++i) {
      const double a = s.dx(i, m);
      const double b = s.dy(i, m);
      const double ri_a = ra[i].value();
      const double ri_b = rb[i].value();
      s_ab += 2.0 * a * b;
      s_aa += 2.0 * a * a;
      s_bb += 2.0 * b * b;
      p_ab += ri_a * b + a * ri_b + a * b;
      p_aa += 2.0 * ri_a * a + a * a;
      p_bb += 2.0 * ri_b * b + b * b;
      ra[i] += a;
      rb[i] += b;
      new_a += a;
      new_b += b;
    }
    ra[m] = new_a;
    rb[m] = new_b;
    const double na = new_a.value();
    const double nb = new_b.value();
    p_ab += na * nb;
    p_aa += na * na;
    p_bb += nb * nb;
    g_a += 2.0 * na;
    g_b += 2.0 * nb;

    const double k = static_cast<double>(m + 1);
    const double k2 = k * k;
    const double k3 = k2 * k;
    const double ga = g_a.value() / k2;
    const double gb = g_b.value() / k2;
    const double xy = s_ab.value() / k2 - 2.0 * p_ab.value() / k3 + ga * gb;
    const double xx = s_aa.value() / k2 - 2.0 * p_aa.value() / k3 + ga * ga;
    const double yy = s_bb.value() / k2 - 2.0 * p_bb.value() / k3 + gb * gb;
    path.dcov_xy[m] = xy;
    path.dcov_xx[m] = xx;
    path.dcov_yy[m] = yy;
    path.dcor[m] = dcor_from(xy, xx, yy);
  }
  return path;
}

/// V_{n,dcov} = sqrt( sum_k w_k ((l_k floor(n l_k)/n) dcov_{floor(n l_k)} - l_k^2 dcov_n)^2 ).
inline double normalizer_dcov(const SequentialPath& path, const GammaMeasure& gamma) {
  const std::size_t n = path.n;
  if (n == 0) return 0.0;
  const double nn = static_cast<double>(n);
  const double full = path.dcov_at(n);
  CompensatedSum acc;
  for (std::size_t k = 0; k < gamma.size(); ++k) {
    const double l = gamma.support()[k];
    const std::size_t m = prefix_length(n, l);
    const double term = (l * (static_cast<double>(m) / nn)) * path.dcov_at(m) - (l * l) * full;
    acc += gamma.weights()[k] * term * term;
  }
  return std::sqrt(acc.value());
}

/// V_{n,dcor} = sqrt( sum_k w_k ((n l_k^2/floor(n l_k)) dcor_{floor(n l_k)} - l_k dcor_n)^2 ).
/// An atom with floor(n l_k) = 0 contributes (l_k dcor_n)^2.
inline double normalizer_dcor(const SequentialPath& path, const GammaMeasure& gamma) {
  const std::size_t n = path.n;
  if (n == 0) return 0.0;
  const double nn = static_cast<double>(n);
  const double full = path.dcor_at(n);
  CompensatedSum acc;
  for (std::size_t k = 0; k < gamma.size(); ++k) {
    const double l = gamma.support()[k];
    const std::size_t m = prefix_length(n, l);
    // l * (l / (m/n)) is exactly l when m/n rounds to l.
    const double factor = m == 0 ? 0.0 : l * (l / (static_cast<double>(m) / nn));
    const double term = factor * path.dcor_at(m) - l * full;
    acc += gamma.weights()[k] * term * term;
  }
  return std::sqrt(acc.value());
}

}  // namespace reldcor
