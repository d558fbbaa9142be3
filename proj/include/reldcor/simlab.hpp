#pragma once

// Data generators and experiment runners: a bivariate Gaussian VAR(1) and a
// functional model driven by a 10-dimensional VAR(1) of Fourier coefficients.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <numbers>
#include <ostream>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "reldcor/common.hpp"
#include "reldcor/dcov.hpp"
#include "reldcor/inference.hpp"
#include "reldcor/metric.hpp"
#include "reldcor/pivotal.hpp"
#include "reldcor/sequential.hpp"

namespace reldcor {

/// Produces an n-observation sample; must be a pure function of (n, seed).
using Generator = std::function<PairedSample(std::size_t n, std::uint64_t seed)>;

inline double spectral_radius(const Eigen::MatrixXd& a) {
  const Eigen::VectorXcd ev = a.eigenvalues();
  double r = 0.0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) r = std::max(r, std::abs(ev[i]));
  return r;
}

/// Stationary covariance G of x_t = A x_{t-1} + e_t, Cov(e) = sigma:
/// vec(G) = (I - A kron A)^{-1} vec(sigma).
inline Eigen::MatrixXd lyapunov_stationary_cov(const Eigen::MatrixXd& a, const Eigen::MatrixXd& sigma) {
  const Eigen::Index d = a.rows();
  Eigen::MatrixXd kron(d * d, d * d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) kron.block(i * d, j * d, d, d) = a(i, j) * a;
  const Eigen::MatrixXd lhs = Eigen::MatrixXd::Identity(d * d, d * d) - kron;
  const Eigen::VectorXd vec_sigma = Eigen::Map<const Eigen::VectorXd>(sigma.data(), d * d);
  const Eigen::VectorXd vec_g = lhs.partialPivLu().solve(vec_sigma);
  Eigen::MatrixXd g = Eigen::Map<const Eigen::MatrixXd>(vec_g.data(), d, d);
  return (g + g.transpose()) / 2.0;
}

/// Lower Cholesky factor; non-positive-definite covariances are config errors.
inline Eigen::MatrixXd cholesky_factor(const Eigen::MatrixXd& cov, const std::string& what) {
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) throw InputError(what + " is not positive definite");
  return llt.matrixL();
}

enum class VarInit { stationary, burn_in };

struct VarConfig {
  Eigen::Matrix2d a_matrix = (Eigen::Matrix2d() << 0.5, 0.2, 0.2, 0.5).finished();
  double rho = 0.5;
  std::size_t n = 400;
  VarInit init = VarInit::stationary;
  std::size_t burn_in = 500;
};

namespace detail {

// Iterates x_t = A x_{t-1} + L z_t and returns the n retained states.
inline std::vector<Eigen::VectorXd> run_var(const Eigen::MatrixXd& a, const Eigen::MatrixXd& chol_sigma,
                                            const Eigen::MatrixXd& chol_stationary, bool stationary,
                                            std::size_t burn_in, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z;
  const Eigen::Index d = a.rows();
  auto gauss = [&] {
    Eigen::VectorXd v(d);
    for (Eigen::Index i = 0; i < d; ++i) v[i] = z(rng);
    return v;
  };
  std::vector<Eigen::VectorXd> out;
  out.reserve(n);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(d);
  if (stationary) {
    x = chol_stationary * gauss();
  } else {
    for (std::size_t t = 0; t < burn_in; ++t) x = a * x + chol_sigma * gauss();
    x = a * x + chol_sigma * gauss();
  }
  if (n > 0) out.push_back(x);
  for (std::size_t t = 1; t < n; ++t) {
    x = a * x + chol_sigma * gauss();
    out.push_back(x);
  }
  return out;
}

}  // namespace detail

inline Eigen::Matrix2d var_innovation_cov(double rho) {
  return (Eigen::Matrix2d() << 1.0, rho, rho, 1.0).finished();
}

inline void validate(const VarConfig& c) {
  if (!(std::fabs(c.rho) < 1.0)) throw InputError("VAR innovation correlation rho must lie in (-1, 1)");
  if (!c.a_matrix.allFinite()) throw InputError("VAR matrix has non-finite entries");
  if (!(spectral_radius(c.a_matrix) < 1.0)) throw InputError("VAR matrix is not stable (spectral radius >= 1)");
}

/// Scalar X and Y from the bivariate VAR(1).
inline PairedSample gen_var(const VarConfig& c, std::uint64_t seed) {
  validate(c);
  if (c.n == 0) throw InputError("sample length must be >= 1");
  const Eigen::Matrix2d sigma = var_innovation_cov(c.rho);
  const Eigen::MatrixXd l = cholesky_factor(sigma, "VAR innovation covariance");
  Eigen::MatrixXd ls;
  if (c.init == VarInit::stationary) ls = cholesky_factor(lyapunov_stationary_cov(c.a_matrix, sigma), "VAR stationary covariance");
  const auto states = detail::run_var(c.a_matrix, l, ls, c.init == VarInit::stationary, c.burn_in, c.n, seed);
  std::vector<double> xs(c.n), ys(c.n);
  for (std::size_t t = 0; t < c.n; ++t) {
    xs[t] = states[t][0];
    ys[t] = states[t][1];
  }
  return scalar_sample(std::move(xs), std::move(ys));
}

enum class CovKind { sparse, full };
enum class Representation { coefficients, grid };

inline const char* to_string(CovKind k) { return k == CovKind::sparse ? "sparse" : "full"; }

struct FourierConfig {
  CovKind cov_kind = CovKind::full;
  double rho = 0.5;
  std::size_t n = 400;
  Representation representation = Representation::coefficients;
  std::size_t grid_points = 256;
};

inline constexpr int kFourierDim = 10;
inline constexpr int kFourierBasis = 5;

/// Innovation covariance of the coefficient VAR: sparse couples i and i+5
/// with rho, full uses rho^|i-j|.
inline Eigen::MatrixXd fourier_innovation_cov(CovKind kind, double rho) {
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(kFourierDim, kFourierDim);
  for (int i = 0; i < kFourierDim; ++i)
    for (int j = 0; j < kFourierDim; ++j) {
      const int gap = std::abs(i - j);
      if (kind == CovKind::sparse) {
        s(i, j) = gap == 0 ? 1.0 : (gap == 5 ? rho : 0.0);
      } else {
        s(i, j) = gap == 0 ? 1.0 : std::pow(rho, gap);
      }
    }
  return s;
}

/// phi_0 = 1, phi_{2j-1} = sqrt2 cos(2 pi j s), phi_{2j} = sqrt2 sin(2 pi j s).
inline double fourier_basis(int index, double s) {
  if (index == 0) return 1.0;
  const int j = (index + 1) / 2;
  const double arg = 2.0 * std::numbers::pi * j * s;
  return std::numbers::sqrt2 * (index % 2 == 1 ? std::cos(arg) : std::sin(arg));
}

/// Functional data generator that precomputes the Cholesky factors once.
class FourierModel {
 public:
  explicit FourierModel(FourierConfig c) : config_(c) {
    if (!(std::fabs(c.rho) < 1.0)) throw InputError("Fourier model rho must lie in (-1, 1)");
    if (c.representation == Representation::grid && c.grid_points < 2) {
      throw InputError("grid representation needs at least 2 points");
    }
    const Eigen::MatrixXd sigma = fourier_innovation_cov(c.cov_kind, c.rho);
    const Eigen::MatrixXd a = 0.5 * Eigen::MatrixXd::Identity(kFourierDim, kFourierDim);
    a_ = a;
    chol_sigma_ = cholesky_factor(sigma, "Fourier innovation covariance");
    chol_stationary_ = cholesky_factor(lyapunov_stationary_cov(a, sigma), "Fourier stationary covariance");
    if (c.representation == Representation::grid) {
      const std::size_t p = c.grid_points;
      basis_.resize(static_cast<Eigen::Index>(p), kFourierBasis);
      for (std::size_t g = 0; g < p; ++g) {
        const double s = static_cast<double>(g) / static_cast<double>(p - 1);
        for (int k = 0; k < kFourierBasis; ++k) basis_(static_cast<Eigen::Index>(g), k) = fourier_basis(k, s);
      }
    }
  }

  [[nodiscard]] const FourierConfig& config() const { return config_; }

  [[nodiscard]] PairedSample generate(std::size_t n, std::uint64_t seed) const {
    if (n == 0) throw InputError("sample length must be >= 1");
    const auto states = detail::run_var(a_, chol_sigma_, chol_stationary_, true, 0, n, seed);
    if (config_.representation == Representation::coefficients) {
      std::vector<double> xs, ys;
      xs.reserve(n * kFourierBasis);
      ys.reserve(n * kFourierBasis);
      for (const auto& c : states) {
        for (int k = 0; k < kFourierBasis; ++k) xs.push_back(c[k]);
        for (int k = 0; k < kFourierBasis; ++k) ys.push_back(c[k + kFourierBasis]);
      }
      return PairedSample::from_flat(MetricDescriptor::euclidean(kFourierBasis),
                                     MetricDescriptor::euclidean(kFourierBasis), std::move(xs), std::move(ys));
    }
    const std::size_t p = config_.grid_points;
    std::vector<double> xs, ys;
    xs.reserve(n * p);
    ys.reserve(n * p);
    for (const auto& c : states) {
      const Eigen::VectorXd fx = basis_ * c.head(kFourierBasis);
      const Eigen::VectorXd fy = basis_ * c.tail(kFourierBasis);
      xs.insert(xs.end(), fx.data(), fx.data() + fx.size());
      ys.insert(ys.end(), fy.data(), fy.data() + fy.size());
    }
    return PairedSample::from_flat(MetricDescriptor::trapezoid(p), MetricDescriptor::trapezoid(p), std::move(xs),
                                   std::move(ys));
  }

 private:
  FourierConfig config_;
  Eigen::MatrixXd a_;
  Eigen::MatrixXd chol_sigma_;
  Eigen::MatrixXd chol_stationary_;
  Eigen::MatrixXd basis_;
};

inline PairedSample gen_fourier(const FourierConfig& c, std::uint64_t seed) {
  return FourierModel(c).generate(c.n, seed);
}

inline Generator var_generator(VarConfig c) {
  validate(c);
  return [c](std::size_t n, std::uint64_t seed) {
    VarConfig local = c;
    local.n = n;
    return gen_var(local, seed);
  };
}

inline Generator fourier_generator(const FourierConfig& c) {
  auto model = std::make_shared<const FourierModel>(c);
  return [model](std::size_t n, std::uint64_t seed) { return model->generate(n, seed); };
}

/// Y = X with X i.i.d. standard normal: dcor is 1 on every sample.
inline Generator coupled_generator() {
  return [](std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z;
    std::vector<double> xs(n);
    for (auto& v : xs) v = z(rng);
    auto ys = xs;
    return scalar_sample(std::move(xs), std::move(ys));
  };
}

struct PopulationEstimate {
  double mean = 0.0;
  double se = 0.0;
  std::size_t reps = 0;
  std::size_t n = 0;
  std::uint64_t seed = 0;
};

inline constexpr std::size_t kPopulationReps = 100;
inline constexpr std::size_t kPopulationN = 1000;

namespace detail {

template <class Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
  if (threads <= 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::jthread> pool;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      for (std::size_t i = t; i < count; i += threads) fn(i);
    });
  }
}

}  // namespace detail

/// Mean of `reps` independent dcor_n values with its standard error.
inline PopulationEstimate estimate_population_dcor(const Generator& gen, std::size_t reps = kPopulationReps,
                                                   std::size_t n = kPopulationN, std::uint64_t master_seed = 1,
                                                   unsigned threads = 1) {
  if (reps == 0) throw InputError("reps must be >= 1");
  std::vector<double> values(reps);
  detail::parallel_for(reps, threads,
                       [&](std::size_t r) { values[r] = dcor_empirical(gen(n, derive_seed(master_seed, r))); });
  CompensatedSum sum;
  for (double v : values) sum += v;
  const double mean = sum.value() / static_cast<double>(reps);
  CompensatedSum ss;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double var = reps > 1 ? ss.value() / static_cast<double>(reps - 1) : 0.0;
  return {mean, std::sqrt(var / static_cast<double>(reps)), reps, n, master_seed};
}

struct TestKind {
  Direction direction = Direction::relevant;
  Measure measure = Measure::dcor;
};

struct RejectionRate {
  double delta = 0.0;
  std::size_t rejections = 0;
  std::size_t reps = 0;
  [[nodiscard]] double rate() const { return reps ? static_cast<double>(rejections) / static_cast<double>(reps) : 0.0; }
  [[nodiscard]] double se() const {
    const double p = rate();
    return reps ? std::sqrt(p * (1.0 - p) / static_cast<double>(reps)) : 0.0;
  }
};

/// Rejection counts for several thresholds on one shared set of seeded
/// replicates, so counts are comparable (and monotone) across thresholds.
inline std::vector<RejectionRate> rejection_rates(const Generator& gen, TestKind kind, const std::vector<double>& deltas,
                                                  double alpha, std::size_t n, std::size_t reps,
                                                  const QuantileTable& table, std::uint64_t master_seed,
                                                  unsigned threads = 1) {
  if (reps == 0) throw InputError("reps must be >= 1");
  if (n < 2) throw InputError("n must be >= 2");
  check_alpha(alpha);
  (void)table.quantile(1.0 - alpha);
  std::vector<PivotInputs> pivots(reps);
  detail::parallel_for(reps, threads, [&](std::size_t r) {
    const auto sample = gen(n, derive_seed(master_seed, r));
    pivots[r] = pivot_inputs(prefix_processes(sample), table.gamma, kind.measure);
  });
  std::vector<RejectionRate> out;
  for (double delta : deltas) {
    RejectionRate rr{delta, 0, reps};
    for (const auto& p : pivots) {
      if (decide(p, delta, alpha, table, kind.measure, kind.direction).decision == Decision::reject) ++rr.rejections;
    }
    out.push_back(rr);
  }
  return out;
}

inline RejectionRate rejection_rate(const Generator& gen, TestKind kind, double delta, double alpha, std::size_t n,
                                    std::size_t reps, const QuantileTable& table, std::uint64_t master_seed,
                                    unsigned threads = 1) {
  return rejection_rates(gen, kind, {delta}, alpha, n, reps, table, master_seed, threads).front();
}

/// One line of the plot-ready experiment table.
struct ExperimentRow {
  double delta = 0.0;
  std::size_t n = 0;
  double rho = 0.0;
  std::string cov_kind;  // "sparse", "full", or "na" for the VAR model
  double population_dcor = 0.0;
  double rate = 0.0;
  double se = 0.0;
  std::size_t reps = 0;
  std::uint64_t master_seed = 0;
};

inline void write_experiment_header(std::ostream& os) {
  os << "delta,n,rho,cov_kind,population_dcor,rate,se,reps,master_seed\n";
}

inline void write_experiment_row(std::ostream& os, const ExperimentRow& r) {
  os << detail::fmt17(r.delta) << ',' << r.n << ',' << detail::fmt17(r.rho) << ',' << r.cov_kind << ','
     << detail::fmt17(r.population_dcor) << ',' << detail::fmt17(r.rate) << ',' << detail::fmt17(r.se) << ','
     << r.reps << ',' << r.master_seed << '\n';
}

}  // namespace reldcor
