#pragma once

// Self-normalized tests for relevant hypotheses about dcor (or dcov):
//
//   relevant:    H0: dcor <= delta  vs  H1: dcor > delta,  reject if T > w_{1-alpha}
//   equivalence: H0: dcor >= delta  vs  H1: dcor < delta,  reject if T < w_alpha = -w_{1-alpha}
//
// with T = (estimate - delta) / V_n, plus the minimum relevant threshold and
// the confidence interval that fall out of the same pivot.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "reldcor/common.hpp"
#include "reldcor/metric.hpp"
#include "reldcor/pivotal.hpp"
#include "reldcor/sequential.hpp"

namespace reldcor {

enum class Measure { dcor, dcov };
enum class Direction { relevant, equivalence };
enum class Decision { reject, retain };

inline const char* to_string(Measure m) { return m == Measure::dcor ? "dcor" : "dcov"; }
inline const char* to_string(Direction d) { return d == Direction::relevant ? "relevant" : "equivalence"; }
inline const char* to_string(Decision d) { return d == Decision::reject ? "reject" : "retain"; }

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

struct TestReport {
  std::size_t n = 0;
  Measure measure = Measure::dcor;
  Direction direction = Direction::relevant;
  double delta = 0.0;
  double alpha = 0.05;
  double estimate = 0.0;
  double normalizer = 0.0;
  double statistic = 0.0;  // +-inf when the normalizer vanishes
  double quantile_used = 0.0;
  Decision decision = Decision::retain;
  double delta_hat = 0.0;
  double delta_hat_sim = 0.0;
  std::optional<Interval> ci;          // raw, unclamped
  std::optional<Interval> ci_clamped;  // intersected with [0, 1] for dcor, [0, inf) for dcov
  std::string quantile_table_id;
  bool degenerate = false;  // normalizer == 0
  std::vector<std::string> warnings;
};

/// Estimate and normalizer for a measure, read off a sequential path.
struct PivotInputs {
  std::size_t n = 0;
  double estimate = 0.0;
  double normalizer = 0.0;
};

inline PivotInputs pivot_inputs(const SequentialPath& path, const GammaMeasure& gamma, Measure m) {
  if (m == Measure::dcor) return {path.n, path.dcor_at(path.n), normalizer_dcor(path, gamma)};
  return {path.n, path.dcov_at(path.n), normalizer_dcov(path, gamma)};
}

/// (estimate - delta) / normalizer; signed infinity on a zero normalizer.
inline double pivot_statistic(double estimate, double delta, double normalizer) {
  const double num = estimate - delta;
  if (normalizer == 0.0) {
    if (num == 0.0) return 0.0;
    return num > 0.0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
  }
  return num / normalizer;
}

/// Delta_hat_alpha = max(0, estimate - w_{1-alpha} V).
inline double min_relevant_delta(double estimate, double normalizer, double w_upper) {
  const double d = estimate - w_upper * normalizer;
  return d > 0.0 ? d : 0.0;
}

/// [estimate + w_{alpha/2} V, estimate + w_{1-alpha/2} V].
inline Interval confidence_interval(double estimate, double normalizer, double w_lo, double w_hi) {
  return {estimate + w_lo * normalizer, estimate + w_hi * normalizer};
}

inline void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InputError("alpha must lie in (0, 1)");
}

/// Fills a report from precomputed pivot inputs. Shared by the sample-level
/// entry points and the simulation loops.
inline TestReport decide(const PivotInputs& in, double delta, double alpha, const QuantileTable& table,
                         Measure measure, Direction direction) {
  check_alpha(alpha);
  if (!(delta >= 0.0) || !std::isfinite(delta)) throw InputError("delta must be finite and >= 0");
  const double w_upper = table.quantile(1.0 - alpha);

  TestReport r;
  r.n = in.n;
  r.measure = measure;
  r.direction = direction;
  r.delta = delta;
  r.alpha = alpha;
  r.estimate = in.estimate;
  r.normalizer = in.normalizer;
  r.statistic = pivot_statistic(in.estimate, delta, in.normalizer);
  r.degenerate = in.normalizer == 0.0;
  if (direction == Direction::relevant) {
    r.quantile_used = w_upper;
    r.decision = r.statistic > r.quantile_used ? Decision::reject : Decision::retain;
  } else {
    r.quantile_used = -w_upper;
    r.decision = r.statistic < r.quantile_used ? Decision::reject : Decision::retain;
  }
  r.delta_hat = min_relevant_delta(in.estimate, in.normalizer, w_upper);
  r.delta_hat_sim = in.estimate + w_upper * in.normalizer;

  const auto* lo = table.find(alpha / 2.0);
  const auto* hi = table.find(1.0 - alpha / 2.0);
  if (lo && hi) {
    r.ci = confidence_interval(in.estimate, in.normalizer, lo->w, hi->w);
    const double cap = measure == Measure::dcor ? 1.0 : std::numeric_limits<double>::infinity();
    r.ci_clamped = Interval{std::clamp(r.ci->lo, 0.0, cap), std::clamp(r.ci->hi, 0.0, cap)};
  } else {
    r.warnings.emplace_back("quantile table lacks alpha/2 or 1-alpha/2; confidence interval omitted");
  }
  r.quantile_table_id = table_id(table);

  if (r.degenerate) r.warnings.emplace_back("normalizer is zero; the pivotal limit assumes a positive scale");
  if (delta == 0.0) r.warnings.emplace_back("delta = 0 is the exact-independence case; the pivotal limit is not justified there");
  if (!gamma_resolves(table.gamma, in.n)) {
    r.warnings.emplace_back("smallest gamma atom is below 1/n; that atom uses an empty prefix");
  }
  return r;
}

inline TestReport run_test(const PairedSample& sample, double delta, double alpha, const QuantileTable& table,
                           Measure measure, Direction direction) {
  if (sample.size() < 2) throw InputError("tests need n >= 2");
  const auto path = prefix_processes(sample);
  return decide(pivot_inputs(path, table.gamma, measure), delta, alpha, table, measure, direction);
}

inline TestReport relevant_test(const PairedSample& sample, double delta, double alpha, const QuantileTable& table,
                                Measure measure = Measure::dcor) {
  return run_test(sample, delta, alpha, table, measure, Direction::relevant);
}

inline TestReport equivalence_test(const PairedSample& sample, double delta, double alpha,
                                   const QuantileTable& table) {
  return run_test(sample, delta, alpha, table, Measure::dcor, Direction::equivalence);
}

struct MinimumDelta {
  double delta_hat = 0.0;      // relevant direction
  double delta_hat_sim = 0.0;  // equivalence direction
};

inline MinimumDelta min_relevant_delta(const PairedSample& sample, double alpha, const QuantileTable& table) {
  check_alpha(alpha);
  if (sample.size() < 2) throw InputError("n >= 2 required");
  const auto in = pivot_inputs(prefix_processes(sample), table.gamma, Measure::dcor);
  const double w = table.quantile(1.0 - alpha);
  return {min_relevant_delta(in.estimate, in.normalizer, w), in.estimate + w * in.normalizer};
}

inline Interval confidence_interval(const PairedSample& sample, double alpha, const QuantileTable& table) {
  check_alpha(alpha);
  const double lo = table.quantile(alpha / 2.0);
  const double hi = table.quantile(1.0 - alpha / 2.0);
  const auto in = pivot_inputs(prefix_processes(sample), table.gamma, Measure::dcor);
  return confidence_interval(in.estimate, in.normalizer, lo, hi);
}

}  // namespace reldcor
