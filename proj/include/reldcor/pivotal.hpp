#pragma once

// Monte-Carlo simulation of the pivotal limit
//
//   W = B(1) / sqrt( sum_k w_k l_k^2 (B(l_k) - l_k B(1))^2 )
//
// for a discrete weighting measure gamma. Since gamma is discrete, sampling
// the Brownian motion exactly on {0} u supp(gamma) u {1} samples W exactly.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "reldcor/common.hpp"
#include "reldcor/sequential.hpp"

namespace reldcor {

struct BrownianGridPath {
  std::vector<double> times;   // 0 = t_0 < ... < t_M = 1
  std::vector<double> values;  // B(t_i), values[0] = 0
};

/// {0} u supp(gamma) u {1}.
inline std::vector<double> grid_times(const GammaMeasure& gamma) {
  std::vector<double> t{0.0};
  t.insert(t.end(), gamma.support().begin(), gamma.support().end());
  if (t.back() < 1.0) t.push_back(1.0);
  return t;
}

inline void check_times(std::span<const double> times) {
  if (times.size() < 2 || times.front() != 0.0) throw InputError("Brownian grid must start at 0 and have >= 2 points");
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1])) throw InputError("Brownian grid times must be strictly increasing");
  }
}

/// Cumulative sums of independent N(0, t_{i+1} - t_i) increments.
template <class Urbg>
BrownianGridPath simulate_brownian_grid(std::span<const double> times, Urbg& rng) {
  check_times(times);
  std::normal_distribution<double> z;
  BrownianGridPath p{{times.begin(), times.end()}, std::vector<double>(times.size(), 0.0)};
  for (std::size_t i = 1; i < times.size(); ++i) {
    p.values[i] = p.values[i - 1] + std::sqrt(times[i] - times[i - 1]) * z(rng);
  }
  return p;
}

struct WDraw {
  double value = 0.0;       // +-inf when degenerate
  bool degenerate = false;  // zero denominator
};

namespace detail {

// Positions of gamma's atoms within the grid.
inline std::vector<std::size_t> atom_positions(std::span<const double> times, const GammaMeasure& gamma) {
  std::vector<std::size_t> pos;
  pos.reserve(gamma.size());
  std::size_t j = 0;
  for (double l : gamma.support()) {
    while (j < times.size() && times[j] < l - 1e-15) ++j;
    if (j == times.size() || std::fabs(times[j] - l) > 1e-15) {
      throw InputError("gamma atom " + std::to_string(l) + " is not a grid time");
    }
    pos.push_back(j);
  }
  return pos;
}

inline WDraw evaluate_W_at(std::span<const double> values, std::span<const std::size_t> pos,
                           const GammaMeasure& gamma) {
  const double b1 = values.back();
  double den = 0.0;
  for (std::size_t k = 0; k < pos.size(); ++k) {
    const double l = gamma.support()[k];
    const double d = l * (values[pos[k]] - l * b1);
    den += gamma.weights()[k] * d * d;
  }
  if (den == 0.0) {
    const double inf = std::numeric_limits<double>::infinity();
    return {b1 < 0.0 ? -inf : inf, true};
  }
  return {b1 / std::sqrt(den), false};
}

}  // namespace detail

/// Evaluates W on a simulated (or injected) path. The path's last time must be 1.
inline WDraw evaluate_W(const BrownianGridPath& path, const GammaMeasure& gamma) {
  check_times(path.times);
  if (path.values.size() != path.times.size()) throw InputError("path values and times differ in length");
  if (path.times.back() != 1.0) throw InputError("Brownian grid must end at 1");
  const auto pos = detail::atom_positions(path.times, gamma);
  return detail::evaluate_W_at(path.values, pos, gamma);
}

/// One W draw for replicate `index` of a run seeded by `seed`.
inline WDraw draw_W(const GammaMeasure& gamma, std::span<const double> times, std::span<const std::size_t> pos,
                    std::uint64_t seed, std::uint64_t index) {
  std::mt19937_64 rng(derive_seed(seed, index));
  const auto path = simulate_brownian_grid(times, rng);
  return detail::evaluate_W_at(path.values, pos, gamma);
}

/// Type-7 empirical quantile of sorted data.
inline double quantile_type7(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw InputError("quantile of empty data");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const double lo = std::floor(h);
  const auto i = static_cast<std::size_t>(lo);
  if (i + 1 >= sorted.size()) return sorted.back();
  return sorted[i] + (h - lo) * (sorted[i + 1] - sorted[i]);
}

struct QuantileEntry {
  double p = 0.0;
  double w = 0.0;
  double se = 0.0;  // Woodruff Monte-Carlo standard error
  friend bool operator==(const QuantileEntry&, const QuantileEntry&) = default;
};

struct QuantileTable {
  GammaMeasure gamma = GammaMeasure::default_measure();
  std::uint64_t runs = 0;
  std::uint64_t seed = 0;
  std::uint64_t excluded = 0;  // degenerate draws left out of the pool
  std::vector<QuantileEntry> entries;

  [[nodiscard]] const QuantileEntry* find(double p) const {
    for (const auto& e : entries) {
      if (std::fabs(e.p - p) <= 1e-12) return &e;
    }
    return nullptr;
  }

  /// Exact-probability lookup; no interpolation between rows.
  [[nodiscard]] double quantile(double p) const {
    if (const auto* e = find(p)) return e->w;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", p);
    throw InputError(std::string("quantile table has no entry for p = ") + buf);
  }

  friend bool operator==(const QuantileTable&, const QuantileTable&) = default;
};

inline constexpr std::uint64_t kMinQuantileRuns = 10000;

/// Probabilities covering alpha, 1-alpha, alpha/2, 1-alpha/2 for alpha in {0.01, 0.05, 0.10}.
inline std::vector<double> default_probabilities() {
  return {0.005, 0.01, 0.025, 0.05, 0.1, 0.9, 0.95, 0.975, 0.99, 0.995};
}

/// Sorted pool of finite W draws and the count of degenerate ones.
struct WSample {
  std::vector<double> sorted;
  std::uint64_t excluded = 0;
};

inline WSample simulate_W(const GammaMeasure& gamma, std::uint64_t runs, std::uint64_t seed, unsigned threads = 1) {
  const auto times = grid_times(gamma);
  const auto pos = detail::atom_positions(times, gamma);
  std::vector<double> draws(runs);
  std::vector<unsigned char> flags(runs, 0);
  auto work = [&](std::uint64_t begin, std::uint64_t stride) {
    for (std::uint64_t r = begin; r < runs; r += stride) {
      const WDraw d = draw_W(gamma, times, pos, seed, r);
      draws[r] = d.value;
      flags[r] = d.degenerate ? 1 : 0;
    }
  };
  if (threads <= 1) {
    work(0, 1);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, t, threads);
  }
  WSample out;
  out.sorted.reserve(runs);
  for (std::uint64_t r = 0; r < runs; ++r) {
    if (flags[r]) {
      ++out.excluded;
    } else {
      out.sorted.push_back(draws[r]);
    }
  }
  std::sort(out.sorted.begin(), out.sorted.end());
  return out;
}

/// Woodruff-style standard error of the p-quantile from the sorted pool.
inline double woodruff_se(std::span<const double> sorted, double p) {
  constexpr double z = 1.959963984540054;
  const double d = z * std::sqrt(p * (1.0 - p) / static_cast<double>(sorted.size()));
  const double lo = quantile_type7(sorted, std::max(0.0, p - d));
  const double hi = quantile_type7(sorted, std::min(1.0, p + d));
  return (hi - lo) / (2.0 * z);
}

inline QuantileTable quantile_table(const GammaMeasure& gamma, std::uint64_t runs, std::vector<double> probabilities,
                                    std::uint64_t seed, unsigned threads = 1) {
  if (runs < kMinQuantileRuns) {
    throw InputError("quantile table needs at least " + std::to_string(kMinQuantileRuns) + " runs");
  }
  std::sort(probabilities.begin(), probabilities.end());
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    if (!(probabilities[i] > 0.0 && probabilities[i] < 1.0)) throw InputError("probabilities must lie in (0, 1)");
    if (i > 0 && probabilities[i] == probabilities[i - 1]) throw InputError("duplicate probability");
  }
  const WSample pool = simulate_W(gamma, runs, seed, threads);
  if (pool.sorted.empty()) throw InputError("every W draw was degenerate");
  QuantileTable t{gamma, runs, seed, pool.excluded, {}};
  for (double p : probabilities) {
    t.entries.push_back({p, quantile_type7(pool.sorted, p), woodruff_se(pool.sorted, p)});
  }
  return t;
}

// Serialization: versioned tab-separated key/value text, 17 significant digits.

namespace detail {

inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string join17(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += fmt17(v[i]);
  }
  return s;
}

inline double parse_double(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw InputError("cannot parse " + what + ": '" + s + "'");
  }
  if (used != s.size()) throw InputError("trailing characters in " + what + ": '" + s + "'");
  return v;
}

inline std::uint64_t parse_u64(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(s, &used);
  } catch (const std::exception&) {
    throw InputError("cannot parse " + what + ": '" + s + "'");
  }
  if (used != s.size() || s.empty() || s[0] == '-') throw InputError("invalid " + what + ": '" + s + "'");
  return v;
}

inline std::vector<double> parse_list(const std::string& s, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(item, what));
  return out;
}

}  // namespace detail

inline constexpr const char* kQuantileTableFormat = "reldcor-quantile-table";
inline constexpr int kQuantileTableVersion = 1;

inline std::string serialize(const QuantileTable& t) {
  std::string s;
  s += std::string("format\t") + kQuantileTableFormat + "\n";
  s += "version\t" + std::to_string(kQuantileTableVersion) + "\n";
  s += "gamma_support\t" + detail::join17(t.gamma.support()) + "\n";
  s += "gamma_weights\t" + detail::join17(t.gamma.weights()) + "\n";
  s += "runs\t" + std::to_string(t.runs) + "\n";
  s += "seed\t" + std::to_string(t.seed) + "\n";
  s += "excluded\t" + std::to_string(t.excluded) + "\n";
  for (const auto& e : t.entries) {
    s += detail::fmt17(e.p) + "\t" + detail::fmt17(e.w) + "\t" + detail::fmt17(e.se) + "\n";
  }
  return s;
}

inline QuantileTable parse_quantile_table(const std::string& text) {
  std::stringstream in(text);
  std::string line;
  std::vector<double> support, weights;
  bool have_support = false, have_weights = false, have_runs = false, have_seed = false;
  QuantileTable t;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> f;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, '\t')) f.push_back(cell);
    const std::string where = "quantile table line " + std::to_string(lineno);
    if (f.size() == 2) {
      const std::string& key = f[0];
      if (key == "format") {
        if (f[1] != kQuantileTableFormat) throw InputError(where + ": unknown format '" + f[1] + "'");
      } else if (key == "version") {
        if (detail::parse_u64(f[1], "version") != static_cast<std::uint64_t>(kQuantileTableVersion)) {
          throw InputError(where + ": unsupported version " + f[1]);
        }
      } else if (key == "gamma_support") {
        support = detail::parse_list(f[1], "gamma_support");
        have_support = true;
      } else if (key == "gamma_weights") {
        weights = detail::parse_list(f[1], "gamma_weights");
        have_weights = true;
      } else if (key == "runs") {
        t.runs = detail::parse_u64(f[1], "runs");
        have_runs = true;
      } else if (key == "seed") {
        t.seed = detail::parse_u64(f[1], "seed");
        have_seed = true;
      } else if (key == "excluded") {
        t.excluded = detail::parse_u64(f[1], "excluded");
      } else {
        throw InputError(where + ": unknown key '" + key + "'");
      }
    } else if (f.size() == 3) {
      QuantileEntry e{detail::parse_double(f[0], "p"), detail::parse_double(f[1], "w_p"),
                      detail::parse_double(f[2], "se_p")};
      if (!(e.p > 0.0 && e.p < 1.0)) throw InputError(where + ": probability outside (0, 1)");
      if (!t.entries.empty() && !(t.entries.back().p < e.p)) {
        throw InputError(where + ": probabilities must be strictly increasing");
      }
      t.entries.push_back(e);
    } else {
      throw InputError(where + ": expected 2 or 3 tab-separated fields");
    }
  }
  if (!have_support || !have_weights || !have_runs || !have_seed) {
    throw InputError("quantile table is missing one of gamma_support, gamma_weights, runs, seed");
  }
  t.gamma = GammaMeasure(std::move(support), std::move(weights));
  return t;
}

/// Short identifier of a table: FNV-1a of its serialized form.
inline std::string table_id(const QuantileTable& t) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : serialize(t)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace reldcor
