#pragma once

// Dataset files and report rendering.
//
// Dataset: comma-delimited text, header `x1,...,xp,y1,...,yq`, one
// observation per line in time order. A `#weights: w1,...,w_{p+q}` line
// switches both spaces to the weighted-Euclidean (discretized L2) metric.
// Other lines starting with '#' are comments.

#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "reldcor/common.hpp"
#include "reldcor/inference.hpp"
#include "reldcor/metric.hpp"
#include "reldcor/pivotal.hpp"
#include "reldcor/sequential.hpp"

namespace reldcor {

struct Dataset {
  std::vector<std::string> x_columns;
  std::vector<std::string> y_columns;
  std::optional<std::vector<double>> x_weights;
  std::optional<std::vector<double>> y_weights;
  PairedSample sample;
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline double parse_cell(const std::string& cell, std::size_t lineno) {
  const std::string where = "line " + std::to_string(lineno);
  if (cell.empty()) throw InputError(where + ": empty field");
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(cell, &used);
  } catch (const std::exception&) {
    throw InputError(where + ": not a number: '" + cell + "'");
  }
  if (used != cell.size()) throw InputError(where + ": not a number: '" + cell + "'");
  if (!std::isfinite(v)) throw InputError(where + ": non-finite value '" + cell + "'");
  return v;
}

}  // namespace detail

inline Dataset parse_dataset(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  std::vector<std::string> header;
  std::vector<std::size_t> x_idx, y_idx;
  std::optional<std::vector<double>> weights;
  std::size_t weights_line = 0;
  std::vector<double> xs, ys;
  std::size_t rows = 0;

  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = detail::trim(line);
    if (t.empty()) continue;
    if (t[0] == '#') {
      const std::string tag = "#weights:";
      if (t.rfind(tag, 0) == 0) {
        std::vector<double> w;
        for (const auto& c : detail::split_commas(detail::trim(t.substr(tag.size())))) {
          w.push_back(detail::parse_cell(c, lineno));
        }
        weights = std::move(w);
        weights_line = lineno;
      }
      continue;
    }
    const auto cells = detail::split_commas(t);
    if (header.empty()) {
      header = cells;
      for (std::size_t i = 0; i < header.size(); ++i) {
        const auto& name = header[i];
        if (!name.empty() && (name[0] == 'x' || name[0] == 'X')) {
          x_idx.push_back(i);
        } else if (!name.empty() && (name[0] == 'y' || name[0] == 'Y')) {
          y_idx.push_back(i);
        } else {
          throw InputError("line " + std::to_string(lineno) + ": column '" + name + "' is neither x* nor y*");
        }
      }
      if (x_idx.empty() || y_idx.empty()) {
        throw InputError("line " + std::to_string(lineno) + ": header needs at least one x and one y column");
      }
      continue;
    }
    if (cells.size() != header.size()) {
      throw InputError("line " + std::to_string(lineno) + ": expected " + std::to_string(header.size()) +
                       " fields, got " + std::to_string(cells.size()));
    }
    for (auto i : x_idx) xs.push_back(detail::parse_cell(cells[i], lineno));
    for (auto i : y_idx) ys.push_back(detail::parse_cell(cells[i], lineno));
    ++rows;
  }
  if (header.empty()) throw InputError("dataset has no header line");
  if (rows == 0) throw InputError("dataset has no observations");

  std::optional<std::vector<double>> xw, yw;
  if (weights) {
    if (weights->size() != header.size()) {
      throw InputError("line " + std::to_string(weights_line) + ": #weights has " + std::to_string(weights->size()) +
                       " entries for " + std::to_string(header.size()) + " columns");
    }
    xw.emplace();
    yw.emplace();
    for (auto i : x_idx) xw->push_back((*weights)[i]);
    for (auto i : y_idx) yw->push_back((*weights)[i]);
  }
  auto xm = xw ? MetricDescriptor::weighted(*xw) : MetricDescriptor::euclidean(x_idx.size());
  auto ym = yw ? MetricDescriptor::weighted(*yw) : MetricDescriptor::euclidean(y_idx.size());
  std::vector<std::string> xn, yn;
  for (auto i : x_idx) xn.push_back(header[i]);
  for (auto i : y_idx) yn.push_back(header[i]);
  return {std::move(xn), std::move(yn), std::move(xw), std::move(yw),
          PairedSample::from_flat(std::move(xm), std::move(ym), std::move(xs), std::move(ys))};
}

inline Dataset read_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open dataset '" + path + "'");
  return parse_dataset(in);
}

/// Writes a sample in the dataset format with 17 significant digits.
inline void write_dataset(std::ostream& os, const PairedSample& s) {
  const std::size_t p = s.x_metric().dimension();
  const std::size_t q = s.y_metric().dimension();
  const bool weighted =
      s.x_metric().kind() == MetricKind::weighted_euclidean || s.y_metric().kind() == MetricKind::weighted_euclidean;
  if (weighted) {
    os << "#weights: ";
    for (std::size_t k = 0; k < p; ++k) {
      os << (k ? "," : "") << detail::fmt17(s.x_metric().weights().empty() ? 1.0 : s.x_metric().weights()[k]);
    }
    for (std::size_t k = 0; k < q; ++k) {
      os << ',' << detail::fmt17(s.y_metric().weights().empty() ? 1.0 : s.y_metric().weights()[k]);
    }
    os << '\n';
  }
  for (std::size_t k = 0; k < p; ++k) os << (k ? "," : "") << 'x' << k + 1;
  for (std::size_t k = 0; k < q; ++k) os << ",y" << k + 1;
  os << '\n';
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto x = s.x(i);
    const auto y = s.y(i);
    for (std::size_t k = 0; k < p; ++k) os << (k ? "," : "") << detail::fmt17(x[k]);
    for (std::size_t k = 0; k < q; ++k) os << ',' << detail::fmt17(y[k]);
    os << '\n';
  }
}

/// Writes the prefix trajectories as `m,dcov_xy,dcov_xx,dcov_yy,dcor`.
inline void write_path(std::ostream& os, const SequentialPath& p) {
  os << "m,dcov_xy,dcov_xx,dcov_yy,dcor\n";
  for (std::size_t m = 0; m < p.n; ++m) {
    os << m + 1 << ',' << detail::fmt17(p.dcov_xy[m]) << ',' << detail::fmt17(p.dcov_xx[m]) << ','
       << detail::fmt17(p.dcov_yy[m]) << ',' << detail::fmt17(p.dcor[m]) << '\n';
  }
}

inline constexpr int kReportSchemaVersion = 1;

namespace detail {

inline nlohmann::json number_or_inf(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "+inf" : "-inf";
}

}  // namespace detail

/// Machine-readable report. Non-finite statistics are written as the
/// strings "+inf" / "-inf".
inline nlohmann::json to_json(const TestReport& r) {
  nlohmann::json j;
  j["schema"] = "reldcor-test-report";
  j["schema_version"] = kReportSchemaVersion;
  j["n"] = r.n;
  j["measure"] = to_string(r.measure);
  j["direction"] = to_string(r.direction);
  j["delta"] = r.delta;
  j["alpha"] = r.alpha;
  j["estimate"] = r.estimate;
  j["normalizer"] = r.normalizer;
  j["statistic"] = detail::number_or_inf(r.statistic);
  j["quantile_used"] = r.quantile_used;
  j["decision"] = to_string(r.decision);
  j["delta_hat"] = r.delta_hat;
  j["delta_hat_sim"] = r.delta_hat_sim;
  j["ci"] = r.ci ? nlohmann::json::array({r.ci->lo, r.ci->hi}) : nlohmann::json(nullptr);
  j["ci_clamped"] = r.ci_clamped ? nlohmann::json::array({r.ci_clamped->lo, r.ci_clamped->hi}) : nlohmann::json(nullptr);
  j["quantile_table_id"] = r.quantile_table_id;
  j["degenerate"] = r.degenerate;
  j["warnings"] = r.warnings;
  return j;
}

inline std::string render_text(const TestReport& r) {
  std::ostringstream os;
  const bool rel = r.direction == Direction::relevant;
  os << (rel ? "Relevant-hypothesis test" : "Equivalence test") << " for " << to_string(r.measure) << "\n";
  os << "  H0: " << to_string(r.measure) << (rel ? " <= " : " >= ") << detail::fmt17(r.delta) << "\n";
  os << "  n               " << r.n << "\n";
  os << "  alpha           " << detail::fmt17(r.alpha) << "\n";
  os << "  estimate        " << detail::fmt17(r.estimate) << "\n";
  os << "  normalizer      " << detail::fmt17(r.normalizer) << "\n";
  os << "  statistic       " << detail::fmt17(r.statistic) << "\n";
  os << "  quantile_used   " << detail::fmt17(r.quantile_used) << "\n";
  os << "  decision        " << to_string(r.decision) << "\n";
  os << "  delta_hat       " << detail::fmt17(r.delta_hat) << "\n";
  os << "  delta_hat_sim   " << detail::fmt17(r.delta_hat_sim) << "\n";
  if (r.ci) {
    os << "  ci              [" << detail::fmt17(r.ci->lo) << ", " << detail::fmt17(r.ci->hi) << "]\n";
    os << "  ci_clamped      [" << detail::fmt17(r.ci_clamped->lo) << ", " << detail::fmt17(r.ci_clamped->hi) << "]\n";
  }
  os << "  quantile_table  " << r.quantile_table_id << "\n";
  for (const auto& w : r.warnings) os << "  warning: " << w << "\n";
  return os.str();
}

inline QuantileTable read_quantile_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open quantile table '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_quantile_table(ss.str());
}

}  // namespace reldcor
