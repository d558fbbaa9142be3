// reldcor: command-line front end.
//
//   reldcor dcor      DATASET            estimates, normalizers, optional prefix path
//   reldcor test      DATASET --delta D  relevant / equivalence test, exit 0 retain, 3 reject
//   reldcor quantiles --runs N --out F   Monte-Carlo quantile table of W
//   reldcor simulate  --model var|fourier  rejection-rate experiment table
//
// Exit codes: 0 success (or "retain" for `test`), 3 "reject", 2 input error,
// 1 internal error, CLI11's codes (>= 100) for usage errors.

#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "reldcor/reldcor.hpp"

namespace {

using namespace reldcor;

constexpr int kExitRetain = 0;
constexpr int kExitReject = 3;
constexpr int kExitInput = 2;
constexpr int kExitInternal = 1;

std::vector<double> parse_doubles(const std::string& s, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(detail::parse_double(detail::trim(item), what));
  if (out.empty()) throw InputError(what + " is empty");
  return out;
}

GammaMeasure parse_gamma(const std::string& atoms, const std::string& weights) {
  if (atoms == "default") {
    if (!weights.empty()) throw InputError("--gamma-weights needs explicit --gamma-atoms");
    return GammaMeasure::default_measure();
  }
  auto support = parse_doubles(atoms, "--gamma-atoms");
  if (weights.empty()) return GammaMeasure::uniform_over(std::move(support));
  return {std::move(support), parse_doubles(weights, "--gamma-weights")};
}

MetricDescriptor resolve_metric(const std::string& choice, const MetricDescriptor& from_file, const char* which) {
  if (choice == "auto") return from_file;
  if (choice == "euclidean") return MetricDescriptor::euclidean(from_file.dimension());
  if (choice == "trapezoid") {
    if (from_file.dimension() < 2) {
      throw InputError(std::string("metric mismatch: trapezoid ") + which + "-metric needs >= 2 grid columns");
    }
    return MetricDescriptor::trapezoid(from_file.dimension());
  }
  throw InputError(std::string("unknown ") + which + "-metric '" + choice + "'");
}

PairedSample load_sample(const std::string& path, const std::string& xm, const std::string& ym) {
  const Dataset ds = read_dataset(path);
  const auto& s = ds.sample;
  auto xd = resolve_metric(xm, s.x_metric(), "x");
  auto yd = resolve_metric(ym, s.y_metric(), "y");
  return PairedSample::from_flat(std::move(xd), std::move(yd), {s.flat_xs().begin(), s.flat_xs().end()},
                                 {s.flat_ys().begin(), s.flat_ys().end()});
}

QuantileTable load_table(const std::string& path, const GammaMeasure& gamma) {
  if (!path.empty()) {
    auto t = read_quantile_table(path);
    if (!(t.gamma == gamma)) throw InputError("quantile table was built for a different gamma measure");
    return t;
  }
  if (!(gamma == GammaMeasure::default_measure())) {
    throw InputError("non-default gamma measure requires --table");
  }
  return default_quantile_table();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << text;
  if (!out) throw InputError("failed writing '" + path + "'");
}

struct MetricFlags {
  std::string x = "auto";
  std::string y = "auto";
  void add(CLI::App* app) {
    app->add_option("--x-metric", x, "auto (file: #weights or euclidean), euclidean, trapezoid")
        ->check(CLI::IsMember({"auto", "euclidean", "trapezoid"}));
    app->add_option("--y-metric", y, "auto, euclidean, trapezoid")->check(CLI::IsMember({"auto", "euclidean", "trapezoid"}));
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Self-normalized relevant-hypothesis tests for distance correlation"};
  app.require_subcommand(1);

  // dcor
  auto* dcor_cmd = app.add_subcommand("dcor", "Estimate dcov/dcor and the self-normalizers");
  std::string dcor_data, path_out, dcor_atoms = "default", dcor_weights;
  MetricFlags dcor_metric;
  dcor_cmd->add_option("dataset", dcor_data, "CSV dataset")->required();
  dcor_cmd->add_option("--path-out", path_out, "Write prefix trajectories to this file");
  dcor_cmd->add_option("--gamma-atoms", dcor_atoms, "'default' or comma list in (0,1]");
  dcor_cmd->add_option("--gamma-weights", dcor_weights, "Comma list; uniform if omitted");
  dcor_metric.add(dcor_cmd);

  // test
  auto* test_cmd = app.add_subcommand("test", "Relevant or equivalence test for dcor/dcov");
  std::string test_data, table_path, report_out, test_atoms = "default", test_weights;
  std::string measure = "dcor", direction = "relevant", format = "text";
  double delta = 0.0, alpha = 0.05;
  MetricFlags test_metric;
  test_cmd->add_option("dataset", test_data, "CSV dataset")->required();
  test_cmd->add_option("--delta", delta, "Threshold delta >= 0")->required();
  test_cmd->add_option("--alpha", alpha, "Level in (0,1)");
  test_cmd->add_option("--measure", measure)->check(CLI::IsMember({"dcor", "dcov"}));
  test_cmd->add_option("--direction", direction)->check(CLI::IsMember({"relevant", "equivalence"}));
  test_cmd->add_option("--table", table_path, "Quantile table file (default: bundled table)");
  test_cmd->add_option("--gamma-atoms", test_atoms, "'default' or comma list in (0,1]");
  test_cmd->add_option("--gamma-weights", test_weights);
  test_cmd->add_option("--format", format, "stdout format")->check(CLI::IsMember({"text", "json"}));
  test_cmd->add_option("--report-out", report_out, "Also write the JSON report to this file");
  test_metric.add(test_cmd);

  // quantiles
  auto* q_cmd = app.add_subcommand("quantiles", "Simulate quantiles of the pivotal limit W");
  std::uint64_t runs = kDefaultTableRuns, seed = kDefaultTableSeed;
  std::string q_atoms = "default", q_weights, q_out, q_probs;
  unsigned q_threads = 1;
  q_cmd->add_option("--runs", runs, "Monte-Carlo runs (>= 10000)");
  q_cmd->add_option("--seed", seed);
  q_cmd->add_option("--gamma-atoms", q_atoms, "'default' or comma list in (0,1]");
  q_cmd->add_option("--gamma-weights", q_weights);
  q_cmd->add_option("--probabilities", q_probs, "Comma list (default covers alpha in {0.01,0.05,0.1})");
  q_cmd->add_option("--out", q_out, "Output table file");
  q_cmd->add_option("--threads", q_threads);

  // simulate
  auto* sim_cmd = app.add_subcommand("simulate", "Rejection-rate experiments");
  std::string model, a_spec = "default", cov = "full", repr = "coefficients", delta_grid, n_grid = "400";
  std::string sim_direction = "relevant", sim_measure = "dcor", sim_table, sim_out, sim_atoms = "default";
  double rho = 0.5, sim_alpha = 0.05;
  std::size_t reps = 1000, grid_points = 256, pop_reps = kPopulationReps, pop_n = kPopulationN, burn_in = 0;
  std::uint64_t sim_seed = 1;
  unsigned sim_threads = 1;
  sim_cmd->add_option("--model", model)->required();
  sim_cmd->add_option("--rho", rho, "Innovation correlation");
  sim_cmd->add_option("--a", a_spec, "VAR matrix: default, zero, or a11,a12,a21,a22");
  sim_cmd->add_option("--burn-in", burn_in, "VAR: start at 0 and discard this many steps (0 = stationary start)");
  sim_cmd->add_option("--cov", cov)->check(CLI::IsMember({"sparse", "full"}));
  sim_cmd->add_option("--repr", repr)->check(CLI::IsMember({"coefficients", "grid"}));
  sim_cmd->add_option("--grid-points", grid_points);
  sim_cmd->add_option("--delta-grid", delta_grid, "Comma list of thresholds; 'pop' means the population dcor")->required();
  sim_cmd->add_option("--n-grid", n_grid, "Comma list of sample sizes");
  sim_cmd->add_option("--reps", reps);
  sim_cmd->add_option("--seed", sim_seed);
  sim_cmd->add_option("--alpha", sim_alpha);
  sim_cmd->add_option("--direction", sim_direction)->check(CLI::IsMember({"relevant", "equivalence"}));
  sim_cmd->add_option("--measure", sim_measure)->check(CLI::IsMember({"dcor", "dcov"}));
  sim_cmd->add_option("--pop-reps", pop_reps);
  sim_cmd->add_option("--pop-n", pop_n);
  sim_cmd->add_option("--table", sim_table);
  sim_cmd->add_option("--gamma-atoms", sim_atoms);
  sim_cmd->add_option("--out", sim_out, "Output file (default stdout)");
  sim_cmd->add_option("--threads", sim_threads);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*dcor_cmd) {
      const auto sample = load_sample(dcor_data, dcor_metric.x, dcor_metric.y);
      const auto gamma = parse_gamma(dcor_atoms, dcor_weights);
      const auto path = prefix_processes(sample);
      const auto n = sample.size();
      std::cout << "n          " << n << "\n"
                << "dcov_xy    " << detail::fmt17(path.dcov_at(n)) << "\n"
                << "dcov_xx    " << detail::fmt17(path.dcov_xx[n - 1]) << "\n"
                << "dcov_yy    " << detail::fmt17(path.dcov_yy[n - 1]) << "\n"
                << "dcor       " << detail::fmt17(path.dcor_at(n)) << "\n"
                << "V_dcor     " << detail::fmt17(normalizer_dcor(path, gamma)) << "\n"
                << "V_dcov     " << detail::fmt17(normalizer_dcov(path, gamma)) << "\n";
      if (!gamma_resolves(gamma, n)) std::cerr << "warning: smallest gamma atom is below 1/n\n";
      if (!path_out.empty()) {
        std::ostringstream os;
        write_path(os, path);
        write_file(path_out, os.str());
      }
      return 0;
    }

    if (*test_cmd) {
      const auto sample = load_sample(test_data, test_metric.x, test_metric.y);
      const auto gamma = parse_gamma(test_atoms, test_weights);
      const auto table = load_table(table_path, gamma);
      const auto report = run_test(sample, delta, alpha, table, measure == "dcor" ? Measure::dcor : Measure::dcov,
                                   direction == "relevant" ? Direction::relevant : Direction::equivalence);
      const auto json = to_json(report).dump(2) + "\n";
      std::cout << (format == "json" ? json : render_text(report));
      if (!report_out.empty()) write_file(report_out, json);
      return report.decision == Decision::reject ? kExitReject : kExitRetain;
    }

    if (*q_cmd) {
      const auto gamma = parse_gamma(q_atoms, q_weights);
      const auto probs = q_probs.empty() ? default_probabilities() : parse_doubles(q_probs, "--probabilities");
      if (!q_out.empty()) {
        // Fail before the simulation rather than after it.
        std::ofstream probe(q_out, std::ios::app);
        if (!probe) throw InputError("cannot write '" + q_out + "'");
      }
      const auto table = quantile_table(gamma, runs, probs, seed, q_threads);
      if (!q_out.empty()) write_file(q_out, serialize(table));
      std::cout << "runs " << table.runs << ", seed " << table.seed << ", excluded " << table.excluded << "\n";
      std::cout << "p\tw_p\tse_p\n";
      for (double p : {0.90, 0.95, 0.99}) {
        if (const auto* e = table.find(p)) {
          std::printf("%.2f\t%.4f\t%.4f\n", e->p, e->w, e->se);
        }
      }
      return 0;
    }

    if (*sim_cmd) {
      Generator gen;
      std::string cov_kind = "na";
      if (model == "var") {
        VarConfig c;
        c.rho = rho;
        if (a_spec == "zero") {
          c.a_matrix.setZero();
        } else if (a_spec != "default") {
          const auto v = parse_doubles(a_spec, "--a");
          if (v.size() != 4) throw InputError("--a needs 4 entries a11,a12,a21,a22");
          c.a_matrix << v[0], v[1], v[2], v[3];
        }
        if (burn_in > 0) {
          c.init = VarInit::burn_in;
          c.burn_in = burn_in;
        }
        gen = var_generator(c);
      } else if (model == "fourier") {
        FourierConfig c;
        c.rho = rho;
        c.cov_kind = cov == "sparse" ? CovKind::sparse : CovKind::full;
        c.representation = repr == "grid" ? Representation::grid : Representation::coefficients;
        c.grid_points = grid_points;
        cov_kind = cov;
        gen = fourier_generator(c);
      } else {
        std::cerr << "unknown model '" << model << "' (expected var or fourier)\n" << app.help();
        return kExitInput;
      }
      const auto gamma = parse_gamma(sim_atoms, "");
      const auto table = load_table(sim_table, gamma);
      std::vector<std::size_t> ns;
      for (double v : parse_doubles(n_grid, "--n-grid")) {
        if (!(v >= 2.0) || v != static_cast<double>(static_cast<std::size_t>(v))) throw InputError("--n-grid needs integers >= 2");
        ns.push_back(static_cast<std::size_t>(v));
      }
      const auto pop = estimate_population_dcor(gen, pop_reps, pop_n, derive_seed(sim_seed, 0x706f70ULL), sim_threads);
      std::vector<double> deltas;
      {
        std::stringstream ss(delta_grid);
        std::string item;
        while (std::getline(ss, item, ',')) {
          item = detail::trim(item);
          deltas.push_back(item == "pop" ? pop.mean : detail::parse_double(item, "--delta-grid"));
        }
        if (deltas.empty()) throw InputError("--delta-grid is empty");
      }
      const TestKind kind{sim_direction == "relevant" ? Direction::relevant : Direction::equivalence,
                          sim_measure == "dcor" ? Measure::dcor : Measure::dcov};
      std::ostringstream os;
      write_experiment_header(os);
      for (std::size_t n : ns) {
        const auto rates = rejection_rates(gen, kind, deltas, sim_alpha, n, reps, table, derive_seed(sim_seed, n), sim_threads);
        for (const auto& r : rates) {
          write_experiment_row(os, {r.delta, n, rho, cov_kind, pop.mean, r.rate(), r.se(), reps, sim_seed});
        }
      }
      if (sim_out.empty()) {
        std::cout << os.str();
      } else {
        write_file(sim_out, os.str());
      }
      return 0;
    }
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return 0;
}
