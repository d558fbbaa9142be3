#pragma once

// Quantile table for the default 19-atom gamma measure, generated by
// `reldcor quantiles --runs 1000000 --seed 20240607` and embedded so that
// `reldcor test` works without a table file. data/default_quantiles.tsv is
// the same text.

#include <string_view>

#include "reldcor/pivotal.hpp"

namespace reldcor {

inline constexpr std::uint64_t kDefaultTableSeed = 20240607;
inline constexpr std::uint64_t kDefaultTableRuns = 1000000;

inline constexpr std::string_view kDefaultQuantileTableText = R"TABLE(format	reldcor-quantile-table
version	1
gamma_support	0.050000000000000003,0.10000000000000001,0.14999999999999999,0.20000000000000001,0.25,0.29999999999999999,0.34999999999999998,0.40000000000000002,0.45000000000000001,0.5,0.55000000000000004,0.59999999999999998,0.65000000000000002,0.69999999999999996,0.75,0.80000000000000004,0.84999999999999998,0.90000000000000002,0.94999999999999996
gamma_weights	0.052631578947368418,0.052631578947368418,0.052631578947368418,0.052631578947368418,0.052631578947368418,0.052631578947368418,0.052631578947368418,0.052631578947368418,0.052631578947368418,0.052631578947368418,0.052631578947368418,0.052631578947368418,0.052631578947368418,0.052631578947368418,0.052631578947368418,0.052631578947368418,0.052631578947368418,0.052631578947368418,0.052631578947368418
runs	1000000
seed	20240607
excluded	0
0.0050000000000000001	-19.288313575932047	0.056099626800416955
0.01	-16.418508776271686	0.038393037604062256
0.025000000000000001	-12.660597961928342	0.023434524839872926
0.050000000000000003	-9.880491614912895	0.017745176216362547
0.10000000000000001	-7.1217305669338229	0.011769097759318852
0.90000000000000002	7.1260357648097434	0.01249341130917604
0.94999999999999996	9.9016960106630716	0.01710786195698008
0.97499999999999998	12.68972204018405	0.025041245432688538
0.98999999999999999	16.405736365382591	0.041866820168222824
0.995	19.304279492587753	0.056332158144405585
)TABLE";

inline const QuantileTable& default_quantile_table() {
  static const QuantileTable table = parse_quantile_table(std::string(kDefaultQuantileTableText));
  return table;
}

}  // namespace reldcor
