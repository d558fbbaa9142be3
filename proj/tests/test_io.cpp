#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <sstream>
#include <string>

#include "reldcor/default_table.hpp"
#include "reldcor/io.hpp"

using namespace reldcor;

namespace {

Dataset parse(const std::string& text) {
  std::istringstream in(text);
  return parse_dataset(in);
}

std::string error_of(const std::string& text) {
  try {
    parse(text);
  } catch (const InputError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("dataset parsing", "[io]") {
  const auto d = parse("# comment\nx1,x2,y1\n1,2,3\n\n4, 5 ,6\n");
  CHECK(d.x_columns == std::vector<std::string>{"x1", "x2"});
  CHECK(d.y_columns == std::vector<std::string>{"y1"});
  CHECK(d.sample.size() == 2);
  CHECK(d.sample.x(1)[1] == 5.0);
  CHECK(d.sample.y(0)[0] == 3.0);
  CHECK(d.sample.x_metric() == MetricDescriptor::euclidean(2));
  CHECK_FALSE(d.x_weights);

  const auto mixed = parse("y,x\n1,2\n3,4\n");
  CHECK(mixed.sample.x(0)[0] == 2.0);
  CHECK(mixed.sample.y(1)[0] == 3.0);
}

TEST_CASE("weights line selects the weighted metric", "[io]") {
  const auto d = parse("#weights: 0.5,0.5,2\nx1,x2,y1\n0,0,0\n1,1,1\n");
  REQUIRE(d.x_weights);
  CHECK(*d.x_weights == std::vector<double>{0.5, 0.5});
  CHECK(d.sample.dx(0, 1) == Catch::Approx(1.0));
  CHECK(d.sample.dy(0, 1) == Catch::Approx(std::sqrt(2.0)));
  CHECK(error_of("#weights: 1,1\nx1,x2,y1\n0,0,0\n").find("line 1") != std::string::npos);
}

TEST_CASE("parse errors carry line numbers", "[io]") {
  CHECK(error_of("x,y\n1,2\n3,abc\n").find("line 3") != std::string::npos);
  CHECK(error_of("x,y\n1,2\n3\n").find("line 3") != std::string::npos);
  CHECK(error_of("x,y\n1,nan\n").find("line 2") != std::string::npos);
  CHECK(error_of("x,y\n1,\n").find("line 2") != std::string::npos);
  CHECK(error_of("x,z\n1,2\n").find("line 1") != std::string::npos);
  CHECK(error_of("x1,x2\n1,2\n").find("line 1") != std::string::npos);
  CHECK_FALSE(error_of("x,y\n").empty());
  CHECK_FALSE(error_of("").empty());
  CHECK_THROWS_AS(read_dataset("/nonexistent/file.csv"), InputError);
}

TEST_CASE("write then read round-trips", "[io]") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> z;
  std::vector<double> xs(30 * 3), ys(30 * 2);
  for (auto& v : xs) v = z(rng) * 1e3;
  for (auto& v : ys) v = z(rng) * 1e-4;
  for (const auto& xm : {MetricDescriptor::euclidean(3), MetricDescriptor::weighted({0.25, 1.5, 3.0})}) {
    const auto s = PairedSample::from_flat(xm, MetricDescriptor::euclidean(2), xs, ys);
    std::ostringstream os;
    write_dataset(os, s);
    const auto back = parse(os.str()).sample;
    REQUIRE(back.size() == s.size());
    for (std::size_t i = 0; i < xs.size(); ++i) REQUIRE(std::fabs(back.flat_xs()[i] - xs[i]) <= 1e-12 * std::fabs(xs[i]));
    for (std::size_t i = 0; i < ys.size(); ++i) REQUIRE(std::fabs(back.flat_ys()[i] - ys[i]) <= 1e-12 * std::fabs(ys[i]));
    CHECK(back.x_metric().dimension() == 3);
    CHECK(dcor_empirical(back) == Catch::Approx(dcor_empirical(s)).epsilon(1e-12));
  }
}

TEST_CASE("path output", "[io]") {
  std::ostringstream os;
  write_path(os, prefix_processes(scalar_sample({0, 1}, {0, 2})));
  CHECK(os.str() == "m,dcov_xy,dcov_xx,dcov_yy,dcor\n1,0,0,0,0\n2,0.5,0.25,1,1\n");
}

TEST_CASE("json report", "[io]") {
  QuantileTable t;
  t.entries = {{0.025, -12.5, 0.0}, {0.05, -9.89, 0.0}, {0.95, 9.89, 0.0}, {0.975, 12.5, 0.0}};
  const auto r = decide({100, 0.30, 0.01}, 0.10, 0.05, t, Measure::dcor, Direction::relevant);
  const auto j = to_json(r);
  for (const char* key : {"schema", "schema_version", "n", "measure", "direction", "delta", "alpha", "estimate",
                          "normalizer", "statistic", "quantile_used", "decision", "delta_hat", "delta_hat_sim", "ci",
                          "ci_clamped", "quantile_table_id", "degenerate", "warnings"}) {
    INFO(key);
    CHECK(j.contains(key));
  }
  CHECK(j["schema_version"] == kReportSchemaVersion);
  CHECK(j["decision"] == "reject");
  CHECK(j["statistic"].get<double>() == Catch::Approx(20.0));
  CHECK(j["ci"].size() == 2);
  CHECK(nlohmann::json::parse(j.dump()) == j);

  const auto inf = decide({40, 1.0, 0.0}, 0.5, 0.05, t, Measure::dcor, Direction::relevant);
  CHECK(to_json(inf)["statistic"] == "+inf");
  CHECK(to_json(inf)["degenerate"] == true);
}

TEST_CASE("text report", "[io]") {
  const auto r = relevant_test(scalar_sample({0, 1, 2, 3, 4, 5}, {0, 1, 4, 9, 16, 25}), 0.2, 0.05,
                               default_quantile_table());
  const auto text = render_text(r);
  CHECK(text.find("Relevant-hypothesis test for dcor") != std::string::npos);
  CHECK(text.find("decision") != std::string::npos);
  CHECK(text.find("warning:") != std::string::npos);
  CHECK(text.find(r.quantile_table_id) != std::string::npos);
}
