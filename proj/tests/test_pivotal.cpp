#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "reldcor/default_table.hpp"
#include "reldcor/pivotal.hpp"

using namespace reldcor;

TEST_CASE("grid times are gamma support plus endpoints", "[pivotal]") {
  const auto t = grid_times(GammaMeasure::default_measure());
  REQUIRE(t.size() == 21);
  CHECK(t.front() == 0.0);
  CHECK(t.back() == 1.0);
  const auto t1 = grid_times(GammaMeasure({0.5, 1.0}, {0.5, 0.5}));
  CHECK(t1 == std::vector<double>{0.0, 0.5, 1.0});
}

TEST_CASE("simulate_brownian_grid basics", "[pivotal]") {
  const std::vector<double> times{0.0, 1.0};
  std::mt19937_64 a(5), b(5);
  const auto p = simulate_brownian_grid(times, a);
  std::normal_distribution<double> z;
  CHECK(p.values[0] == 0.0);
  CHECK(p.values[1] == z(b));
  CHECK_THROWS_AS(simulate_brownian_grid(std::vector<double>{0.0, 0.5, 0.5, 1.0}, a), InputError);
  CHECK_THROWS_AS(simulate_brownian_grid(std::vector<double>{0.1, 1.0}, a), InputError);
}

TEST_CASE("Brownian moments over 1e5 paths", "[pivotal][mc]") {
  const std::vector<double> times{0.0, 0.25, 0.5, 1.0};
  std::mt19937_64 rng(123);
  const int paths = 100000;
  double s1 = 0.0, s11 = 0.0, s_half_one = 0.0;
  for (int i = 0; i < paths; ++i) {
    const auto p = simulate_brownian_grid(times, rng);
    s1 += p.values[3];
    s11 += p.values[3] * p.values[3];
    s_half_one += p.values[2] * p.values[3];
  }
  const double mean = s1 / paths;
  CHECK(std::fabs(s11 / paths - mean * mean - 1.0) <= 0.02);
  CHECK(std::fabs(s_half_one / paths - 0.5) <= 0.02);
}

TEST_CASE("evaluate_W on injected paths", "[pivotal]") {
  const auto g = GammaMeasure::default_measure();
  const auto times = grid_times(g);

  SECTION("linear path is degenerate") {
    BrownianGridPath p{times, {}};
    for (double t : times) p.values.push_back(1.7 * t);
    const auto w = evaluate_W(p, g);
    CHECK(w.degenerate);
    CHECK(std::isinf(w.value));
    CHECK(w.value > 0);
  }
  SECTION("unit denominator") {
    BrownianGridPath p{times, std::vector<double>(times.size(), 0.0)};
    const double b1 = 2.0;
    p.values.back() = b1;
    for (std::size_t k = 1; k + 1 < times.size(); ++k) p.values[k] = 1.0 / times[k] + times[k] * b1;
    const auto w = evaluate_W(p, g);
    CHECK_FALSE(w.degenerate);
    CHECK(w.value == Catch::Approx(2.0).epsilon(1e-12));
  }
  SECTION("odd in the path") {
    std::mt19937_64 rng(4);
    for (int i = 0; i < 100; ++i) {
      auto p = simulate_brownian_grid(times, rng);
      const double w = evaluate_W(p, g).value;
      for (auto& v : p.values) v = -v;
      REQUIRE(evaluate_W(p, g).value == -w);
    }
  }
  SECTION("gamma atom missing from grid") {
    BrownianGridPath p{{0.0, 0.5, 1.0}, {0.0, 0.1, 0.3}};
    CHECK_THROWS_AS(evaluate_W(p, g), InputError);
  }
}

TEST_CASE("type-7 quantiles", "[pivotal]") {
  const std::vector<double> v{1, 2, 3, 4, 5};
  CHECK(quantile_type7(v, 0.0) == 1.0);
  CHECK(quantile_type7(v, 1.0) == 5.0);
  CHECK(quantile_type7(v, 0.5) == 3.0);
  CHECK(quantile_type7(v, 0.1) == Catch::Approx(1.4));
}

TEST_CASE("quantile_table input checks", "[pivotal]") {
  const auto g = GammaMeasure::default_measure();
  CHECK_THROWS_AS(quantile_table(g, 1000, {0.95}, 1), InputError);
  CHECK_THROWS_AS(quantile_table(g, 20000, {1.0}, 1), InputError);
}

TEST_CASE("quantile tables are deterministic, monotone and thread-independent", "[pivotal][property]") {
  const auto g = GammaMeasure::default_measure();
  const auto a = quantile_table(g, 20000, default_probabilities(), 99);
  const auto b = quantile_table(g, 20000, default_probabilities(), 99);
  const auto c = quantile_table(g, 20000, default_probabilities(), 99, 3);
  CHECK(serialize(a) == serialize(b));
  CHECK(serialize(a) == serialize(c));
  for (std::size_t i = 1; i < a.entries.size(); ++i) {
    REQUIRE(a.entries[i].p > a.entries[i - 1].p);
    REQUIRE(a.entries[i].w >= a.entries[i - 1].w);
  }
  const auto d = quantile_table(g, 20000, default_probabilities(), 100);
  CHECK(serialize(a) != serialize(d));
}

TEST_CASE("serialization round-trips bit-exactly", "[pivotal]") {
  const auto t = quantile_table(GammaMeasure({0.25, 0.5, 0.75}, {0.2, 0.3, 0.5}), 10000, {0.1, 0.9}, 5);
  const auto text = serialize(t);
  const auto back = parse_quantile_table(text);
  CHECK(back == t);
  CHECK(serialize(back) == text);
  CHECK(table_id(back) == table_id(t));
}

TEST_CASE("parse errors", "[pivotal]") {
  CHECK_THROWS_AS(parse_quantile_table("runs\t10\n"), InputError);
  CHECK_THROWS_AS(parse_quantile_table("format\tsomething-else\n"), InputError);
  const std::string head = "gamma_support\t1\ngamma_weights\t1\nruns\t10000\nseed\t1\n";
  CHECK_NOTHROW(parse_quantile_table(head + "0.5\t0\t0\n"));
  CHECK_THROWS_AS(parse_quantile_table(head + "0.5\t0\t0\n0.4\t0\t0\n"), InputError);
  CHECK_THROWS_AS(parse_quantile_table(head + "0.5\tabc\t0\n"), InputError);
  CHECK_THROWS_AS(parse_quantile_table(head + "1.5\t0\t0\n"), InputError);
}

TEST_CASE("bundled default table", "[pivotal]") {
  const auto& t = default_quantile_table();
  CHECK(t.gamma == GammaMeasure::default_measure());
  CHECK(t.runs == kDefaultTableRuns);
  CHECK(t.seed == kDefaultTableSeed);
  CHECK(std::fabs(t.quantile(0.90) - 7.13) <= 0.10);
  CHECK(std::fabs(t.quantile(0.95) - 9.89) <= 0.15);
  CHECK(std::fabs(t.quantile(0.99) - 16.40) <= 0.50);
  for (double p : {0.9, 0.95, 0.99}) {
    const auto* hi = t.find(p);
    const auto* lo = t.find(1.0 - p);
    REQUIRE(hi);
    REQUIRE(lo);
    CHECK(std::fabs(hi->w + lo->w) <= 3.0 * std::hypot(hi->se, lo->se));
  }
  CHECK_THROWS_AS(t.quantile(0.5), InputError);
}

TEST_CASE("bundled default table regenerates from its seed", "[pivotal][slow]") {
  const auto t = quantile_table(GammaMeasure::default_measure(), kDefaultTableRuns, default_probabilities(),
                                kDefaultTableSeed);
  CHECK(serialize(t) == std::string(kDefaultQuantileTableText));
}
