#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "reldcor/dcov.hpp"
#include "reldcor/sequential.hpp"

using namespace reldcor;

namespace {

PairedSample random_sample(std::mt19937_64& rng, std::size_t n, std::size_t dx = 1) {
  std::normal_distribution<double> z;
  std::vector<double> xs(n * dx), ys(n);
  for (auto& v : xs) v = z(rng);
  for (std::size_t i = 0; i < n; ++i) ys[i] = std::sin(2.0 * xs[i * dx]) + 0.5 * z(rng);
  return PairedSample::from_flat(MetricDescriptor::euclidean(dx), MetricDescriptor::euclidean(1), xs, ys);
}

SequentialPath constant_path(std::size_t n, double dcov, double dcor) {
  SequentialPath p;
  p.n = n;
  p.dcov_xy.assign(n, dcov);
  p.dcov_xx.assign(n, 1.0);
  p.dcov_yy.assign(n, 1.0);
  p.dcor.assign(n, dcor);
  return p;
}

}  // namespace

TEST_CASE("gamma measure validation", "[sequential]") {
  const auto g = GammaMeasure::default_measure();
  REQUIRE(g.size() == 19);
  CHECK(g.support().front() == 0.05);
  CHECK(g.support().back() == 0.95);
  CHECK_THROWS_AS(GammaMeasure({0.0, 0.5}, {0.5, 0.5}), InputError);
  CHECK_THROWS_AS(GammaMeasure({0.5, 1.5}, {0.5, 0.5}), InputError);
  CHECK_THROWS_AS(GammaMeasure({0.5, 0.4}, {0.5, 0.5}), InputError);
  CHECK_THROWS_AS(GammaMeasure({0.5, 0.6}, {0.5, 0.4}), InputError);
  CHECK_THROWS_AS(GammaMeasure({}, {}), InputError);
  CHECK_NOTHROW(GammaMeasure({1.0}, {1.0}));
}

TEST_CASE("prefix_length floors decimal atoms correctly", "[sequential]") {
  const auto g = GammaMeasure::default_measure();
  for (std::size_t n : {20u, 40u, 400u, 1000u}) {
    for (std::size_t j = 0; j < g.size(); ++j) REQUIRE(prefix_length(n, g.support()[j]) == n * (j + 1) / 20);
  }
  CHECK(prefix_length(10, 0.05) == 0);
  CHECK(prefix_length(37, 0.5) == 18);
  CHECK_FALSE(gamma_resolves(g, 19));
  CHECK(gamma_resolves(g, 20));
}

TEST_CASE("prefix_processes examples", "[sequential]") {
  const auto one = prefix_processes(scalar_sample({1.0}, {2.0}));
  CHECK(one.dcov_xy == std::vector<double>{0.0});
  CHECK(one.dcor == std::vector<double>{0.0});

  const auto three = prefix_processes(scalar_sample({0, 1, 2}, {0, 1, 2}));
  CHECK(three.dcor == std::vector<double>{0.0, 1.0, 1.0});
  CHECK(three.dcov_xx[2] == Catch::Approx(40.0 / 81.0).epsilon(1e-14));
  CHECK(three.dcov_xy[1] == Catch::Approx(0.25).epsilon(1e-14));

  std::mt19937_64 rng(20);
  const auto s = random_sample(rng, 20);
  const auto p = prefix_processes(s);
  CHECK(std::fabs(p.dcov_xy.back() - dcov_empirical(s)) <= 1e-10);
  CHECK(std::fabs(p.dcor.back() - dcor_empirical(s)) <= 1e-10);
}

TEST_CASE("streaming path equals batch recomputation on every prefix", "[sequential][property]") {
  std::mt19937_64 rng(77);
  for (int t = 0; t < 20; ++t) {
    const std::size_t n = 5 + static_cast<std::size_t>(rng() % 46);
    const auto s = random_sample(rng, n, 1 + static_cast<std::size_t>(t % 3));
    const auto p = prefix_processes(s);
    REQUIRE(p.n == n);
    for (std::size_t m = 1; m <= n; ++m) {
      const auto batch = dcov_all(s.prefix(m));
      REQUIRE(std::fabs(p.dcov_xy[m - 1] - batch.xy) <= 1e-10);
      REQUIRE(std::fabs(p.dcov_xx[m - 1] - batch.xx) <= 1e-10);
      REQUIRE(std::fabs(p.dcov_yy[m - 1] - batch.yy) <= 1e-10);
      REQUIRE(std::fabs(p.dcor[m - 1] - batch.dcor()) <= 1e-10);
      REQUIRE(p.dcor[m - 1] >= 0.0);
      REQUIRE(p.dcor[m - 1] <= 1.0 + 1e-12);
      REQUIRE(p.dcov_xx[m - 1] >= -1e-12);
    }
  }
}

TEST_CASE("normalizer_dcov examples", "[sequential]") {
  const auto g = GammaMeasure::default_measure();
  CHECK(normalizer_dcov(constant_path(40, 0.37, 0.5), g) == 0.0);
  CHECK(normalizer_dcov(constant_path(17, 0.37, 0.5), GammaMeasure({1.0}, {1.0})) == 0.0);

  // dcov_m = m/20 at n = 20; reference value from exact rational summation of
  // (1/19) sum_j (l^3 - l^2)^2 with l = j/20.
  SequentialPath p = constant_path(20, 0.0, 0.0);
  for (std::size_t m = 1; m <= 20; ++m) p.dcov_xy[m - 1] = static_cast<double>(m) / 20.0;
  CHECK(normalizer_dcov(p, g) == Catch::Approx(0.10012414169419881).epsilon(1e-14));
}

TEST_CASE("normalizer_dcor examples", "[sequential]") {
  const auto g = GammaMeasure::default_measure();
  CHECK(normalizer_dcor(constant_path(40, 0.1, 0.63), g) == 0.0);
  CHECK(normalizer_dcor(constant_path(60, 0.1, 0.63), g) == 0.0);
  CHECK(normalizer_dcor(constant_path(23, 0.1, 0.63), GammaMeasure({1.0}, {1.0})) == 0.0);
  // Constant dcor = 1 at n = 40: every factor 40 l^2 / floor(40 l) equals l.
  CHECK(normalizer_dcor(constant_path(40, 0.0, 1.0), g) == 0.0);

  // Frozen from exact rational summation of the 19 atoms: n = 37, and n = 10
  // where the first atom selects an empty prefix.
  CHECK(normalizer_dcor(constant_path(37, 0.0, 1.0), g) == Catch::Approx(0.0182519534793224).epsilon(1e-13));
  CHECK(normalizer_dcor(constant_path(10, 0.0, 1.0), g) == Catch::Approx(0.04169739072165934).epsilon(1e-13));
}

TEST_CASE("normalizer direct-summation oracle on random paths", "[sequential][oracle]") {
  std::mt19937_64 rng(8);
  const auto g = GammaMeasure::default_measure();
  for (int t = 0; t < 10; ++t) {
    const auto s = random_sample(rng, 60 + static_cast<std::size_t>(t) * 7);
    const auto p = prefix_processes(s);
    const std::size_t n = p.n;
    long double acc_dcov = 0.0L, acc_dcor = 0.0L;
    for (int j = 1; j <= 19; ++j) {
      const long double l = j / 20.0L;
      const auto m = static_cast<std::size_t>(std::floor(static_cast<long double>(n) * j / 20.0L));
      const long double dc = m ? p.dcov_xy[m - 1] : 0.0L;
      const long double dr = m ? p.dcor[m - 1] : 0.0L;
      const long double a = l * static_cast<long double>(m) / n * dc - l * l * p.dcov_xy[n - 1];
      const long double b = (m ? n * l * l / m : 0.0L) * dr - l * p.dcor[n - 1];
      acc_dcov += a * a / 19.0L;
      acc_dcor += b * b / 19.0L;
    }
    REQUIRE(normalizer_dcov(p, g) == Catch::Approx(static_cast<double>(std::sqrt(acc_dcov))).epsilon(1e-12));
    REQUIRE(normalizer_dcor(p, g) == Catch::Approx(static_cast<double>(std::sqrt(acc_dcor))).epsilon(1e-12));
  }
}

TEST_CASE("normalizers under metric rescaling", "[sequential][property]") {
  std::mt19937_64 rng(13);
  const auto g = GammaMeasure::default_measure();
  const auto s = random_sample(rng, 80);
  const double c = 3.0;
  const auto scaled = PairedSample::from_flat(MetricDescriptor::weighted({c * c}), s.y_metric(),
                                              {s.flat_xs().begin(), s.flat_xs().end()},
                                              {s.flat_ys().begin(), s.flat_ys().end()});
  const auto p = prefix_processes(s);
  const auto q = prefix_processes(scaled);
  CHECK(normalizer_dcor(q, g) == Catch::Approx(normalizer_dcor(p, g)).epsilon(1e-10));
  CHECK(normalizer_dcov(q, g) == Catch::Approx(c * normalizer_dcov(p, g)).epsilon(1e-10));
  CHECK(normalizer_dcov(p, g) >= 0.0);
}

TEST_CASE("prefix path for n = 5000 stays finite and in range", "[sequential][perf]") {
  std::mt19937_64 rng(1);
  const auto s = random_sample(rng, 5000);
  const auto p = prefix_processes(s);
  for (double v : p.dcor) REQUIRE((v >= 0.0 && v <= 1.0));
  CHECK(std::fabs(p.dcov_xy.back() - dcov_empirical(s)) <= 1e-10);
}
