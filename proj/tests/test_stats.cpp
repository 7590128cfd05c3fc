#include <doctest.h>

#include <cmath>
#include <random>

#include "core/error.hpp"
#include "core/stats.hpp"

using namespace relsim;

TEST_CASE("chi-squared quantiles match reference values") {
  CHECK(chi_squared_quantile(0.95, 2) == doctest::Approx(5.991464547107979));
  CHECK(chi_squared_quantile(0.05, 26) == doctest::Approx(15.379156583261723));
  CHECK(chi_squared_quantile(0.95, 28) == doctest::Approx(41.33713815142739));
  CHECK_THROWS_AS((void)chi_squared_quantile(1.5, 2), Error);
  CHECK_THROWS_AS((void)chi_squared_quantile(0.5, 0), Error);
}

TEST_CASE("exact Poisson interval on zero failures") {
  RateInterval iv = garwood_interval(0, 100.0);
  CHECK(iv.lower == doctest::Approx(0.0));
  CHECK(iv.upper == doctest::Approx(0.029957322735539894).epsilon(1e-9));
  // 0 failures in 500 node-days caps the rate near 5.99 per 1000.
  CHECK(garwood_interval(0, 500.0).upper * 1000.0 ==
        doctest::Approx(5.991464547107979).epsilon(1e-9));
}

TEST_CASE("exact Poisson interval on 13 failures in 2000 node-days") {
  RateInterval iv = garwood_interval(13, 2000.0);
  CHECK(iv.lower == doctest::Approx(0.003844789145815431).epsilon(1e-9));
  CHECK(iv.upper == doctest::Approx(0.010334284537856847).epsilon(1e-9));
}

TEST_CASE("interval rejects bad inputs") {
  CHECK_THROWS_AS((void)garwood_interval(-1, 100.0), Error);
  CHECK_THROWS_AS((void)garwood_interval(3, 0.0), Error);
  CHECK_THROWS_AS((void)garwood_interval(3, 100.0, 1.0), Error);
}

TEST_CASE("interval widens as confidence grows and narrows with exposure") {
  RateInterval c90 = garwood_interval(10, 100.0, 0.90);
  RateInterval c99 = garwood_interval(10, 100.0, 0.99);
  CHECK(c99.lower < c90.lower);
  CHECK(c99.upper > c90.upper);
  RateInterval wide = garwood_interval(10, 100.0);
  RateInterval tight = garwood_interval(100, 1000.0);
  CHECK((tight.upper - tight.lower) < (wide.upper - wide.lower));
}

TEST_CASE("90% interval covers the true rate about 90% of the time") {
  // Poisson datasets at a known rate; exact intervals should cover the
  // truth within sampling noise of the nominal level.
  std::mt19937_64 rng(20260816u);
  const double rate = 0.004;       // per node-day
  const double exposure = 2500.0;  // node-days per dataset, mean 10 events
  std::poisson_distribution<long long> pois(rate * exposure);
  int covered = 0;
  const int datasets = 800;
  for (int i = 0; i < datasets; ++i) {
    long long k = pois(rng);
    RateInterval iv = garwood_interval(k, exposure);
    if (iv.lower <= rate && rate <= iv.upper) ++covered;
  }
  double coverage = static_cast<double>(covered) / datasets;
  CHECK(coverage >= 0.85);
  CHECK(coverage <= 0.98);  // exact intervals over-cover discrete data
}

TEST_CASE("running stats reproduce direct mean and stderr") {
  RunningStats rs;
  double xs[] = {2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0};
  double sum = 0.0;
  for (double x : xs) {
    rs.add(x);
    sum += x;
  }
  double mean = sum / 8.0;
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  double var = ss / 7.0;
  CHECK(rs.n == 8);
  CHECK(rs.mean == doctest::Approx(mean));
  CHECK(rs.variance() == doctest::Approx(var));
  CHECK(rs.stderr_of_mean() == doctest::Approx(std::sqrt(var / 8.0)));
}
