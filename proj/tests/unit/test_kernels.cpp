#include <doctest.h>

#include <cmath>
#include <numbers>

#include "bbmlab/kernels.hpp"
#include "bbmlab/quadrature.hpp"
#include "bbmlab/stats.hpp"

using namespace bbmlab;

TEST_CASE("offspring law constants") {
  const auto binary = OffspringLaw::binary();
  CHECK(binary.mean() == 2.0);
  CHECK(binary.rate() == 0.5);
  CHECK(binary.pair_constant() == 1.0);
  CHECK(binary.deterministic() == 2);

  const auto mixed = OffspringLaw::from_map({{1, 0.5}, {3, 0.5}});
  CHECK(mixed.mean() == doctest::Approx(2.0));
  CHECK(mixed.rate() == doctest::Approx(0.5));
  // lambda E[L(L-1)] = 0.5 * (0.5 * 6) = 1.5
  CHECK(mixed.pair_constant() == doctest::Approx(1.5));
  CHECK_THROWS(OffspringLaw::from_map({{1, 1.0}}));
}

TEST_CASE("offspring draws follow the pmf") {
  const auto law = OffspringLaw::from_map({{0, 0.2}, {3, 0.8}});
  RngStream s(5, 5);
  int zeros = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const int k = offspring_count(s, law);
    REQUIRE((k == 0 || k == 3));
    zeros += k == 0;
  }
  CHECK(std::abs(zeros / double(n) - 0.2) < 4 * std::sqrt(0.16 / n));
}

TEST_CASE("bridge crossing probability closed form") {
  CHECK(bridge_crossing_probability(1.0, 2.0, 0.5, 0.0) == doctest::Approx(std::exp(-2.0 * 1.0 * 2.0 / 0.5)));
  CHECK(bridge_crossing_probability(-0.1, 2.0, 0.5, 0.0) == 1.0);
  CHECK(bridge_crossing_probability(1.0, 1.0, 1.0, 0.0, 2.0) == doctest::Approx(std::exp(-2.0 / 4.0)));
}

TEST_CASE("bridge_min_hits frequency matches the crossing probability") {
  RngStream s(11, 2);
  const double p = bridge_crossing_probability(0.5, 0.7, 0.3, 0.0);
  int hits = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const auto h = bridge_min_hits(s, 0.5, 0.7, 0.3, 0.0, true);
    if (h.hit) {
      ++hits;
      REQUIRE(h.fraction > 0.0);
      REQUIRE(h.fraction < 1.0);
    }
  }
  CHECK(std::abs(hits / double(n) - p) < 4 * std::sqrt(p * (1 - p) / n));
}

TEST_CASE("frozen density values") {
  CHECK(killed_bm_density(1.0, 1.0, 1.0) == doctest::Approx(0.344951313888245).epsilon(1e-13));
  CHECK(bessel3_density(0.0, 1.0, 1.0) == doctest::Approx(0.483941449038287).epsilon(1e-13));
  CHECK(normal_cdf(0.0) == 0.5);
  CHECK(normal_pdf(0.0) == doctest::Approx(1.0 / std::sqrt(2.0 * std::numbers::pi)));
}

TEST_CASE("Bessel-3 density integrates to one and matches its cdf") {
  for (double x : {0.0, 0.3, 2.0}) {
    for (double t : {0.25, 1.0, 4.0}) {
      const auto mass = integrate_to_infinity([&](double z) { return bessel3_density(x, t, z); }, 0.0);
      CHECK(mass.value == doctest::Approx(1.0).epsilon(1e-10));
      const auto part = integrate([&](double z) { return bessel3_density(x, t, z); }, 0.0, 1.3);
      CHECK(bessel3_cdf(x, t, 1.3) == doctest::Approx(part.value).epsilon(1e-10));
    }
  }
}

TEST_CASE("Bessel-3 second moment") {
  // E_x[R_t^2] = x^2 + 3t
  RngStream s(8, 8);
  std::vector<double> sq;
  for (int i = 0; i < 100000; ++i) {
    const double r = bessel3_sample(s, 1.0, 2.0);
    sq.push_back(r * r);
  }
  const auto m = mean_se(sq);
  CHECK(std::abs(m.mean - 7.0) < 4 * m.standard_error);
}
