#include <doctest.h>

#include <cmath>
#include <numbers>

#include "bbmlab/error.hpp"
#include "bbmlab/rng.hpp"
#include "bbmlab/stats.hpp"

using namespace bbmlab;

namespace {

std::vector<double> cauchy(std::size_t n, std::uint64_t seed) {
  RngStream s(seed, 0);
  std::vector<double> v(n);
  for (auto& x : v) x = std::tan(std::numbers::pi * (s.uniform() - 0.5));
  return v;
}

std::vector<double> pareto(std::size_t n, double alpha, std::uint64_t seed) {
  RngStream s(seed, 0);
  std::vector<double> v(n);
  for (auto& x : v) x = std::pow(s.uniform(), -1.0 / alpha);
  return v;
}

}  // namespace

TEST_CASE("mean and quantiles") {
  const auto m = mean_se({1.0, 2.0, 3.0, 4.0});
  CHECK(m.mean == 2.5);
  CHECK(m.standard_error == doctest::Approx(std::sqrt(5.0 / 3.0 / 4.0)));
  CHECK(quantile({1.0, 2.0, 3.0, 4.0}, 0.5) == 2.5);
  CHECK(median({5.0, 1.0, 3.0}) == 3.0);
  CHECK_THROWS_AS(quantile({}, 0.5), Error);
}

TEST_CASE("empirical characteristic function") {
  std::vector<double> zeros(10, 0.0);
  for (const auto& p : empirical_cf(zeros, {-1.0, 0.5, 3.0})) CHECK(p.value == std::complex<double>(1.0, 0.0));

  const auto c = cauchy(100000, 1);
  const auto ecf = empirical_cf(c, {-1.0, 1.0});
  CHECK(std::abs(ecf[1].value - std::exp(-1.0)) < 3 * ecf[1].standard_error);
  CHECK(ecf[0].value == std::conj(ecf[1].value));
  CHECK(ecf[1].standard_error <= 1.0 / std::sqrt(100000.0));
  CHECK_THROWS_AS(empirical_cf({}, {1.0}), Error);
}

TEST_CASE("cf distance") {
  std::vector<double> grid;
  for (int i = -40; i <= 40; ++i) grid.push_back(0.1 * i);
  auto cauchy_cf = [](double l) { return std::complex<double>(std::exp(-std::abs(l)), 0.0); };
  CHECK(cf_distance(empirical_cf(cauchy(100000, 2), grid), cauchy_cf).sup < 0.02);

  RngStream s(3, 0);
  std::vector<double> g(100000);
  for (auto& x : g) x = s.normal();
  CHECK(cf_distance(empirical_cf(g, grid), cauchy_cf).sup > 0.1);

  std::vector<CfPoint> exact;
  for (double l : grid) exact.push_back({l, cauchy_cf(l), 0.0});
  CHECK(cf_distance(exact, cauchy_cf).sup == 0.0);
}

TEST_CASE("ecf standard errors cover") {
  // 100 bootstrap-style resamples: the 3 s.e. band should cover the truth.
  int covered = 0;
  for (std::uint64_t r = 0; r < 100; ++r) {
    const auto p = empirical_cf(cauchy(2000, 100 + r), {1.0})[0];
    covered += std::abs(p.value - std::exp(-1.0)) < 3 * p.standard_error;
  }
  CHECK(covered >= 95);
}

TEST_CASE("Hill estimator") {
  const auto p1 = hill_index(pareto(100000, 1.0, 4), 1000);
  CHECK(std::abs(p1.alpha - 1.0) < 0.1);
  const auto p2 = hill_index(pareto(100000, 2.0, 5), 1000, TailSide::Positive);
  CHECK(std::abs(p2.alpha - 2.0) < 0.2);
  RngStream s(6, 0);
  std::vector<double> e(100000);
  for (auto& x : e) x = s.exponential(1.0);
  CHECK(hill_index(e, 1000).alpha > 3.0);
  CHECK_THROWS_AS(hill_index(e, 60000), Error);
}

TEST_CASE("Kolmogorov-Smirnov") {
  CHECK(kolmogorov_survival(0.0) == 1.0);
  CHECK(kolmogorov_survival(1.3580986) == doctest::Approx(0.05).epsilon(1e-4));
  RngStream s(7, 0);
  std::vector<double> u(5000), v(5000);
  for (auto& x : u) x = s.uniform();
  for (auto& x : v) x = s.uniform();
  const auto one = ks_one_sample(u, [](double x) { return std::clamp(x, 0.0, 1.0); });
  CHECK(one.p_value > 0.001);
  const auto wrong = ks_one_sample(u, [](double x) { return std::clamp(x * x, 0.0, 1.0); });
  CHECK(wrong.p_value < 1e-6);
  CHECK(ks_two_sample(u, v).p_value > 0.001);
  CHECK(ks_one_sample(u, [](double x) { return x; }, 100.0).n_effective == 100.0);
}

TEST_CASE("fluctuation statistic") {
  const double t = 16.0, z = 1.7;
  FluctuationInput in{t, std::sqrt(2.0 / std::numbers::pi) * z / std::sqrt(t), 0.0, z};
  CHECK(std::abs(fluctuation_statistic(FluctuationMode::AdditiveCauchy, in)) < 1e-14);
  FluctuationInput a{t, 0.3, 1.1, 0.9}, b{t, 0.6, 2.2, 1.8};
  const double sa = fluctuation_statistic(FluctuationMode::AdditiveCauchy, a);
  CHECK(fluctuation_statistic(FluctuationMode::AdditiveCauchy, b) == doctest::Approx(2.0 * sa));
  // F = 1 in general mode is the derivative-martingale statistic.
  const double c = -std::sqrt(2.0 / std::numbers::pi);
  const double hand = std::sqrt(t) * (1.1 - 0.9 - std::log(t) / std::sqrt(2.0 * std::numbers::pi * t) * 0.9);
  CHECK(std::abs(fluctuation_statistic(FluctuationMode::GeneralF, a, 1.0, c) - hand) < 1e-12);
  CHECK_THROWS_AS(fluctuation_statistic(FluctuationMode::AdditiveCauchy, FluctuationInput{}), Error);
}

TEST_CASE("stopping line closed forms") {
  CHECK(stopping_line_closed_form(1.0, [](double) { return 1.0; }) == doctest::Approx(std::exp(-1.0)).epsilon(1e-10));
  CHECK(stopping_line_window_mass(1.0, 4.0, INFINITY) == doctest::Approx(0.140870206517586).epsilon(1e-13));
  CHECK(stopping_line_window_mass(1.0, 1.0, 2.0) == doctest::Approx(0.0596662246813393).epsilon(1e-13));
  CHECK(stopping_line_closed_form(1.0, [](double r) { return r >= 4.0 ? 1.0 : 0.0; }) ==
        doctest::Approx(0.140870206517586).epsilon(1e-8));
  const auto m = stoppingline_moment_check({0.3, 0.4, 0.35, 0.38}, 1.0, [](double) { return 1.0; });
  CHECK(m.closed_form == doctest::Approx(std::exp(-1.0)).epsilon(1e-10));
  CHECK_THROWS_AS(stopping_line_window_mass(0.0, 1.0, 2.0), Error);
}
