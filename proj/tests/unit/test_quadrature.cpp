#include <doctest.h>

#include <cmath>
#include <numbers>

#include "bbmlab/quadrature.hpp"

using namespace bbmlab;

TEST_CASE("finite interval") {
  const auto r = integrate([](double x) { return std::sin(x); }, 0.0, std::numbers::pi);
  CHECK(r.value == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(r.error < 1e-10);
}

TEST_CASE("half line and positive axis") {
  CHECK(integrate_to_infinity([](double x) { return std::exp(-x); }, 1.0).value ==
        doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
  // int_0^inf x^{-1/2} e^{-x} dx = sqrt(pi)
  CHECK(integrate_positive_axis([](double x) { return std::exp(-x) / std::sqrt(x); }).value ==
        doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-10));
}

TEST_CASE("unit interval with the u^{-3/2} weight") {
  // g(u) = u: int_0^1 u^{-1/2} du = 2
  CHECK(integrate_unit_singular([](double u) { return u; }).value == doctest::Approx(2.0).epsilon(1e-12));
  // g(u) = u (1-u)^{-1/2}: int u^{-1/2} (1-u)^{-1/2} = pi
  const UnitIntegrand g = [](double u, double w) { return u / std::sqrt(w); };
  CHECK(integrate_unit_singular(g).value == doctest::Approx(std::numbers::pi).epsilon(1e-10));
}

TEST_CASE("tightening the tolerance moves the result by less than the error estimate") {
  auto f = [](double x) { return std::log(1.0 + x) / (1.0 + x * x); };
  QuadOptions loose;
  loose.abs_tol = 1e-6;
  loose.rel_tol = 1e-6;
  QuadOptions tight;
  tight.abs_tol = 1e-14;
  tight.rel_tol = 1e-13;
  const auto a = integrate(f, 0.0, 1.0, loose);
  const auto b = integrate(f, 0.0, 1.0, tight);
  CHECK(std::abs(a.value - b.value) <= a.error + 1e-15);
  // Known value pi log(2) / 8.
  CHECK(b.value == doctest::Approx(std::numbers::pi * std::log(2.0) / 8.0).epsilon(1e-13));
}
