#include <doctest.h>

#include <cmath>
#include <numbers>

#include "bbmlab/engine.hpp"
#include "bbmlab/error.hpp"
#include "bbmlab/functionals.hpp"

using namespace bbmlab;

// E[F(R_1)] for the 3d Bessel process at time 1 from 0. Values from
// tests/oracles/oracle_values.py (mpmath) and power_family.py (closed form
// E[R^{-a}] = 2^{1-a/2} Gamma((3-a)/2) / Gamma(3/2) / 2).
TEST_CASE("expected values against independent oracles") {
  const std::pair<const char*, double> cases[] = {
      {"one", 1.0},
      {"x", 1.59576912160573},
      {"x2", 3.0},
      {"exp_neg", 0.248428606657628},
      {"exp_half", 2.3577663262675},
      {"inv_x", 0.797884560802865},
      {"pow_neg:0.5", 0.86003998732451953538},
      {"pow_neg:1.5", 0.82217895866245855234},
  };
  for (const auto& [key, expected] : cases) {
    CAPTURE(key);
    const auto r = expected_bessel_value(functional_from_key(key));
    CHECK(r.value == doctest::Approx(expected).epsilon(1e-11));
  }
}

TEST_CASE("catalog keys resolve and carry their classes") {
  for (const auto& key : catalog_keys()) {
    CAPTURE(key);
    const auto f = functional_from_key(key);
    CHECK(f.key == key);
    CHECK(check_assumptions(f).empty());
  }
  CHECK(functional_from_key("inv_x").flags.h_class());
  CHECK(functional_from_key("inv_x").alpha == 1.0);
  CHECK_FALSE(functional_from_key("pow_neg:2.5").flags.h_class());
  CHECK_THROWS_AS(functional_from_key("nope"), Error);
  CHECK_THROWS_AS(functional_from_key("pow_neg:3"), Error);
  CHECK_THROWS_AS(functional_from_key("exp:abc"), Error);
}

TEST_CASE("derivatives agree with finite differences") {
  for (const char* key : {"x2", "exp_neg", "pow_neg:0.5", "G:exp_neg"}) {
    CAPTURE(key);
    const auto f = functional_from_key(key);
    for (double x : {0.3, 1.0, 2.5}) {
      const double h = 1e-5;
      CHECK(f.df(x) == doctest::Approx((f(x + h) - f(x - h)) / (2 * h)).epsilon(1e-6));
      CHECK(f.d2f(x) == doctest::Approx((f.df(x + h) - f.df(x - h)) / (2 * h)).epsilon(1e-5));
    }
  }
}

TEST_CASE("false class claims are reported") {
  auto f = functional_from_key("x2");
  f.flags.a1 = true;
  f.kappa = 0.0;  // x^2 is not bounded by e^{0 x}
  CHECK_FALSE(check_assumptions(f).empty());
}

TEST_CASE("piecewise descriptor") {
  // 1 on [0, 1), x e^{-x} beyond
  const auto f = functional_from_pieces("step", {{0.0, {1.0}, 0.0}, {1.0, {0.0, 1.0}, -1.0}}, 0.0, 1.0, 1.0, {});
  CHECK(f(0.5) == 1.0);
  CHECK(f(2.0) == doctest::Approx(2.0 * std::exp(-2.0)));
  CHECK(f.df(2.0) == doctest::Approx((1.0 - 2.0) * std::exp(-2.0)));
  CHECK_THROWS_AS(functional_from_pieces("empty", {}, 0.0, 1.0, 1.0, {}), Error);
}

TEST_CASE("linear combination") {
  const auto g = linear_combination(2.0, functional_from_key("x"), -1.0, functional_from_key("one"));
  CHECK(g(3.0) == 5.0);
  CHECK(expected_bessel_value(g).value == doctest::Approx(2.0 * 1.59576912160573 - 1.0).epsilon(1e-11));
}

TEST_CASE("particle sums") {
  PopulationSnapshot s;
  s.time = 4.0;
  s.particles = {{1, 0, 0.0, 1.0, -1}, {2, 0, 0.0, 2.0, -1}, {3, 0, 0.0, -0.5, 0}};
  const double w = std::exp(-1.0) + std::exp(-2.0) + std::exp(0.5);
  const double z = std::exp(-1.0) + 2.0 * std::exp(-2.0) - 0.5 * std::exp(0.5);
  CHECK(eval_additive(s) == doctest::Approx(w));
  CHECK(eval_derivative(s) == doctest::Approx(z));
  // Z_t(F) with F = x^2 at scale t = 4: sum X e^{-X} (X/2)^2
  const double zf = std::exp(-1.0) * 0.25 + 2.0 * std::exp(-2.0) * 1.0 - 0.5 * std::exp(0.5) * 0.0625;
  CHECK(eval_front(s, functional_from_key("x2"), 4.0) == doctest::Approx(zf));
  // Gibbs weights use (X - delta)_+, so the negative particle drops out; with
  // F = 1/x each remaining term is sqrt(t) e^{-X}.
  CHECK(eval_gibbs(s, functional_from_key("inv_x"), 0.5, 4.0) ==
        doctest::Approx(2.0 * (std::exp(-1.0) + std::exp(-2.0))));
}

TEST_CASE("non-finite values name the particle") {
  PopulationSnapshot s;
  s.time = 1.0;
  s.particles = {{7, 0, 0.0, 1.0, -1}};
  try {
    eval_front(s, functional_from_key("exp:800"), 1e-6);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("particle 7") != std::string::npos);
  }
}

TEST_CASE("killed and contribution sums need matching runs") {
  EngineConfig e;
  e.horizon = 3.0;
  e.snapshot_times = {3.0};
  e.start = 1.0;
  e.barrier = BarrierSpec{0.0, 0.0, kInfinity};
  const auto run = evolve(e);
  const auto& snap = run.snapshots[0];
  CHECK_THROWS_AS(eval_killed(run, snap, functional_from_key("one"), 0.0, 3.0, BarrierSpec{1.0, 0.0, kInfinity}),
                  Error);
  CHECK_THROWS_AS(eval_contributions(run, snap, functional_from_key("one"), 0.0, 3.0, 1.0), Error);
}
