#pragma once

#include <functional>

namespace bbmlab {

struct QuadOptions {
  double abs_tol = 1e-13;
  double rel_tol = 1e-11;
  int max_intervals = 4000;
};

struct QuadResult {
  double value = 0.0;
  /// Kronrod-vs-Gauss error estimate summed over the final partition.
  double error = 0.0;
  int evaluations = 0;
  bool converged = false;
};

using Integrand = std::function<double(double)>;

/// Globally adaptive 21-point Gauss-Kronrod on a finite interval. The worst
/// interval is bisected until the summed error estimate meets the tolerance.
/// Integrable endpoint singularities are fine as long as the integrand is
/// finite at the interior nodes (the rule never samples an endpoint).
QuadResult integrate(const Integrand& f, double a, double b, const QuadOptions& opts = {});

/// Integral over [a, inf) via x = a + s / (1 - s).
QuadResult integrate_to_infinity(const Integrand& f, double a, const QuadOptions& opts = {});

/// Integral over (0, inf) for integrands that may behave like z^p, p > -1,
/// at the origin: (0, 1] is mapped through z = e^w so the algebraic endpoint
/// becomes an exponentially decaying tail.
QuadResult integrate_positive_axis(const Integrand& f, const QuadOptions& opts = {});

/// Integral of g(u) u^{-3/2} over (0, 1] for g(u) = O(u) at the origin.
/// Uses u = v^2 on (0, 1/2] and u = 1 - s^4 on [1/2, 1) so that both an
/// O(u) zero at 0 and an integrable (1-u)^{-p}, p < 1, blow-up at 1 are tamed.
QuadResult integrate_unit_singular(const Integrand& g, const QuadOptions& opts = {});

/// Same, for integrands that take (u, 1 - u) so that the complement keeps
/// full precision near u = 1.
using UnitIntegrand = std::function<double(double, double)>;
QuadResult integrate_unit_singular(const UnitIntegrand& g, const QuadOptions& opts = {});

inline QuadResult operator+(QuadResult a, const QuadResult& b) {
  a.value += b.value;
  a.error += b.error;
  a.evaluations += b.evaluations;
  a.converged = a.converged && b.converged;
  return a;
}

}  // namespace bbmlab
