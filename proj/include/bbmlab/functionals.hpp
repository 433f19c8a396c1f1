#pragma once

#include <functional>
#include <string>
#include <vector>

#include "bbmlab/engine.hpp"
#include "bbmlab/quadrature.hpp"

namespace bbmlab {

using RealFn = std::function<double(double)>;

/// Growth and regularity classes a test function may claim.
///   A1: |F(x)| <= e^{kappa x}
///   A2: |F(x) - F(y)| <= (x - y) e^{kappa x} for 0 < y <= x
///   H1, H2, H3: |F^{(j)}(x)| <= C x^{-alpha-j} e^{kappa x}, j = 0, 1, 2
struct AssumptionFlags {
  bool a1 = false;
  bool a2 = false;
  bool h1 = false;
  bool h2 = false;
  bool h3 = false;

  bool h_class() const { return h1 && h2 && h3; }
};

/// A test function F on (0, inf) with its derivatives and class metadata.
struct FunctionalSpec {
  std::string key;
  RealFn f;
  RealFn df;   // empty when unknown
  RealFn d2f;  // empty when unknown
  double alpha = 0.0;  // divergence exponent at 0
  double kappa = 1.0;  // exponential growth constant
  double bound_constant = 1.0;  // C in the H bounds
  AssumptionFlags flags;

  double operator()(double x) const { return f(x); }
};

/// Catalog lookup. Keys:
///   one, x, x2, exp:<theta>, exp_neg (= exp:-1), exp_half (= exp:0.5),
///   pow_neg:<a> for 0 < a < 3, inv_x (= pow_neg:1), G:<key>.
/// G:<key> is the second-order Bessel correction G(x) built from the
/// functional named by <key>.
FunctionalSpec functional_from_key(const std::string& key);

/// Keys accepted by functional_from_key, for help text and test sweeps.
std::vector<std::string> catalog_keys();

/// Piecewise polynomial-times-exponential function. Piece i covers
/// [from_i, from_{i+1}) and equals sum_k coeffs[k] x^k e^{rate x}; the last
/// piece extends to infinity.
struct PiecewiseTerm {
  double from = 0.0;
  std::vector<double> coeffs;
  double rate = 0.0;
};
FunctionalSpec functional_from_pieces(std::string key, std::vector<PiecewiseTerm> pieces,
                                      double alpha, double kappa, double bound_constant,
                                      AssumptionFlags flags);

/// a F + b G. Classes are intersected; derivatives combine when both exist.
FunctionalSpec linear_combination(double a, const FunctionalSpec& f, double b,
                                  const FunctionalSpec& g);

/// Grid check of the claimed flags on a log grid over [1e-6, 1e2].
/// Returns one message per violated flag; empty when all claims hold.
std::vector<std::string> check_assumptions(const FunctionalSpec& spec);

/// E[F(R_1)] for a Bessel-3 process started at 0. Throws InvalidArgument when
/// the integral is not finite (alpha >= 3 or quadrature failure).
QuadResult expected_bessel_value(const FunctionalSpec& spec);

/// W_t = sum exp(-X).
double eval_additive(const PopulationSnapshot& snap);

/// Z_t = sum X exp(-X).
double eval_derivative(const PopulationSnapshot& snap);

/// Z_t(F) = sum X exp(-X) F(X / sqrt(scale_t)) over all particles, the
/// unshifted form used by the fluctuation statistics. Functions with a
/// divergence at 0 (alpha > 0) are evaluated on positive particles only.
double eval_front(const PopulationSnapshot& snap, const FunctionalSpec& spec, double scale_t);

/// Z(F, delta, scale_t) = sum (X - delta)_+ exp(-X) F((X - delta) / sqrt(scale_t)).
/// F is only evaluated where X > delta. Throws InvalidArgument naming the
/// particle if F returns a non-finite value.
double eval_gibbs(const PopulationSnapshot& snap, const FunctionalSpec& spec, double delta,
                  double scale_t);

/// Same sum restricted to lineages that never crossed the barrier. The run
/// must have used exactly the given barrier.
double eval_killed(const RunResult& run, const PopulationSnapshot& snap, const FunctionalSpec& spec,
                   double delta, double scale_t, const BarrierSpec& barrier);

/// One entry per stopping line record: the sum over its descendants v of
/// (X_v - gamma)_+ exp(-X_v) (F((X_v - gamma) / sqrt(scale_t)) - mean_f).
/// Requires a run in continue mode.
std::vector<double> eval_contributions(const RunResult& run, const PopulationSnapshot& snap,
                                       const FunctionalSpec& spec, double gamma, double scale_t,
                                       double mean_f);

}  // namespace bbmlab
