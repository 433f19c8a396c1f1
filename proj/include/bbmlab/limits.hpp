#pragma once

#include <complex>
#include <vector>

#include "bbmlab/functionals.hpp"
#include "bbmlab/quadrature.hpp"

namespace bbmlab {

/// u -> H(u) = E[F(sqrt(1-u) R_1) 1_{u<1}] - E[F(R_1)] for one functional.
/// E[F(R_1)] is computed once on construction.
class ShiftProfile {
 public:
  explicit ShiftProfile(FunctionalSpec spec);

  const FunctionalSpec& spec() const { return spec_; }
  double mean() const { return mean_.value; }
  double mean_error() const { return mean_.error; }

  /// H(u) with its quadrature error. Small u uses the difference of the two
  /// Bessel kernels so that H keeps full relative accuracy as u -> 0.
  QuadResult at(double u) const;
  /// H at u given also w = 1 - u exactly (for u close to 1).
  QuadResult at(double u, double w) const;
  double operator()(double u) const { return at(u).value; }

 private:
  FunctionalSpec spec_;
  QuadResult mean_;
};

QuadResult shift_profile(const FunctionalSpec& spec, double u);

enum class CfRange {
  Unit,  // killing times u in [0, 1]
  Full,  // u in [0, inf)
};

/// (c1, c2, c3) of the conditional 1-stable law
///   E[exp(i lambda S) | Z] = exp(-Z [c2 |lambda| + i lambda (c1 log|lambda| + c3)]).
/// With CfRange::Unit these are the constants of the barrier decomposition;
/// with CfRange::Full the integrals run over [0, inf), where H = -E[F(R_1)]
/// on [1, inf) contributes in closed form.
struct StableLawParams {
  double c1 = 0.0;
  double c2 = 0.0;
  double c3 = 0.0;
  double mu_z = 0.0;
  /// Sum of quadrature error estimates propagated into the three constants.
  double quadrature_error = 0.0;
};

StableLawParams prop_constants(const FunctionalSpec& spec, double mu_z = 0.0,
                               CfRange range = CfRange::Unit);

/// The three (0, 1] integrals behind the constants, with u^{-3/2} weight:
/// int H, int |H|, int H log|H| (0 log 0 = 0).
struct ProfileIntegrals {
  QuadResult h;
  QuadResult abs_h;
  QuadResult h_log_h;
};
ProfileIntegrals profile_integrals(const ShiftProfile& profile);

/// The two sides of the closed form
///   int_0^1 H(u) u^{-3/2} du = 2 E[F(R_1)] - sqrt(2 pi) E[F'(R_1) + F(R_1)/R_1].
struct IdentityGap {
  double lhs = 0.0;
  double rhs = 0.0;
  double gap = 0.0;
  double error = 0.0;
};
IdentityGap appendix_identity_gap(const FunctionalSpec& spec);

/// Coefficient of (log t) / (2 sqrt t) Z in the fluctuation statistic:
/// sqrt(2/pi) int_0^inf H(u) d(-1/sqrt u).
QuadResult logt_coefficient(const FunctionalSpec& spec);

/// G(x) = E[F(R_1)] (3/2 - x^2/2) + E[R_1^2 F(R_1)] (x^2/6 - 1/2).
double expansion_G(const FunctionalSpec& spec, double x);

/// E_y[F(R_s)] for the Bessel-3 process started at y >= 0.
QuadResult bessel_expectation(const FunctionalSpec& spec, double y, double s);

/// |E_{x sqrt(eps)}[F(R_{1-eps})] - E[F(R_1)] - eps G(x)|. Requires 0 < eps < 1/2.
double expansion_residual(const FunctionalSpec& spec, double x, double eps);

/// The conditional characteristic function at conditioning value z.
std::complex<double> limit_cf(const StableLawParams& params, double lambda, double z);
std::complex<double> limit_cf(const FunctionalSpec& spec, double lambda, double z, CfRange range,
                              double mu_z);

/// Plateau estimate of mu_Z = lim_x E[Z 1_{Z <= x}] - log x - gamma_E + 1.
struct MuZEstimate {
  double value = 0.0;
  double standard_error = 0.0;
  /// True when no window of the grid is flat; the value is then unreliable.
  bool warning = false;
  /// Slope of g against log x on the chosen window, with its standard error.
  double slope = 0.0;
  double slope_error = 0.0;
  std::size_t window_begin = 0;
  std::size_t window_end = 0;  // exclusive
  std::vector<double> x_grid;
  std::vector<double> curve;  // g(x) on the grid
};
MuZEstimate mu_z_estimate(const std::vector<double>& samples, const std::vector<double>& x_grid);

}  // namespace bbmlab
