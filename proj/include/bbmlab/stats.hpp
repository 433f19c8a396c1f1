#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <vector>

namespace bbmlab {

struct MeanEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
  std::size_t n = 0;
};

MeanEstimate mean_se(const std::vector<double>& samples);

/// z-score of a Monte Carlo mean against a reference value.
double z_score(const MeanEstimate& estimate, double reference);

/// Sample quantile with linear interpolation (type 7).
double quantile(std::vector<double> samples, double q);
double median(std::vector<double> samples);

struct CfPoint {
  double lambda = 0.0;
  std::complex<double> value;
  /// s.e. of the complex mean: sqrt((1 - |value|^2) / n), never above 1/sqrt(n).
  double standard_error = 0.0;
};

std::vector<CfPoint> empirical_cf(const std::vector<double>& samples, const std::vector<double>& lambdas);

struct CfDistance {
  double sup = 0.0;
  std::vector<double> profile;  // |ecf - model| per lambda
};

CfDistance cf_distance(const std::vector<CfPoint>& ecf,
                       const std::function<std::complex<double>(double)>& model);

enum class TailSide { Positive, Absolute };

struct HillEstimate {
  double alpha = 0.0;
  double standard_error = 0.0;
  std::size_t k = 0;
};

/// Hill estimator over the top-k order statistics. Requires 1 <= k < n/2.
HillEstimate hill_index(const std::vector<double>& samples, std::size_t k,
                        TailSide side = TailSide::Absolute);

/// Kolmogorov limiting survival function P(K > x).
double kolmogorov_survival(double x);

struct KsResult {
  double statistic = 0.0;
  double p_value = 0.0;
  double n_effective = 0.0;
};

/// One-sample KS against a continuous cdf. n_effective overrides the sample
/// size used for the p-value (for clustered samples); 0 means samples.size().
KsResult ks_one_sample(std::vector<double> samples, const std::function<double(double)>& cdf,
                       double n_effective = 0.0);
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

enum class FluctuationMode { AdditiveCauchy, GeneralF };

struct FluctuationInput {
  double t = 0.0;
  double w_t = 0.0;      // additive martingale at t
  double z_t_f = 0.0;    // Z_t(F) at t (general mode)
  double z_big_t = 0.0;  // derivative martingale at the proxy time T
};

/// additive-cauchy: sqrt t (sqrt t W_t - sqrt(2/pi) Z_T)
/// general-F:       sqrt t (Z_t(F) - E[F(R_1)] Z_T + (log t) / (2 sqrt t) Z_T c)
/// where c is the log t coefficient of F.
double fluctuation_statistic(FluctuationMode mode, const FluctuationInput& in, double mean_f = 0.0,
                             double logt_coeff = 0.0);

/// Closed form E_x[sum phi(T_u)] = x e^{-x} int phi(r) e^{-x^2/2r} (2 pi)^{-1/2} r^{-3/2} dr
/// for the stopping line of a barrier at 0 from time 0.
double stopping_line_closed_form(double x, const std::function<double(double)>& phi);

/// e^{-x} P(T in [r1, r2]) in closed form: the expected number of kills in
/// the time window.
double stopping_line_window_mass(double x, double r1, double r2);

struct MomentCheck {
  double mc_mean = 0.0;
  double standard_error = 0.0;
  double closed_form = 0.0;
  double z = 0.0;
};

MomentCheck stoppingline_moment_check(const std::vector<double>& per_replicate, double x,
                                      const std::function<double(double)>& phi);

}  // namespace bbmlab
