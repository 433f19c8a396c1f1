#include "bbmlab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "bbmlab/error.hpp"
#include "bbmlab/quadrature.hpp"

namespace bbmlab {

MeanEstimate mean_se(const std::vector<double>& samples) {
  MeanEstimate out;
  out.n = samples.size();
  if (samples.empty()) return out;
  // Two-pass for numerical stability.
  double sum = 0.0;
  for (double v : samples) sum += v;
  out.mean = sum / static_cast<double>(out.n);
  if (out.n < 2) return out;
  double sq = 0.0;
  for (double v : samples) sq += (v - out.mean) * (v - out.mean);
  const double var = sq / static_cast<double>(out.n - 1);
  out.standard_error = std::sqrt(var / static_cast<double>(out.n));
  return out;
}

double z_score(const MeanEstimate& e, double reference) {
  if (e.standard_error == 0.0) return e.mean == reference ? 0.0 : std::copysign(INFINITY, e.mean - reference);
  return (e.mean - reference) / e.standard_error;
}

double quantile(std::vector<double> samples, double q) {
  if (samples.empty()) throw invalid_argument("quantile of an empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw invalid_argument("quantile level must lie in [0, 1]");
  std::sort(samples.begin(), samples.end());
  const double h = q * static_cast<double>(samples.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, samples.size() - 1);
  return samples[lo] + (h - static_cast<double>(lo)) * (samples[hi] - samples[lo]);
}

double median(std::vector<double> samples) { return quantile(std::move(samples), 0.5); }

std::vector<CfPoint> empirical_cf(const std::vector<double>& samples, const std::vector<double>& lambdas) {
  if (samples.empty()) throw invalid_argument("empirical_cf needs at least one sample");
  const double n = static_cast<double>(samples.size());
  std::vector<CfPoint> out;
  out.reserve(lambdas.size());
  for (double lambda : lambdas) {
    double re = 0.0, im = 0.0;
    for (double x : samples) {
      re += std::cos(lambda * x);
      im += std::sin(lambda * x);
    }
    CfPoint p;
    p.lambda = lambda;
    p.value = {re / n, im / n};
    // Var(cos) + Var(sin) = 1 - |phi|^2 for a unit-modulus variable.
    p.standard_error = std::sqrt(std::max(0.0, 1.0 - std::norm(p.value)) / n);
    out.push_back(p);
  }
  return out;
}

CfDistance cf_distance(const std::vector<CfPoint>& ecf,
                       const std::function<std::complex<double>(double)>& model) {
  CfDistance out;
  out.profile.reserve(ecf.size());
  for (const auto& p : ecf) {
    const double d = std::abs(p.value - model(p.lambda));
    out.profile.push_back(d);
    out.sup = std::max(out.sup, d);
  }
  return out;
}

HillEstimate hill_index(const std::vector<double>& samples, std::size_t k, TailSide side) {
  std::vector<double> tail;
  tail.reserve(samples.size());
  for (double v : samples) {
    const double x = side == TailSide::Absolute ? std::abs(v) : v;
    if (x > 0.0 && std::isfinite(x)) tail.push_back(x);
  }
  if (k < 1 || 2 * k >= samples.size() || k + 1 > tail.size()) {
    throw invalid_argument("hill_index needs 1 <= k < n/2 with k+1 positive samples (n = " +
                           std::to_string(samples.size()) + ", k = " + std::to_string(k) + ")");
  }
  std::nth_element(tail.begin(), tail.begin() + static_cast<std::ptrdiff_t>(k), tail.end(),
                   std::greater<>());
  const double threshold = tail[k];
  double sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) sum += std::log(tail[i] / threshold);
  HillEstimate out;
  out.k = k;
  out.alpha = static_cast<double>(k) / sum;
  out.standard_error = out.alpha / std::sqrt(static_cast<double>(k));
  return out;
}

double kolmogorov_survival(double x) {
  if (x <= 0.0) return 1.0;
  if (x < 0.2) {
    // Theta-function form, accurate where the alternating series is slow.
    const double pi2 = std::numbers::pi * std::numbers::pi;
    double s = 0.0;
    for (int j = 1; j <= 50; j += 2) s += std::exp(-j * j * pi2 / (8.0 * x * x));
    return 1.0 - std::sqrt(2.0 * std::numbers::pi) / x * s;
  }
  double s = 0.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = std::exp(-2.0 * j * j * x * x);
    s += (j % 2 == 1 ? term : -term);
    if (term < 1e-18) break;
  }
  return std::clamp(2.0 * s, 0.0, 1.0);
}

namespace {

double ks_p_value(double d, double n) {
  const double root = std::sqrt(n);
  return kolmogorov_survival((root + 0.12 + 0.11 / root) * d);
}

}  // namespace

KsResult ks_one_sample(std::vector<double> samples, const std::function<double(double)>& cdf,
                       double n_effective) {
  if (samples.empty()) throw invalid_argument("KS test needs samples");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
  }
  KsResult out;
  out.statistic = d;
  out.n_effective = n_effective > 0.0 ? n_effective : n;
  out.p_value = ks_p_value(d, out.n_effective);
  return out;
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw invalid_argument("two-sample KS test needs two nonempty samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  KsResult out;
  out.statistic = d;
  out.n_effective = na * nb / (na + nb);
  out.p_value = ks_p_value(d, out.n_effective);
  return out;
}

double fluctuation_statistic(FluctuationMode mode, const FluctuationInput& in, double mean_f,
                             double logt_coeff) {
  if (!(in.t > 0.0)) throw invalid_argument("fluctuation statistic needs t > 0");
  const double root_t = std::sqrt(in.t);
  if (mode == FluctuationMode::AdditiveCauchy) {
    return root_t * (root_t * in.w_t - std::sqrt(2.0 / std::numbers::pi) * in.z_big_t);
  }
  return root_t * (in.z_t_f - mean_f * in.z_big_t + std::log(in.t) / (2.0 * root_t) * in.z_big_t * logt_coeff);
}

double stopping_line_closed_form(double x, const std::function<double(double)>& phi) {
  if (!(x > 0.0)) throw invalid_argument("stopping line closed form needs a start x > 0");
  const double c = x * std::exp(-x) / std::sqrt(2.0 * std::numbers::pi);
  // v = r^{-1/2} turns the kernel into the Gaussian 2 exp(-x^2 v^2 / 2).
  QuadOptions opts;
  opts.abs_tol = 1e-15;
  const QuadResult r = integrate_to_infinity(
      [&](double v) {
        if (v <= 0.0) return 0.0;
        return 2.0 * phi(1.0 / (v * v)) * std::exp(-0.5 * x * x * v * v);
      },
      0.0, opts);
  return c * r.value;
}

double stopping_line_window_mass(double x, double r1, double r2) {
  if (!(x > 0.0)) throw invalid_argument("stopping line mass needs a start x > 0");
  auto cdf = [x](double r) { return r <= 0.0 ? 0.0 : std::erfc(x / std::sqrt(2.0 * r)); };
  const double hi = std::isinf(r2) ? 1.0 : cdf(r2);
  return std::exp(-x) * (hi - cdf(r1));
}

MomentCheck stoppingline_moment_check(const std::vector<double>& per_replicate, double x,
                                      const std::function<double(double)>& phi) {
  const MeanEstimate m = mean_se(per_replicate);
  MomentCheck out;
  out.mc_mean = m.mean;
  out.standard_error = m.standard_error;
  out.closed_form = stopping_line_closed_form(x, phi);
  out.z = z_score(m, out.closed_form);
  return out;
}

}  // namespace bbmlab
