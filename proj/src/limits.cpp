#include "bbmlab/limits.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <limits>
#include <numeric>
#include <string>

#include "bbmlab/error.hpp"
#include "bbmlab/kernels.hpp"

namespace bbmlab {

namespace {

constexpr double kSqrt2OverPi = 0.7978845608028654;
constexpr double kInvSqrt2Pi = 0.3989422804014327;
constexpr double kEulerGamma = 0.5772156649015329;

QuadOptions inner_options() {
  QuadOptions o;
  o.abs_tol = 1e-18;
  o.rel_tol = 1e-12;
  o.max_intervals = 400;
  return o;
}

QuadOptions outer_options() {
  QuadOptions o;
  o.abs_tol = 1e-12;
  o.rel_tol = 1e-11;
  o.max_intervals = 2000;
  return o;
}

double bessel_weight(double z) { return kSqrt2OverPi * z * z * std::exp(-0.5 * z * z); }

double x_log_abs_x(double x) { return x == 0.0 ? 0.0 : x * std::log(std::abs(x)); }

}  // namespace

ShiftProfile::ShiftProfile(FunctionalSpec spec) : spec_(std::move(spec)), mean_(expected_bessel_value(spec_)) {}

QuadResult ShiftProfile::at(double u) const { return at(u, 1.0 - u); }

QuadResult ShiftProfile::at(double u, double w) const {
  if (!(u >= 0.0) || !std::isfinite(u)) throw invalid_argument("H(u) needs a finite u >= 0");
  if (u == 0.0) return {0.0, 0.0, 0, true};
  if (w <= 0.0) return {-mean_.value, mean_.error, 0, true};
  QuadResult r;
  if (u <= 0.5) {
    const double log_scale = -1.5 * std::log1p(-u);
    const double rate = u / (2.0 * (1.0 - u));
    r = integrate_positive_axis(
        [&](double z) {
          const double w = bessel_weight(z);
          if (w == 0.0) return 0.0;
          return spec_.f(z) * w * std::expm1(log_scale - rate * z * z);
        },
        inner_options());
  } else {
    const double s = std::sqrt(w);
    r = integrate_positive_axis(
        [&](double z) {
          const double w = bessel_weight(z);
          return w == 0.0 ? 0.0 : spec_.f(s * z) * w;
        },
        inner_options());
    r.value -= mean_.value;
    r.error += mean_.error;
  }
  if (!std::isfinite(r.value)) {
    throw invalid_argument("H(" + std::to_string(u) + ") is not finite for functional '" + spec_.key + "'");
  }
  return r;
}

QuadResult shift_profile(const FunctionalSpec& spec, double u) { return ShiftProfile(spec).at(u); }

ProfileIntegrals profile_integrals(const ShiftProfile& profile) {
  ProfileIntegrals out;
  auto h = [&](double u, double w) { return profile.at(u, w).value; };
  out.h = integrate_unit_singular(UnitIntegrand(h), outer_options());
  out.abs_h = integrate_unit_singular(UnitIntegrand([&](double u, double w) { return std::abs(h(u, w)); }),
                                      outer_options());
  out.h_log_h = integrate_unit_singular(
      UnitIntegrand([&](double u, double w) { return x_log_abs_x(h(u, w)); }), outer_options());
  for (const QuadResult* q : {&out.h, &out.abs_h, &out.h_log_h}) {
    if (!std::isfinite(q->value)) {
      throw invalid_argument("the u^{-3/2} integral of H diverges for functional '" +
                             profile.spec().key + "'");
    }
  }
  return out;
}

StableLawParams prop_constants(const FunctionalSpec& spec, double mu_z, CfRange range) {
  const ShiftProfile profile(spec);
  ProfileIntegrals in = profile_integrals(profile);
  if (range == CfRange::Full) {
    // On [1, inf) H = -E[F(R_1)] and the u^{-3/2} weight integrates to 2.
    const double m = profile.mean();
    in.h.value += -2.0 * m;
    in.abs_h.value += 2.0 * std::abs(m);
    in.h_log_h.value += 2.0 * x_log_abs_x(-m);
  }
  StableLawParams p;
  p.mu_z = mu_z;
  p.c1 = kInvSqrt2Pi * in.h.value;
  p.c2 = 0.5 * std::sqrt(std::numbers::pi / 2.0) * in.abs_h.value;
  p.c3 = kInvSqrt2Pi * (in.h_log_h.value - mu_z * in.h.value);
  p.quadrature_error = kInvSqrt2Pi * in.h.error + 0.5 * std::sqrt(std::numbers::pi / 2.0) * in.abs_h.error +
                       kInvSqrt2Pi * (in.h_log_h.error + std::abs(mu_z) * in.h.error);
  return p;
}

IdentityGap appendix_identity_gap(const FunctionalSpec& spec) {
  if (!spec.df) {
    throw invalid_argument("functional '" + spec.key + "' has no derivative; the identity needs F'");
  }
  const ShiftProfile profile(spec);
  const QuadResult lhs =
      integrate_unit_singular(UnitIntegrand([&](double u, double w) { return profile.at(u, w).value; }),
                              outer_options());
  QuadOptions opts = inner_options();
  opts.max_intervals = 2000;
  const QuadResult drift = integrate_positive_axis(
      [&](double z) {
        const double w = bessel_weight(z);
        return w == 0.0 ? 0.0 : (spec.df(z) + spec.f(z) / z) * w;
      },
      opts);
  IdentityGap g;
  g.lhs = lhs.value;
  g.rhs = 2.0 * profile.mean() - std::sqrt(2.0 * std::numbers::pi) * drift.value;
  g.gap = std::abs(g.lhs - g.rhs);
  g.error = lhs.error + 2.0 * profile.mean_error() + std::sqrt(2.0 * std::numbers::pi) * drift.error;
  if (!std::isfinite(g.gap)) {
    throw invalid_argument("identity sides are not finite for functional '" + spec.key + "'");
  }
  return g;
}

QuadResult logt_coefficient(const FunctionalSpec& spec) {
  const ShiftProfile profile(spec);
  // d(-1/sqrt u) = u^{-3/2} du / 2; the tail on [1, inf) is -E[F(R_1)].
  QuadResult head = integrate_unit_singular(UnitIntegrand([&](double u, double w) { return profile.at(u, w).value; }),
                              outer_options());
  QuadResult out;
  out.value = kSqrt2OverPi * (0.5 * head.value - profile.mean());
  out.error = kSqrt2OverPi * (0.5 * head.error + profile.mean_error());
  out.evaluations = head.evaluations;
  out.converged = head.converged;
  return out;
}

namespace {

struct BesselMoments {
  double m0;
  double m2;
};

BesselMoments bessel_moments(const FunctionalSpec& spec) {
  FunctionalSpec squared = spec;
  squared.f = [f = spec.f](double z) { return z * z * f(z); };
  return {expected_bessel_value(spec).value, expected_bessel_value(squared).value};
}

double g_from_moments(const BesselMoments& m, double x) {
  return m.m0 * (1.5 - 0.5 * x * x) + m.m2 * (x * x / 6.0 - 0.5);
}

}  // namespace

double expansion_G(const FunctionalSpec& spec, double x) { return g_from_moments(bessel_moments(spec), x); }

QuadResult bessel_expectation(const FunctionalSpec& spec, double y, double s) {
  if (!(s > 0.0)) throw invalid_argument("Bessel expectation needs s > 0");
  if (!(y >= 0.0)) throw invalid_argument("Bessel expectation needs y >= 0");
  QuadOptions opts = inner_options();
  opts.max_intervals = 2000;
  return integrate_positive_axis(
      [&](double z) {
        const double d = bessel3_density(y, s, z);
        return d == 0.0 ? 0.0 : spec.f(z) * d;
      },
      opts);
}

double expansion_residual(const FunctionalSpec& spec, double x, double eps) {
  if (!(eps > 0.0 && eps < 0.5)) throw invalid_argument("expansion residual needs 0 < eps < 1/2");
  const BesselMoments m = bessel_moments(spec);
  const double shifted = bessel_expectation(spec, x * std::sqrt(eps), 1.0 - eps).value;
  return std::abs(shifted - m.m0 - eps * g_from_moments(m, x));
}

std::complex<double> limit_cf(const StableLawParams& p, double lambda, double z) {
  if (lambda == 0.0) return {1.0, 0.0};
  if (!(z >= 0.0)) throw invalid_argument("limit_cf needs z >= 0");
  const double re = p.c2 * std::abs(lambda);
  const double im = lambda * (p.c1 * std::log(std::abs(lambda)) + p.c3);
  return std::exp(std::complex<double>(-z * re, -z * im));
}

std::complex<double> limit_cf(const FunctionalSpec& spec, double lambda, double z, CfRange range,
                              double mu_z) {
  if (lambda == 0.0) return {1.0, 0.0};
  return limit_cf(prop_constants(spec, mu_z, range), lambda, z);
}

MuZEstimate mu_z_estimate(const std::vector<double>& samples, const std::vector<double>& x_grid) {
  if (samples.size() < 2) throw invalid_argument("mu_Z estimate needs at least two samples");
  if (x_grid.size() < 3) throw invalid_argument("mu_Z estimate needs at least three grid points");
  std::vector<double> grid = x_grid;
  std::sort(grid.begin(), grid.end());
  if (!(grid.front() > 0.0)) throw invalid_argument("mu_Z grid points must be positive");
  const std::size_t n = samples.size();
  const std::size_t k = grid.size();
  const double nn = static_cast<double>(n);

  MuZEstimate out;
  out.x_grid = grid;
  out.curve.assign(k, 0.0);
  for (double z : samples) {
    for (std::size_t j = 0; j < k; ++j) {
      if (z <= grid[j]) out.curve[j] += z;
    }
  }
  for (std::size_t j = 0; j < k; ++j) {
    out.curve[j] = out.curve[j] / nn - std::log(grid[j]) - kEulerGamma + 1.0;
  }

  // g is linear in the empirical measure, so every window statistic is a
  // sample mean of per-sample contributions and its s.e. is exact CLT.
  const std::size_t width = std::max<std::size_t>(3, k / 4);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t b = 0; b + width <= k; ++b) {
    double mx = 0.0;
    for (std::size_t j = b; j < b + width; ++j) mx += std::log(grid[j]);
    mx /= static_cast<double>(width);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t j = b; j < b + width; ++j) {
      const double dx = std::log(grid[j]) - mx;
      sxx += dx * dx;
      sxy += dx * out.curve[j];
    }
    const double slope = sxy / sxx;
    if (std::abs(slope) < best) {
      best = std::abs(slope);
      out.slope = slope;
      out.window_begin = b;
      out.window_end = b + width;
    }
  }
  const std::size_t b = out.window_begin, e = out.window_end;
  double mx = 0.0;
  for (std::size_t j = b; j < e; ++j) mx += std::log(grid[j]);
  mx /= static_cast<double>(e - b);
  double sxx = 0.0;
  for (std::size_t j = b; j < e; ++j) sxx += (std::log(grid[j]) - mx) * (std::log(grid[j]) - mx);

  double level_sum = 0.0, level_sq = 0.0, slope_sum = 0.0, slope_sq = 0.0;
  for (double z : samples) {
    double level = 0.0, slope = 0.0;
    for (std::size_t j = b; j < e; ++j) {
      const double c = z <= grid[j] ? z : 0.0;
      level += c;
      slope += (std::log(grid[j]) - mx) * c;
    }
    level /= static_cast<double>(e - b);
    slope /= sxx;
    level_sum += level;
    level_sq += level * level;
    slope_sum += slope;
    slope_sq += slope * slope;
  }
  auto se = [&](double sum, double sq) {
    const double mean = sum / nn;
    return std::sqrt(std::max(0.0, (sq / nn - mean * mean) / (nn - 1.0)));
  };
  out.standard_error = se(level_sum, level_sq);
  out.slope_error = se(slope_sum, slope_sq);
  double value = 0.0;
  for (std::size_t j = b; j < e; ++j) value += out.curve[j];
  out.value = value / static_cast<double>(e - b);
  out.warning = std::abs(out.slope) > 3.0 * out.slope_error + 0.02;
  return out;
}

}  // namespace bbmlab
