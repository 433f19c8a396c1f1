#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <vector>

#include "bbmlab/rng.hpp"

namespace bbmlab {

/// Diffusion coefficients of a single particle. The defaults (sigma = 1,
/// drift = 1) together with the branching rate 1/(2 E[L-1]) make
/// sum exp(-X), sum X exp(-X) and sum X^2 exp(-X) have means 1, 0 and t.
struct Diffusion {
  double sigma = 1.0;
  double drift = 1.0;
};

/// Reproduction law L with the branching rate tied to its mean.
class OffspringLaw {
 public:
  /// pmf[k] = P(L = k). Requires E[L] > 1; the pmf is normalized.
  explicit OffspringLaw(std::vector<double> pmf);
  static OffspringLaw binary() { return OffspringLaw({0.0, 0.0, 1.0}); }
  static OffspringLaw from_map(const std::map<int, double>& pmf);

  const std::vector<double>& pmf() const noexcept { return pmf_; }
  double mean() const noexcept { return mean_; }
  double second_moment() const noexcept { return second_moment_; }
  /// lambda = 1 / (2 (E[L] - 1)).
  double rate() const noexcept { return 1.0 / (2.0 * (mean_ - 1.0)); }
  /// Constant of the two-particle moment formula: lambda * E[L(L-1)].
  double pair_constant() const noexcept { return rate() * (second_moment_ - mean_); }
  /// True when L is almost surely a single value (no draw needed).
  std::optional<int> deterministic() const noexcept { return deterministic_; }

  friend bool operator==(const OffspringLaw& a, const OffspringLaw& b) { return a.pmf_ == b.pmf_; }

 private:
  std::vector<double> pmf_;
  std::vector<double> cdf_;
  double mean_ = 0.0;
  double second_moment_ = 0.0;
  std::optional<int> deterministic_;

  friend int offspring_count(RngStream& stream, const OffspringLaw& law);
};

/// Brownian displacement over dt: mean drift*dt, variance sigma^2*dt.
double gaussian_step(RngStream& stream, double dt, const Diffusion& diffusion = {});

/// Exponential lifetime with rate law.rate().
double branch_time(RngStream& stream, const OffspringLaw& law);

int offspring_count(RngStream& stream, const OffspringLaw& law);

/// Probability that a Brownian bridge from x0 to x1 over dt dips to level.
/// Equals 1 when either endpoint is at or below the level.
double bridge_crossing_probability(double x0, double x1, double dt, double level,
                                   double sigma = 1.0);

struct BridgeHit {
  bool hit = false;
  /// Fraction of the step at which the crossing is attributed, uniform on
  /// (0, 1). Only meaningful when hit is true.
  double fraction = 0.0;
};

/// Exact crossing test for the bridge between two grid points. Always consumes
/// one uniform for the decision; a second one is drawn for the attributed
/// crossing time when want_time is set and the barrier was hit.
BridgeHit bridge_min_hits(RngStream& stream, double x0, double x1, double dt, double level,
                          bool want_time = false, double sigma = 1.0);

/// Bessel-3 process at time t from x: norm of a 3d Gaussian displacement.
double bessel3_sample(RngStream& stream, double x, double t);

/// Transition density of the Bessel-3 process from x to z over time t.
double bessel3_density(double x, double t, double z);

/// Distribution function of the Bessel-3 process from x at time t.
double bessel3_cdf(double x, double t, double z);

/// Density of Brownian motion started at x and killed at 0, at y after time r.
double killed_bm_density(double r, double x, double y);

/// Standard normal density and distribution functions.
double normal_pdf(double x);
double normal_cdf(double x);

}  // namespace bbmlab
