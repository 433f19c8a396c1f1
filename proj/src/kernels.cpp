#include "bbmlab/kernels.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "bbmlab/error.hpp"

namespace bbmlab {

namespace {

constexpr double kInvSqrt2Pi = 0.3989422804014326779399460599343819;

void require_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw invalid_argument(std::string(name) + " must be positive and finite, got " +
                           std::to_string(value));
  }
}

}  // namespace

OffspringLaw::OffspringLaw(std::vector<double> pmf) : pmf_(std::move(pmf)) {
  double total = 0.0;
  for (double p : pmf_) {
    if (!(p >= 0.0) || !std::isfinite(p)) throw invalid_argument("offspring pmf entries must be >= 0");
    total += p;
  }
  if (!(total > 0.0)) throw invalid_argument("offspring pmf has zero mass");
  cdf_.reserve(pmf_.size());
  double acc = 0.0;
  int support_size = 0;
  for (std::size_t k = 0; k < pmf_.size(); ++k) {
    pmf_[k] /= total;
    acc += pmf_[k];
    cdf_.push_back(acc);
    mean_ += static_cast<double>(k) * pmf_[k];
    second_moment_ += static_cast<double>(k * k) * pmf_[k];
    if (pmf_[k] > 0.0) {
      ++support_size;
      deterministic_ = static_cast<int>(k);
    }
  }
  cdf_.back() = 1.0;
  if (support_size != 1) deterministic_.reset();
  if (!(mean_ > 1.0)) {
    throw invalid_argument("offspring law must be supercritical (E[L] > 1), got E[L] = " +
                           std::to_string(mean_));
  }
}

OffspringLaw OffspringLaw::from_map(const std::map<int, double>& pmf) {
  if (pmf.empty()) throw invalid_argument("offspring pmf is empty");
  if (pmf.begin()->first < 0) throw invalid_argument("offspring counts must be >= 0");
  std::vector<double> dense(static_cast<std::size_t>(pmf.rbegin()->first) + 1, 0.0);
  for (const auto& [k, p] : pmf) dense[static_cast<std::size_t>(k)] = p;
  return OffspringLaw(std::move(dense));
}

double gaussian_step(RngStream& stream, double dt, const Diffusion& diffusion) {
  require_positive(dt, "dt");
  return diffusion.drift * dt + diffusion.sigma * std::sqrt(dt) * stream.normal();
}

double branch_time(RngStream& stream, const OffspringLaw& law) {
  return stream.exponential(law.rate());
}

int offspring_count(RngStream& stream, const OffspringLaw& law) {
  if (law.deterministic_) return *law.deterministic_;
  const double u = stream.uniform();
  std::size_t k = 0;
  while (k + 1 < law.cdf_.size() && u > law.cdf_[k]) ++k;
  return static_cast<int>(k);
}

double bridge_crossing_probability(double x0, double x1, double dt, double level, double sigma) {
  const double d0 = x0 - level;
  const double d1 = x1 - level;
  if (d0 <= 0.0 || d1 <= 0.0) return 1.0;
  return std::exp(-2.0 * d0 * d1 / (sigma * sigma * dt));
}

BridgeHit bridge_min_hits(RngStream& stream, double x0, double x1, double dt, double level,
                          bool want_time, double sigma) {
  require_positive(dt, "dt");
  const double u = stream.uniform();
  BridgeHit out;
  out.hit = u < bridge_crossing_probability(x0, x1, dt, level, sigma);
  if (out.hit && want_time) out.fraction = stream.uniform();
  return out;
}

double bessel3_sample(RngStream& stream, double x, double t) {
  require_positive(t, "t");
  if (x < 0.0) throw invalid_argument("Bessel-3 start point must be >= 0");
  const double s = std::sqrt(t);
  const double a = x + s * stream.normal();
  const double b = s * stream.normal();
  const double c = s * stream.normal();
  return std::sqrt(a * a + b * b + c * c);
}

double bessel3_density(double x, double t, double z) {
  require_positive(t, "t");
  if (x < 0.0 || z < 0.0 || !std::isfinite(z)) {
    throw invalid_argument("Bessel-3 density needs x >= 0 and z >= 0");
  }
  // Unit-time forms, rescaled diffusively.
  const double s = std::sqrt(t);
  const double xs = x / s;
  const double zs = z / s;
  double unit;
  if (xs == 0.0) {
    unit = std::sqrt(2.0 / std::numbers::pi) * zs * zs * std::exp(-0.5 * zs * zs);
  } else {
    // (z/x) phi(z-x) (1 - e^{-2zx}), with expm1 keeping small x accurate.
    const double diff = zs - xs;
    unit = (zs / xs) * kInvSqrt2Pi * std::exp(-0.5 * diff * diff) * -std::expm1(-2.0 * zs * xs);
  }
  return unit / s;
}

double bessel3_cdf(double x, double t, double z) {
  require_positive(t, "t");
  if (z <= 0.0) return 0.0;
  const double s = std::sqrt(t);
  const double xs = x / s;
  const double zs = z / s;
  if (xs == 0.0) {
    return std::erf(zs / std::numbers::sqrt2) -
           std::sqrt(2.0 / std::numbers::pi) * zs * std::exp(-0.5 * zs * zs);
  }
  return normal_cdf(zs - xs) + normal_cdf(zs + xs) - 1.0 -
         (normal_pdf(zs - xs) - normal_pdf(zs + xs)) / xs;
}

double killed_bm_density(double r, double x, double y) {
  require_positive(r, "r");
  require_positive(x, "x");
  require_positive(y, "y");
  const double a = (x - y) * (x - y) / (2.0 * r);
  // e^{-a} - e^{-a - 2xy/r} = e^{-a} (1 - e^{-2xy/r})
  return kInvSqrt2Pi / std::sqrt(r) * std::exp(-a) * -std::expm1(-2.0 * x * y / r);
}

double normal_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

}  // namespace bbmlab
