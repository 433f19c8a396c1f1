#include "bbmlab/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <sstream>

#include "bbmlab/error.hpp"

namespace bbmlab {

namespace {

double parse_number(const std::string& text, const std::string& key) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size() || !std::isfinite(value)) {
    throw invalid_argument("functional '" + key + "': cannot parse parameter '" + text + "'");
  }
  return value;
}

std::string format_number(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

FunctionalSpec make_exp(const std::string& key, double theta) {
  FunctionalSpec s;
  s.key = key;
  s.f = [theta](double x) { return std::exp(theta * x); };
  s.df = [theta](double x) { return theta * std::exp(theta * x); };
  s.d2f = [theta](double x) { return theta * theta * std::exp(theta * x); };
  s.kappa = std::max(1.0, std::abs(theta));
  s.flags = {true, true, true, true, true};
  return s;
}

FunctionalSpec make_pow_neg(const std::string& key, double a) {
  if (!(a > 0.0 && a < 3.0)) {
    throw invalid_argument("functional '" + key + "': exponent must lie in (0, 3)");
  }
  FunctionalSpec s;
  s.key = key;
  s.f = [a](double x) { return std::pow(x, -a); };
  s.df = [a](double x) { return -a * std::pow(x, -a - 1.0); };
  s.d2f = [a](double x) { return a * (a + 1.0) * std::pow(x, -a - 2.0); };
  s.alpha = a;
  s.bound_constant = std::max(1.0, a * (a + 1.0));
  s.flags = {false, false, a < 2.0, a < 2.0, a < 2.0};
  return s;
}

constexpr double kSqrt2OverPi = 0.7978845608028654;

double bessel_weight(double z) { return kSqrt2OverPi * z * z * std::exp(-0.5 * z * z); }

std::vector<double> log_grid() {
  std::vector<double> grid;
  const int n = 400;
  for (int i = 0; i <= n; ++i) grid.push_back(std::pow(10.0, -6.0 + 8.0 * i / n));
  return grid;
}

}  // namespace

FunctionalSpec functional_from_key(const std::string& key) {
  if (key == "one") {
    FunctionalSpec s;
    s.key = key;
    s.f = [](double) { return 1.0; };
    s.df = [](double) { return 0.0; };
    s.d2f = [](double) { return 0.0; };
    s.flags = {true, true, true, true, true};
    return s;
  }
  if (key == "x") {
    FunctionalSpec s;
    s.key = key;
    s.f = [](double x) { return x; };
    s.df = [](double) { return 1.0; };
    s.d2f = [](double) { return 0.0; };
    s.flags = {true, true, true, true, true};
    return s;
  }
  if (key == "x2") {
    FunctionalSpec s;
    s.key = key;
    s.f = [](double x) { return x * x; };
    s.df = [](double x) { return 2.0 * x; };
    s.d2f = [](double) { return 2.0; };
    s.bound_constant = 2.0;
    s.flags = {true, true, true, true, true};
    return s;
  }
  if (key == "exp_neg") return make_exp(key, -1.0);
  if (key == "exp_half") return make_exp(key, 0.5);
  if (key.rfind("exp:", 0) == 0) return make_exp(key, parse_number(key.substr(4), key));
  if (key == "inv_x") return make_pow_neg(key, 1.0);
  if (key.rfind("pow_neg:", 0) == 0) return make_pow_neg(key, parse_number(key.substr(8), key));
  if (key.rfind("G:", 0) == 0) {
    const FunctionalSpec base = functional_from_key(key.substr(2));
    const double m0 = expected_bessel_value(base).value;
    FunctionalSpec squared = base;
    squared.f = [f = base.f](double z) { return z * z * f(z); };
    const double m2 = expected_bessel_value(squared).value;
    // G(x) = m0 (3/2 - x^2/2) + m2 (x^2/6 - 1/2) = A + B x^2
    const double A = 1.5 * m0 - 0.5 * m2;
    const double B = m2 / 6.0 - 0.5 * m0;
    FunctionalSpec s;
    s.key = key;
    s.f = [A, B](double x) { return A + B * x * x; };
    s.df = [B](double x) { return 2.0 * B * x; };
    s.d2f = [B](double) { return 2.0 * B; };
    s.bound_constant = 1.0 + std::abs(A) + 2.0 * std::abs(B);
    s.flags = {false, false, true, true, true};
    return s;
  }
  throw invalid_argument("unknown functional key '" + key + "' (known: one, x, x2, exp:<theta>, " +
                         "exp_neg, exp_half, pow_neg:<a>, inv_x, G:<key>)");
}

std::vector<std::string> catalog_keys() {
  return {"one",         "x",          "x2",    "exp_neg",   "exp_half",   "pow_neg:0.5",
          "inv_x",       "pow_neg:1.5", "G:one", "G:x",       "G:x2",       "G:exp_neg"};
}

FunctionalSpec functional_from_pieces(std::string key, std::vector<PiecewiseTerm> pieces,
                                      double alpha, double kappa, double bound_constant,
                                      AssumptionFlags flags) {
  if (pieces.empty()) throw invalid_argument("functional '" + key + "': no pieces given");
  std::sort(pieces.begin(), pieces.end(),
            [](const PiecewiseTerm& a, const PiecewiseTerm& b) { return a.from < b.from; });
  for (const auto& p : pieces) {
    if (p.coeffs.empty()) throw invalid_argument("functional '" + key + "': piece without coefficients");
    if (!std::isfinite(p.from) || !std::isfinite(p.rate)) {
      throw invalid_argument("functional '" + key + "': non-finite piece parameter");
    }
  }
  auto shared = std::make_shared<const std::vector<PiecewiseTerm>>(std::move(pieces));
  auto locate = [shared](double x) -> const PiecewiseTerm& {
    const auto& ps = *shared;
    auto it = std::upper_bound(ps.begin(), ps.end(), x,
                               [](double v, const PiecewiseTerm& p) { return v < p.from; });
    return it == ps.begin() ? ps.front() : *(it - 1);
  };
  // Value and first two derivatives of p(x) e^{r x}.
  auto eval = [locate](double x, int order) {
    const PiecewiseTerm& p = locate(x);
    double v = 0.0, dv = 0.0, d2v = 0.0;
    for (std::size_t k = p.coeffs.size(); k-- > 0;) {
      d2v = d2v * x + 2.0 * dv;
      dv = dv * x + v;
      v = v * x + p.coeffs[k];
    }
    const double e = std::exp(p.rate * x);
    const double r = p.rate;
    if (order == 0) return v * e;
    if (order == 1) return (dv + r * v) * e;
    return (d2v + 2.0 * r * dv + r * r * v) * e;
  };
  FunctionalSpec s;
  s.key = std::move(key);
  s.f = [eval](double x) { return eval(x, 0); };
  s.df = [eval](double x) { return eval(x, 1); };
  s.d2f = [eval](double x) { return eval(x, 2); };
  s.alpha = alpha;
  s.kappa = kappa;
  s.bound_constant = bound_constant;
  s.flags = flags;
  return s;
}

FunctionalSpec linear_combination(double a, const FunctionalSpec& f, double b,
                                  const FunctionalSpec& g) {
  FunctionalSpec s;
  s.key = format_number(a) + "*" + f.key + "+" + format_number(b) + "*" + g.key;
  s.f = [a, b, ff = f.f, gf = g.f](double x) { return a * ff(x) + b * gf(x); };
  if (f.df && g.df) s.df = [a, b, ff = f.df, gf = g.df](double x) { return a * ff(x) + b * gf(x); };
  if (f.d2f && g.d2f) s.d2f = [a, b, ff = f.d2f, gf = g.d2f](double x) { return a * ff(x) + b * gf(x); };
  s.alpha = std::max(f.alpha, g.alpha);
  s.kappa = std::max(f.kappa, g.kappa);
  s.bound_constant = std::abs(a) * f.bound_constant + std::abs(b) * g.bound_constant;
  s.flags = {false, false, f.flags.h1 && g.flags.h1, f.flags.h2 && g.flags.h2 && s.df != nullptr,
             f.flags.h3 && g.flags.h3 && s.d2f != nullptr};
  return s;
}

std::vector<std::string> check_assumptions(const FunctionalSpec& spec) {
  std::vector<std::string> warnings;
  const auto grid = log_grid();
  const double slack = 1e-12;
  auto exceeds = [&](double value, double bound) { return std::abs(value) > bound * (1.0 + slack) + slack; };
  auto report = [&](const char* flag, double x) {
    warnings.push_back(spec.key + ": claimed " + flag + " bound fails at x = " + format_number(x));
  };
  if (spec.flags.a1) {
    for (double x : grid) {
      if (exceeds(spec.f(x), std::exp(spec.kappa * x))) { report("A1", x); break; }
    }
  }
  if (spec.flags.a2) {
    bool bad = false;
    for (std::size_t i = 1; i < grid.size() && !bad; ++i) {
      for (std::size_t j = (i > 8 ? i - 8 : 0); j < i && !bad; ++j) {
        const double x = grid[i], y = grid[j];
        if (exceeds(spec.f(x) - spec.f(y), (x - y) * std::exp(spec.kappa * x))) { report("A2", x); bad = true; }
      }
    }
  }
  const RealFn* derivs[3] = {&spec.f, &spec.df, &spec.d2f};
  const bool claims[3] = {spec.flags.h1, spec.flags.h2, spec.flags.h3};
  const char* names[3] = {"H1", "H2", "H3"};
  for (int j = 0; j < 3; ++j) {
    if (!claims[j]) continue;
    if (!*derivs[j]) {
      warnings.push_back(spec.key + ": claims " + names[j] + " but no derivative is available");
      continue;
    }
    for (double x : grid) {
      const double bound = spec.bound_constant * std::pow(x, -spec.alpha - j) * std::exp(spec.kappa * x);
      if (exceeds((*derivs[j])(x), bound)) { report(names[j], x); break; }
    }
  }
  return warnings;
}

QuadResult expected_bessel_value(const FunctionalSpec& spec) {
  if (spec.alpha >= 3.0) {
    throw invalid_argument("functional '" + spec.key + "': E[F(R_1)] diverges for alpha >= 3");
  }
  QuadOptions opts;
  opts.abs_tol = 1e-14;
  opts.rel_tol = 1e-12;
  QuadResult r = integrate_positive_axis(
      [&](double z) {
        const double w = bessel_weight(z);
        return w == 0.0 ? 0.0 : spec.f(z) * w;
      },
      opts);
  if (!std::isfinite(r.value) || !std::isfinite(r.error) || r.error > 1e-9 * std::max(1.0, std::abs(r.value))) {
    throw invalid_argument("functional '" + spec.key + "' is not integrable against the Bessel-3 law " +
                           "(estimate " + format_number(r.value) + ", error " + format_number(r.error) + ")");
  }
  return r;
}

double eval_additive(const PopulationSnapshot& snap) {
  double s = 0.0;
  for (const auto& p : snap.particles) s += std::exp(-p.position);
  return s;
}

double eval_derivative(const PopulationSnapshot& snap) {
  double s = 0.0;
  for (const auto& p : snap.particles) s += p.position * std::exp(-p.position);
  return s;
}

namespace {

double gibbs_term(const SnapshotEntry& p, const FunctionalSpec& spec, double delta, double root_t,
                  double offset) {
  const double d = p.position - delta;
  if (!(d > 0.0)) return 0.0;
  const double value = spec.f(d / root_t);
  if (!std::isfinite(value)) {
    throw invalid_argument("functional '" + spec.key + "' is not finite for particle " +
                           std::to_string(p.id) + " at position " + format_number(p.position));
  }
  return d * std::exp(-p.position) * (value - offset);
}

void require_scale(double scale_t) {
  if (!(scale_t > 0.0) || !std::isfinite(scale_t)) {
    throw invalid_argument("scale time must be positive and finite");
  }
}

}  // namespace

double eval_gibbs(const PopulationSnapshot& snap, const FunctionalSpec& spec, double delta,
                  double scale_t) {
  require_scale(scale_t);
  const double root_t = std::sqrt(scale_t);
  double s = 0.0;
  for (const auto& p : snap.particles) s += gibbs_term(p, spec, delta, root_t, 0.0);
  return s;
}

double eval_front(const PopulationSnapshot& snap, const FunctionalSpec& spec, double scale_t) {
  if (spec.alpha > 0.0) return eval_gibbs(snap, spec, 0.0, scale_t);
  require_scale(scale_t);
  const double root_t = std::sqrt(scale_t);
  double s = 0.0;
  for (const auto& p : snap.particles) {
    const double value = spec.f(p.position / root_t);
    if (!std::isfinite(value)) {
      throw invalid_argument("functional '" + spec.key + "' is not finite for particle " +
                             std::to_string(p.id) + " at position " + format_number(p.position));
    }
    s += p.position * std::exp(-p.position) * value;
  }
  return s;
}

double eval_killed(const RunResult& run, const PopulationSnapshot& snap, const FunctionalSpec& spec,
                   double delta, double scale_t, const BarrierSpec& barrier) {
  if (!run.barrier || !(*run.barrier == barrier)) {
    throw invalid_argument("eval_killed: the run was not simulated with the requested barrier");
  }
  require_scale(scale_t);
  const double root_t = std::sqrt(scale_t);
  double s = 0.0;
  for (const auto& p : snap.particles) {
    if (p.tag < 0) s += gibbs_term(p, spec, delta, root_t, 0.0);
  }
  return s;
}

std::vector<double> eval_contributions(const RunResult& run, const PopulationSnapshot& snap,
                                       const FunctionalSpec& spec, double gamma, double scale_t,
                                       double mean_f) {
  if (!run.continue_killed) {
    throw invalid_argument("eval_contributions: the run froze killed particles; "
                           "simulate with continue_killed to keep their progeny");
  }
  require_scale(scale_t);
  const double root_t = std::sqrt(scale_t);
  std::vector<double> omega(run.stopping_line.size(), 0.0);
  for (const auto& p : snap.particles) {
    if (p.tag < 0) continue;
    if (static_cast<std::size_t>(p.tag) >= omega.size()) {
      throw invalid_argument("eval_contributions: particle " + std::to_string(p.id) +
                             " carries an unknown lineage tag");
    }
    omega[static_cast<std::size_t>(p.tag)] += gibbs_term(p, spec, gamma, root_t, mean_f);
  }
  return omega;
}

}  // namespace bbmlab
