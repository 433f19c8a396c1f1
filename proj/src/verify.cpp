#include "bbmlab/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>

#include "bbmlab/engine.hpp"
#include "bbmlab/ensemble.hpp"
#include "bbmlab/error.hpp"
#include "bbmlab/functionals.hpp"
#include "bbmlab/kernels.hpp"
#include "bbmlab/limits.hpp"
#include "bbmlab/rng.hpp"
#include "bbmlab/stats.hpp"

namespace bbmlab {

namespace {

constexpr double kSqrt2OverPi = 0.7978845608028654;

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

std::string label(const std::string& base, const std::string& key, double value) {
  return base + " " + key + "=" + fmt(value);
}

Verdict within(std::string check, double observed, double predicted, double tolerance,
               std::string note = {}) {
  return {std::move(check), observed, predicted, tolerance,
          std::abs(observed - predicted) <= tolerance, std::move(note)};
}

Verdict at_most(std::string check, double observed, double bound, double tolerance,
                std::string note = {}) {
  return {std::move(check), observed, bound, tolerance, observed <= bound + tolerance, std::move(note)};
}

Verdict at_least(std::string check, double observed, double bound, std::string note = {}) {
  return {std::move(check), observed, bound, 0.0, observed >= bound, std::move(note)};
}

std::size_t pick(std::size_t requested, std::size_t fallback) { return requested > 0 ? requested : fallback; }
double pick(double requested, double fallback) { return requested > 0.0 ? requested : fallback; }

double joint_se(double a, double b) { return std::sqrt(a * a + b * b); }

EngineConfig base_engine(const SuiteOptions& o) {
  EngineConfig e;
  e.dt = o.dt;
  return e;
}

// ---------------------------------------------------------------- normalization

std::vector<Verdict> suite_normalization(const SuiteOptions& o) {
  const std::vector<double> times = o.t > 0.0 ? std::vector<double>{o.t} : std::vector<double>{1.0, 5.0, 10.0};
  const std::size_t reps = pick(o.reps, 10000);
  EngineConfig base = base_engine(o);
  base.horizon = *std::max_element(times.begin(), times.end());
  base.snapshot_times = times;
  const std::size_t k = times.size();
  std::vector<double> w(reps * k), z(reps * k), q(reps * k);
  run_replicates(reps, o.seed, o.workers, [&](std::size_t rep, std::uint64_t seed) {
    EngineConfig e = base;
    e.seed = seed;
    const RunResult run = evolve(e);
    for (std::size_t i = 0; i < k; ++i) {
      double sw = 0.0, sz = 0.0, sq = 0.0;
      for (const auto& p : snapshot_at(run, times[i]).particles) {
        const double x = p.position, ex = std::exp(-x);
        sw += ex;
        sz += x * ex;
        sq += x * x * ex;
      }
      w[rep * k + i] = sw;
      z[rep * k + i] = sz;
      q[rep * k + i] = sq;
    }
  });
  std::vector<Verdict> out;
  for (std::size_t i = 0; i < k; ++i) {
    std::vector<double> a, b, c;
    for (std::size_t rep = 0; rep < reps; ++rep) {
      a.push_back(w[rep * k + i]);
      b.push_back(z[rep * k + i]);
      c.push_back(q[rep * k + i]);
    }
    const auto ma = mean_se(a), mb = mean_se(b), mc = mean_se(c);
    out.push_back(within(label("normalization sum e^-X", "t", times[i]), ma.mean, 1.0, 3.0 * ma.standard_error));
    out.push_back(within(label("normalization sum X e^-X", "t", times[i]), mb.mean, 0.0, 3.0 * mb.standard_error));
    out.push_back(within(label("normalization sum X^2 e^-X", "t", times[i]), mc.mean, times[i], 3.0 * mc.standard_error));
  }
  return out;
}

// ---------------------------------------------------------------- many-to-one

std::vector<Verdict> suite_many_to_one(const SuiteOptions& o) {
  const std::vector<double> times = o.t > 0.0 ? std::vector<double>{o.t} : std::vector<double>{1.0, 4.0};
  const std::size_t reps = pick(o.reps, 10000);
  const std::size_t k = times.size();
  auto phi = [](double x) { return std::exp(-x * x); };

  // Free system started at 0 against E[phi(B_t)] for a standard Brownian motion.
  EngineConfig free_cfg = base_engine(o);
  free_cfg.horizon = *std::max_element(times.begin(), times.end());
  free_cfg.snapshot_times = times;
  std::vector<double> lhs(reps * k), rhs(reps * k);
  run_replicates(reps, o.seed, o.workers, [&](std::size_t rep, std::uint64_t seed) {
    EngineConfig e = free_cfg;
    e.seed = seed;
    const RunResult run = evolve(e);
    RngStream bm(seed, 0x4d2f1a7bu);
    for (std::size_t i = 0; i < k; ++i) {
      double s = 0.0;
      for (const auto& p : snapshot_at(run, times[i]).particles) s += std::exp(-p.position) * phi(p.position);
      lhs[rep * k + i] = s;
      rhs[rep * k + i] = phi(std::sqrt(times[i]) * bm.normal());
    }
  });

  // Killed at 0 from x = 2 against x e^{-x} E_x[phi(R_t) / R_t].
  const double x0 = 2.0;
  EngineConfig killed_cfg = free_cfg;
  killed_cfg.start = x0;
  killed_cfg.barrier = BarrierSpec{0.0, 0.0, kInfinity};
  std::vector<double> killed(reps * k);
  run_replicates(reps, o.seed ^ 0x9e3779b97f4a7c15ull, o.workers, [&](std::size_t rep, std::uint64_t seed) {
    EngineConfig e = killed_cfg;
    e.seed = seed;
    const RunResult run = evolve(e);
    for (std::size_t i = 0; i < k; ++i) {
      double s = 0.0;
      for (const auto& p : snapshot_at(run, times[i]).particles) {
        if (p.tag < 0) s += std::exp(-p.position) * phi(p.position);
      }
      killed[rep * k + i] = s;
    }
  });

  FunctionalSpec ratio;
  ratio.key = "phi/x";
  ratio.f = [phi](double z) { return phi(z) / z; };
  ratio.alpha = 1.0;

  std::vector<Verdict> out;
  for (std::size_t i = 0; i < k; ++i) {
    std::vector<double> a, b, c;
    for (std::size_t rep = 0; rep < reps; ++rep) {
      a.push_back(lhs[rep * k + i]);
      b.push_back(rhs[rep * k + i]);
      c.push_back(killed[rep * k + i]);
    }
    const auto ma = mean_se(a), mb = mean_se(b), mc = mean_se(c);
    const double exact = 1.0 / std::sqrt(1.0 + 2.0 * times[i]);
    out.push_back(within(label("many-to-one free", "t", times[i]), ma.mean, mb.mean,
                         3.0 * joint_se(ma.standard_error, mb.standard_error),
                         "closed form E[exp(-B_t^2)] = " + fmt(exact)));
    const double bessel = x0 * std::exp(-x0) * bessel_expectation(ratio, x0, times[i]).value;
    out.push_back(within(label("many-to-one killed at 0 from x=2", "t", times[i]), mc.mean, bessel,
                         3.0 * mc.standard_error, "right side by Bessel-3 quadrature"));
  }
  return out;
}

// ---------------------------------------------------------------- stopping line

struct StoppingLineData {
  std::vector<double> count;     // completed #L
  std::vector<double> window;    // kills in [1, 2]
  std::vector<double> tail;      // completed #L_[s, inf)
  std::vector<double> times;     // observed kill times
  std::vector<double> per_rep;   // kills observed per replicate (for clustering)
};

// Each particle still alive at the horizon or pruned at (tau, y) contributes
// its conditional expectation of future kills after time s:
// e^{-y} P(T >= s - tau) = e^{-y} erf(y / sqrt(2 (s - tau))) for tau < s.
double completion(double y, double tau, double s) {
  if (y <= 0.0) return 0.0;
  const double mass = std::exp(-y);
  if (tau >= s) return mass;
  return mass * std::erf(y / std::sqrt(2.0 * (s - tau)));
}

StoppingLineData simulate_stopping_line(const SuiteOptions& o, double x0, double horizon, double tail_from,
                                        std::size_t reps, std::uint64_t seed_salt) {
  EngineConfig base = base_engine(o);
  base.start = x0;
  base.horizon = horizon;
  base.snapshot_times = {horizon};
  base.barrier = BarrierSpec{0.0, 0.0, kInfinity};
  base.record_pruned = true;
  StoppingLineData d;
  d.count.resize(reps);
  d.window.resize(reps);
  d.tail.resize(reps);
  d.per_rep.resize(reps);
  std::vector<std::vector<double>> times(reps);
  run_replicates(reps, o.seed ^ seed_salt, o.workers, [&](std::size_t rep, std::uint64_t seed) {
    EngineConfig e = base;
    e.seed = seed;
    const RunResult run = evolve(e);
    double count = 0.0, window = 0.0, tail = 0.0;
    for (const auto& r : run.stopping_line) {
      count += 1.0;
      if (r.time >= 1.0 && r.time <= 2.0) window += 1.0;
      if (r.time >= tail_from) tail += 1.0;
      times[rep].push_back(r.time);
    }
    for (const auto& p : snapshot_at(run, horizon).particles) {
      if (p.tag >= 0) continue;
      count += std::exp(-p.position);
      tail += completion(p.position, horizon, tail_from);
    }
    for (const auto& p : run.pruned) {
      if (p.tag >= 0) continue;
      count += std::exp(-p.position);
      tail += completion(p.position, p.time, tail_from);
    }
    d.count[rep] = count;
    d.window[rep] = window;
    d.tail[rep] = tail;
    d.per_rep[rep] = static_cast<double>(run.stopping_line.size());
  });
  for (auto& v : times) d.times.insert(d.times.end(), v.begin(), v.end());
  return d;
}

std::vector<Verdict> suite_stopping_line(const SuiteOptions& o) {
  const double horizon = pick(o.t, 10.0);
  const std::size_t reps = pick(o.reps, 10000);
  std::vector<Verdict> out = stopping_line_study(o, 1.0, 4.0, horizon, reps).verdicts;
  const double x3 = 3.0;
  const StoppingLineData d3 = simulate_stopping_line(o, x3, horizon, 4.0, reps, 0x5733ull);
  const auto m3 = mean_se(d3.count);
  out.push_back(within("stopping line E_3[#L] = e^-3", m3.mean, std::exp(-x3), 3.0 * m3.standard_error));
  return out;
}

// ---------------------------------------------------------------- global minimum

std::vector<Verdict> suite_global_min(const SuiteOptions& o) {
  const std::size_t reps = pick(o.reps, 10000);
  const double horizon = pick(o.t, 10.0);
  std::vector<Verdict> out;
  for (double m : {2.0, 3.0}) {
    EngineConfig base = base_engine(o);
    base.horizon = horizon;
    base.floor = -m;
    base.stop_at_floor = true;
    std::vector<double> hit(reps);
    run_replicates(reps, o.seed ^ static_cast<std::uint64_t>(m * 1000), o.workers,
                   [&](std::size_t rep, std::uint64_t seed) {
                     EngineConfig e = base;
                     e.seed = seed;
                     hit[rep] = evolve(e).stats.floor_hits > 0 ? 1.0 : 0.0;
                   });
    const auto mh = mean_se(hit);
    out.push_back(at_most(label("global minimum P(min <= -M) <= e^-M", "M", m), mh.mean, std::exp(-m),
                          3.0 * mh.standard_error,
                          "observed on [0, " + fmt(horizon) + "], a lower bound for the all-time event"));
  }
  return out;
}

// ---------------------------------------------------------------- quadrature suites

std::vector<Verdict> suite_appendix(const SuiteOptions&) {
  std::vector<Verdict> out;
  for (const auto& key : catalog_keys()) {
    const FunctionalSpec f = functional_from_key(key);
    if (!f.flags.h_class()) continue;
    const auto warnings = check_assumptions(f);
    if (!warnings.empty()) continue;
    const IdentityGap g = appendix_identity_gap(f);
    out.push_back(at_most("closed-form identity gap " + key, g.gap, 0.0, 1e-6,
                          "lhs " + fmt(g.lhs) + ", rhs " + fmt(g.rhs)));
  }
  return out;
}

std::vector<Verdict> suite_cauchy(const SuiteOptions&) {
  const FunctionalSpec f = functional_from_key("inv_x");
  const StableLawParams full = prop_constants(f, 0.0, CfRange::Full);
  const StableLawParams shifted = prop_constants(f, 1.0, CfRange::Full);
  const StableLawParams unit = prop_constants(f, 0.0, CfRange::Unit);
  const double drift = 2.0 * std::log(2.0) / std::numbers::pi;
  std::vector<Verdict> out;
  out.push_back(within("cauchy scale for F=1/x", full.c2, 2.0, 1e-6));
  out.push_back(within("cauchy drift constant for F=1/x", -full.c3, drift, 1e-6));
  out.push_back(within("cauchy log|lambda| coefficient for F=1/x", full.c1, 0.0, 1e-8));
  out.push_back(within("cauchy mu_Z term cancels", shifted.c3 - full.c3, 0.0, 1e-8));
  out.push_back(within("log t coefficient for F=1/x", logt_coefficient(f).value, 0.0, 1e-8));
  out.push_back(within("unit-range c1 for F=1/x", unit.c1, 2.0 / std::numbers::pi, 1e-8));
  const auto cf = limit_cf(f, 1.0, 1.0, CfRange::Full, 0.0);
  const auto expected = std::exp(std::complex<double>(-2.0, drift));
  out.push_back(within("cauchy limit cf at lambda=1", std::abs(cf - expected), 0.0, 1e-6));
  return out;
}

std::vector<Verdict> suite_g_expansion(const SuiteOptions&) {
  const double eps = 1e-2;
  // Below this the residual is round-off: E[F(R_1)] is O(1) and double
  // precision cannot resolve a smaller difference.
  const double floor = 1e-13;
  std::vector<Verdict> out;
  for (const char* key : {"x", "x2"}) {
    const FunctionalSpec f = functional_from_key(key);
    for (double x : {0.0, 1.0}) {
      const double r1 = expansion_residual(f, x, eps);
      const double r2 = expansion_residual(f, x, eps / 2.0);
      const std::string name = std::string("expansion Richardson ratio F=") + key + " x=" + fmt(x);
      if (r1 <= floor || r2 <= floor) {
        out.push_back({name, 0.0, 4.0, 0.5, false,
                       "residual vanishes to round-off (" + fmt(r1) + ", " + fmt(r2) +
                           "): the second-order expansion is exact for this F, so the ratio is undefined"});
      } else {
        out.push_back(within(name, r1 / r2, 4.0, 0.5, "residuals " + fmt(r1) + ", " + fmt(r2)));
      }
    }
  }
  out.push_back(at_most("expansion residual F=x x=0 <= 10 eps^2", expansion_residual(functional_from_key("x"), 0.0, eps),
                        10.0 * eps * eps, 0.0));
  out.push_back(at_most("expansion residual F=1", expansion_residual(functional_from_key("one"), 1.0, eps), 0.0, 1e-12));
  return out;
}

// ---------------------------------------------------------------- decomposition

struct DecompositionOutcome {
  double worst = 0.0;
  std::size_t runs_with_kills = 0;
  std::size_t records = 0;
};

DecompositionOutcome decomposition_runs(const SuiteOptions& o) {
  const double t = pick(o.t, 10.0);
  const std::size_t reps = pick(o.reps, 100);
  const double a = 0.7;
  const double gamma = gamma_level(t, std::log(std::log(t)));
  const BarrierSpec barrier{gamma, std::pow(t, a), t};
  EngineConfig base = base_engine(o);
  base.horizon = t;
  base.snapshot_times = {t};
  base.barrier = barrier;
  base.continue_killed = true;

  std::vector<FunctionalSpec> fs;
  std::vector<double> means;
  for (const char* key : {"exp_neg", "x2", "inv_x"}) {
    fs.push_back(functional_from_key(key));
    means.push_back(expected_bessel_value(fs.back()).value);
  }
  const FunctionalSpec one = functional_from_key("one");
  std::vector<double> worst(reps, 0.0), kills(reps, 0.0);
  run_replicates(reps, o.seed ^ 0xdec0ull, o.workers, [&](std::size_t rep, std::uint64_t seed) {
    EngineConfig e = base;
    e.seed = seed;
    const RunResult run = evolve(e);
    const auto& snap = snapshot_at(run, t);
    for (std::size_t i = 0; i < fs.size(); ++i) {
      const FunctionalSpec centered = linear_combination(1.0, fs[i], -means[i], one);
      const double lhs = eval_gibbs(snap, fs[i], gamma, t) - means[i] * eval_gibbs(snap, one, gamma, t);
      double rhs = eval_killed(run, snap, centered, gamma, t, barrier);
      for (double w : eval_contributions(run, snap, fs[i], gamma, t, means[i])) rhs += w;
      worst[rep] = std::max(worst[rep], std::abs(lhs - rhs));
    }
    kills[rep] = static_cast<double>(run.stopping_line.size());
  });
  DecompositionOutcome out;
  for (std::size_t rep = 0; rep < reps; ++rep) {
    out.worst = std::max(out.worst, worst[rep]);
    if (kills[rep] > 0) ++out.runs_with_kills;
    out.records += static_cast<std::size_t>(kills[rep]);
  }
  return out;
}

std::vector<Verdict> suite_decomposition(const SuiteOptions& o) {
  const DecompositionOutcome d = decomposition_runs(o);
  std::vector<Verdict> out;
  out.push_back(at_most("decomposition identity max residual", d.worst, 0.0, 1e-10,
                        std::to_string(d.records) + " stopping-line records over all runs"));
  out.push_back(at_least("decomposition runs with a nonempty stopping line",
                         static_cast<double>(d.runs_with_kills), 1.0));
  return out;
}

std::vector<Verdict> suite_contributions(const SuiteOptions& o) {
  const double t = pick(o.t, 10.0);
  const std::size_t reps = pick(o.reps, 300);
  const double gamma = gamma_level(t, std::log(std::log(t)));
  const BarrierSpec barrier{gamma, std::pow(t, 0.7), t};
  const FunctionalSpec f = functional_from_key("exp_neg");
  const double mean_f = expected_bessel_value(f).value;
  const FunctionalSpec centered = linear_combination(1.0, f, -mean_f, functional_from_key("one"));

  EngineConfig base = base_engine(o);
  base.horizon = t;
  base.snapshot_times = {t};
  base.barrier = barrier;
  base.continue_killed = true;
  std::vector<std::vector<std::pair<double, double>>> per_rep(reps);  // (T_u, e^gamma Omega)
  run_replicates(reps, o.seed ^ 0xc0ffeeull, o.workers, [&](std::size_t rep, std::uint64_t seed) {
    EngineConfig e = base;
    e.seed = seed;
    const RunResult run = evolve(e);
    const auto omega = eval_contributions(run, snapshot_at(run, t), f, gamma, t, mean_f);
    for (std::size_t i = 0; i < omega.size(); ++i) {
      const auto& r = run.stopping_line[i];
      if (r.at_window_start || r.time >= t) continue;
      per_rep[rep].push_back({r.time, std::exp(gamma) * omega[i]});
    }
  });
  std::vector<std::pair<double, double>> records;
  for (auto& v : per_rep) records.insert(records.end(), v.begin(), v.end());
  if (records.size() < 20) {
    return {{"contribution law two-sample KS p-value", 0.0, 0.01, 0.0, false,
             "only " + std::to_string(records.size()) + " stopping-line records"}};
  }
  std::vector<double> fresh(records.size());
  EngineConfig free_cfg = base_engine(o);
  run_replicates(records.size(), o.seed ^ 0xfeedull, o.workers, [&](std::size_t i, std::uint64_t seed) {
    EngineConfig e = free_cfg;
    e.seed = seed;
    e.horizon = t - records[i].first;
    e.snapshot_times = {e.horizon};
    const RunResult run = evolve(e);
    fresh[i] = eval_gibbs(snapshot_at(run, e.horizon), centered, 0.0, t);
  });
  std::vector<double> observed;
  for (const auto& r : records) observed.push_back(r.second);
  const KsResult ks = ks_two_sample(observed, fresh);
  return {at_least("contribution law two-sample KS p-value", ks.p_value, 0.01,
                   "D = " + fmt(ks.statistic) + ", records = " + std::to_string(records.size()))};
}

// ---------------------------------------------------------------- Bessel

std::vector<Verdict> suite_bessel(const SuiteOptions& o) {
  const std::size_t n = pick(o.reps, 100000);
  std::vector<Verdict> out;
  const std::pair<double, double> settings[] = {{0.0, 1.0}, {2.0, 1.0}, {1.0, 4.0}};
  std::uint64_t stream = 1;
  for (const auto& [x, t] : settings) {
    RngStream rng(o.seed, 0xbe55e1ull + stream++);
    std::vector<double> samples(n);
    for (auto& v : samples) v = bessel3_sample(rng, x, t);
    const KsResult ks = ks_one_sample(samples, [&](double z) { return bessel3_cdf(x, t, z); });
    out.push_back(at_least("Bessel-3 sampler vs distribution KS p-value x=" + fmt(x) + " t=" + fmt(t),
                           ks.p_value, 0.01, "D = " + fmt(ks.statistic)));
  }
  return out;
}

// ---------------------------------------------------------------- dt robustness

std::vector<Verdict> suite_dt_robustness(const SuiteOptions& o) {
  std::vector<Verdict> out;
  for (double factor : {1.0, 0.25}) {
    SuiteOptions so = o;
    so.dt = o.dt * factor;
    for (const char* name : {"stopping-line", "decomposition"}) {
      for (Verdict v : run_suite(name, so)) {
        v.check = "[dt=" + fmt(so.dt) + "] " + v.check;
        out.push_back(std::move(v));
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------- Gibbs convergence

std::vector<Verdict> suite_gibbs(const SuiteOptions& o) {
  const std::size_t reps = pick(o.reps, 500);
  const double t2 = pick(o.t, 20.0), t1 = t2 / 2.0;
  EngineConfig base = base_engine(o);
  base.horizon = t2;
  base.snapshot_times = {t1, t2};
  const FunctionalSpec f = functional_from_key("exp_neg");
  const double mean_f = expected_bessel_value(f).value;
  std::vector<double> g1(reps), g2(reps), a1(reps), a2(reps);
  std::vector<bool> ok(reps, false);
  const auto status = run_replicates(reps, o.seed ^ 0x61bbull, o.workers, [&](std::size_t rep, std::uint64_t seed) {
    EngineConfig e = base;
    e.seed = seed;
    const RunResult run = evolve(e);
    const auto& s1 = snapshot_at(run, t1);
    const auto& s2 = snapshot_at(run, t2);
    g1[rep] = std::abs(eval_front(s1, f, t1) - mean_f * eval_derivative(s1));
    g2[rep] = std::abs(eval_front(s2, f, t2) - mean_f * eval_derivative(s2));
    a1[rep] = std::abs(std::sqrt(t1) * eval_additive(s1) - kSqrt2OverPi * eval_derivative(s1));
    a2[rep] = std::abs(std::sqrt(t2) * eval_additive(s2) - kSqrt2OverPi * eval_derivative(s2));
    ok[rep] = true;
  });
  auto keep = [&](const std::vector<double>& v) {
    std::vector<double> r;
    for (std::size_t i = 0; i < v.size(); ++i) if (ok[i]) r.push_back(v[i]);
    return r;
  };
  const double mg1 = median(keep(g1)), mg2 = median(keep(g2));
  const double ma1 = median(keep(a1)), ma2 = median(keep(a2));
  std::size_t failed = 0;
  for (const auto& s : status) failed += s.ok ? 0 : 1;
  const std::string note = "median at t=" + fmt(t1) + " is the prediction; " + std::to_string(failed) + " replicates over budget";
  return {
      {"Gibbs median |Z_t(e^-x) - E[F(R_1)] Z_t| decreases", mg2, mg1, 0.0, mg2 < mg1, note},
      {"additive median |sqrt t W_t - sqrt(2/pi) Z_t| decreases", ma2, ma1, 0.0, ma2 < ma1, note},
  };
}

// ---------------------------------------------------------------- fluctuations

std::vector<Verdict> suite_fluctuations(const SuiteOptions& o) {
  FluctuationConfig cfg;
  cfg.engine = base_engine(o);
  cfg.t = pick(o.t, 20.0);
  cfg.big_t = cfg.t + 5.0;
  cfg.reps = pick(o.reps, 2000);
  cfg.seed = o.seed ^ 0xf1c7ull;
  cfg.workers = o.workers;
  return fluctuation_verdicts(run_fluctuation_ensemble(cfg));
}

// ---------------------------------------------------------------- extra invariants

std::vector<Verdict> suite_many_to_two(const SuiteOptions& o) {
  const std::size_t reps = pick(o.reps, 20000);
  const double t = pick(o.t, 2.0), x0 = 1.0, lo = 0.5, hi = 2.5;
  EngineConfig base = base_engine(o);
  base.start = x0;
  base.horizon = t;
  base.snapshot_times = {t};
  base.barrier = BarrierSpec{0.0, 0.0, kInfinity};
  std::vector<double> first(reps), second(reps);
  run_replicates(reps, o.seed ^ 0x2222ull, o.workers, [&](std::size_t rep, std::uint64_t seed) {
    EngineConfig e = base;
    e.seed = seed;
    const RunResult run = evolve(e);
    double s = 0.0;
    for (const auto& p : snapshot_at(run, t).particles) {
      if (p.tag < 0 && p.position >= lo && p.position <= hi) s += std::exp(-p.position);
    }
    first[rep] = s;
    second[rep] = s * s;
  });
  const ManyToTwo m = many_to_two_prediction(x0, t, lo, hi, base.law.pair_constant());
  const auto m1 = mean_se(first), m2 = mean_se(second);
  const double k_fit = (m2.mean - m.diagonal) / m.branch_integral;
  return {
      within("many-to-two first moment", m1.mean, m.first, 3.0 * m1.standard_error),
      within("many-to-two second moment", m2.mean, m.second, 5.0 * m2.standard_error,
             "K = lambda E[L(L-1)] = " + fmt(base.law.pair_constant()) + "; fitted K = " + fmt(k_fit)),
  };
}

std::vector<Verdict> suite_local_min(const SuiteOptions& o) {
  const std::size_t reps = pick(o.reps, 1000);
  const double s = pick(o.t, 16.0);
  EngineConfig base = base_engine(o);
  base.horizon = s;
  base.snapshot_times = {s};
  std::vector<double> minima(reps);
  run_replicates(reps, o.seed ^ 0x10c1ull, o.workers, [&](std::size_t rep, std::uint64_t seed) {
    EngineConfig e = base;
    e.seed = seed;
    const RunResult run = evolve(e);
    double m = kInfinity;
    for (const auto& p : snapshot_at(run, s).particles) m = std::min(m, p.position);
    minima[rep] = m;
  });
  std::vector<Verdict> out;
  for (double x : {2.0, 4.0}) {
    const double level = 1.5 * std::log(s) - x;
    double hits = 0.0;
    for (double m : minima) hits += m <= level ? 1.0 : 0.0;
    const double p = hits / static_cast<double>(reps);
    out.push_back(at_most(label("local minimum envelope 10 (1+x^2) e^-x", "x", x), p,
                          10.0 * (1.0 + x * x) * std::exp(-x), 0.0));
  }
  return out;
}

std::vector<Verdict> suite_pruning(const SuiteOptions& o) {
  const std::size_t reps = pick(o.reps, 20);
  const double t = pick(o.t, 20.0);
  double worst = 0.0;
  std::uint64_t pruned = 0;
  for (std::size_t rep = 0; rep < reps; ++rep) {
    EngineConfig e = base_engine(o);
    e.horizon = t;
    e.snapshot_times = {t};
    e.seed = replicate_seed(o.seed ^ 0x9a11ull, rep);
    const RunResult with = evolve(e);
    e.x_max.reset();
    const RunResult without = evolve(e);
    const auto& a = snapshot_at(with, t);
    const auto& b = snapshot_at(without, t);
    worst = std::max({worst, std::abs(eval_additive(a) - eval_additive(b)),
                      std::abs(eval_derivative(a) - eval_derivative(b))});
    pruned += with.stats.pruned;
  }
  return {at_most("pruning at x_max=40 changes W_t and Z_t by at most", worst, 0.0, 1e-10,
                  std::to_string(pruned) + " particles pruned in total")};
}

std::vector<Verdict> suite_imhof(const SuiteOptions& o) {
  const std::size_t n = pick(o.reps, 100000);
  const double x0 = 1.0, t = 1.0;
  const int steps = 100;
  auto phi = [](double y) { return 1.0 / (1.0 + y * y); };
  std::vector<double> bm(n), bessel(n);
  for (std::size_t i = 0; i < n; ++i) {
    RngStream rng(o.seed, 0x1a0f0000ull + i);
    double x = x0;
    bool alive = true;
    const double h = t / steps;
    for (int k = 0; k < steps && alive; ++k) {
      const double y = x + std::sqrt(h) * rng.normal();
      if (bridge_min_hits(rng, x, y, h, 0.0).hit) alive = false;
      x = y;
    }
    bm[i] = alive ? phi(x) : 0.0;
    RngStream other(o.seed, 0x1b0f0000ull + i);
    const double r = bessel3_sample(other, x0, t);
    bessel[i] = x0 / r * phi(r);
  }
  const auto a = mean_se(bm), b = mean_se(bessel);
  return {within("Brownian motion staying positive vs Bessel-3", a.mean, b.mean,
                 3.0 * joint_se(a.standard_error, b.standard_error))};
}

std::vector<Verdict> suite_stopping_line_moments(const SuiteOptions& o) {
  const std::size_t reps = pick(o.reps, 200);
  const double x0 = 1.0;
  const std::vector<double> ss = {1.0, 4.0, 16.0};
  EngineConfig base = base_engine(o);
  base.dt = std::max(o.dt, 0.05);
  base.start = x0;
  base.horizon = pick(o.t, 400.0);
  base.snapshot_times = {base.horizon};
  base.x_max = 11.0;
  base.record_pruned = true;
  base.barrier = BarrierSpec{0.0, 0.0, kInfinity};
  std::vector<std::vector<double>> n(ss.size(), std::vector<double>(reps));
  run_replicates(reps, o.seed ^ 0x2ddull, o.workers, [&](std::size_t rep, std::uint64_t seed) {
    EngineConfig e = base;
    e.seed = seed;
    const RunResult run = evolve(e);
    for (std::size_t j = 0; j < ss.size(); ++j) {
      double c = 0.0;
      for (const auto& r : run.stopping_line) c += r.time >= ss[j] ? 1.0 : 0.0;
      for (const auto& p : run.pruned) if (p.tag < 0) c += completion(p.position, p.time, ss[j]);
      for (const auto& p : snapshot_at(run, e.horizon).particles) if (p.tag < 0) c += completion(p.position, e.horizon, ss[j]);
      n[j][rep] = c * c;
    }
  });
  std::vector<double> m;
  for (const auto& v : n) m.push_back(mean_se(v).mean);
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t j = 0; j < ss.size(); ++j) {
    const double lx = std::log(ss[j]), ly = std::log(m[j]);
    sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
  }
  const double k = static_cast<double>(ss.size());
  const double slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
  const bool decreasing = m[0] > m[1] && m[1] > m[2] && std::isfinite(m[0]);
  const std::string note = "second moments " + fmt(m[0]) + ", " + fmt(m[1]) + ", " + fmt(m[2]) +
                           " (pruned and surviving lineages enter through their conditional mean)";
  return {
      {"stopping line second moment decreasing in s", decreasing ? 1.0 : 0.0, 1.0, 0.0, decreasing, note},
      {"stopping line second moment log-log slope within factor 2 of -1/2", slope, -0.5, 0.0,
       slope >= -1.0 && slope <= -0.25, note},
  };
}

using SuiteFn = std::vector<Verdict> (*)(const SuiteOptions&);

const std::vector<std::pair<std::string, SuiteFn>>& registry() {
  static const std::vector<std::pair<std::string, SuiteFn>> r = {
      {"normalization", suite_normalization},
      {"many-to-one", suite_many_to_one},
      {"stopping-line", suite_stopping_line},
      {"global-min", suite_global_min},
      {"appendix-identities", suite_appendix},
      {"cauchy", suite_cauchy},
      {"g-expansion", suite_g_expansion},
      {"decomposition", suite_decomposition},
      {"bessel", suite_bessel},
      {"dt-robustness", suite_dt_robustness},
      {"gibbs", suite_gibbs},
      {"fluctuations", suite_fluctuations},
      {"many-to-two", suite_many_to_two},
      {"local-min", suite_local_min},
      {"pruning", suite_pruning},
      {"imhof", suite_imhof},
      {"contributions", suite_contributions},
      {"stopping-line-moments", suite_stopping_line_moments},
  };
  return r;
}

}  // namespace

StoppingLineStudy stopping_line_study(const SuiteOptions& o, double x0, double s, double horizon,
                                      std::size_t reps) {
  if (!(x0 > 0.0)) throw invalid_argument("stopping line start must be > 0");
  if (!(s >= 0.0)) throw invalid_argument("stopping line tail start must be >= 0");
  const StoppingLineData d = simulate_stopping_line(o, x0, horizon, s, reps, 0x5717ull);
  StoppingLineStudy study;
  study.kill_times = d.times;
  study.completed_counts = d.count;
  auto& out = study.verdicts;
  const auto mc = mean_se(d.count);
  out.push_back(within("stopping line E_x[#L] = e^-x x=" + fmt(x0), mc.mean, std::exp(-x0), 3.0 * mc.standard_error,
                       "kills up to the horizon plus e^{-y} for lineages alive at the horizon or pruned"));

  // Kill times observed before the horizon follow the closed-form law
  // restricted to [0, horizon]. Kills cluster within families, so the KS
  // p-value uses the Kish effective size (sum n_i)^2 / sum n_i^2.
  double s1 = 0.0, s2 = 0.0;
  for (double n : d.per_rep) {
    s1 += n;
    s2 += n * n;
  }
  const double n_eff = s2 > 0.0 ? s1 * s1 / s2 : 0.0;
  const double norm = std::erfc(x0 / std::sqrt(2.0 * horizon));
  auto cdf = [&](double r) { return r <= 0.0 ? 0.0 : std::erfc(x0 / std::sqrt(2.0 * r)) / norm; };
  if (d.times.size() >= 10) {
    const KsResult ks = ks_one_sample(d.times, cdf, n_eff);
    out.push_back(at_least("stopping line kill-time KS p-value", ks.p_value, 0.01,
                           "D = " + fmt(ks.statistic) + ", kills = " + std::to_string(d.times.size()) +
                               ", effective n = " + fmt(n_eff)));
  } else {
    out.push_back({"stopping line kill-time KS p-value", 0.0, 0.01, 0.0, false, "too few kills"});
  }

  const auto mw = mean_se(d.window);
  out.push_back(within("stopping line kills in [1,2]", mw.mean, stopping_line_window_mass(x0, 1.0, 2.0),
                       3.0 * mw.standard_error));
  const auto mt = mean_se(d.tail);
  const double tail_exact = stopping_line_window_mass(x0, s, kInfinity);
  out.push_back(within("stopping line E_x[#L_[s,inf)] s=" + fmt(s), mt.mean, tail_exact, 3.0 * mt.standard_error));
  const double envelope = 5.0 * std::exp(-x0) * (s > 0.0 ? std::min(1.0, x0 / std::sqrt(s)) : 1.0);
  out.push_back(at_most("stopping line tail envelope 5 e^-x min(1, x/sqrt s)", tail_exact, envelope, 0.0));
  return study;
}

ManyToTwo many_to_two_prediction(double x, double t, double lo, double hi, double k) {
  auto kill_mass = [lo, hi](double s, double y) {
    const double sd = std::sqrt(s);
    return (normal_cdf((hi - y) / sd) - normal_cdf((lo - y) / sd)) -
           (normal_cdf((hi + y) / sd) - normal_cdf((lo + y) / sd));
  };
  QuadOptions opts;
  opts.abs_tol = 1e-12;
  opts.rel_tol = 1e-10;
  ManyToTwo m;
  m.first = std::exp(-x) * kill_mass(t, x);
  m.diagonal = std::exp(-x) * integrate([&](double y) { return std::exp(-y) * killed_bm_density(t, x, y); }, lo, hi, opts).value;
  // e^{-x} int_0^t dr int_0^inf m(t-r, y)^2 e^y q_r(x, y) dy with m(s, y) = e^{-y} kill_mass(s, y).
  auto inner = [&](double r) {
    if (r <= 0.0 || r >= t) return 0.0;
    return integrate_to_infinity(
               [&](double y) {
                 if (y <= 0.0) return 0.0;
                 const double km = kill_mass(t - r, y);
                 return km == 0.0 ? 0.0 : std::exp(-y) * km * km * killed_bm_density(r, x, y);
               },
               0.0, opts)
        .value;
  };
  m.branch_integral = std::exp(-x) * integrate(inner, 0.0, t, opts).value;
  m.second = k * m.branch_integral + m.diagonal;
  return m;
}

std::vector<Verdict> fluctuation_verdicts(const std::vector<FluctuationSample>& samples) {
  std::vector<double> additive, derivative, general, z_big;
  double worst_mode_gap = 0.0;
  double t = 0.0;
  const double coeff = -kSqrt2OverPi;  // log t coefficient of F = 1
  for (const auto& s : samples) {
    if (!s.ok) continue;
    t = s.t;
    FluctuationInput in{s.t, s.w_t, s.z_t, s.z_big_t};
    additive.push_back(fluctuation_statistic(FluctuationMode::AdditiveCauchy, in));
    const double by_hand =
        std::sqrt(s.t) * (s.z_t - s.z_big_t - std::log(s.t) / std::sqrt(2.0 * std::numbers::pi * s.t) * s.z_big_t);
    const double general_f = fluctuation_statistic(FluctuationMode::GeneralF, in, 1.0, coeff);
    derivative.push_back(by_hand);
    general.push_back(general_f);
    worst_mode_gap = std::max(worst_mode_gap, std::abs(general_f - by_hand));
    z_big.push_back(std::max(0.0, s.z_big_t));
  }
  const std::size_t n = additive.size();
  if (n < 200) throw Error(ErrorKind::CheckFailed, "too few successful replicates for the fluctuation checks");
  std::vector<Verdict> out;

  const std::size_t k = std::max<std::size_t>(1, n / 100);
  const HillEstimate hill = hill_index(additive, k, TailSide::Absolute);
  std::string curve = "k-sensitivity:";
  for (std::size_t kk : {n / 200, n / 100, n / 50, n / 20}) {
    if (kk >= 1) curve += " k=" + std::to_string(kk) + " -> " + fmt(hill_index(additive, kk).alpha);
  }
  out.push_back({"fluctuation tail: Hill index of |additive statistic| in [0.7, 1.4]", hill.alpha, 1.05, 0.35,
                 hill.alpha >= 0.7 && hill.alpha <= 1.4,
                 "k = " + std::to_string(k) + ", s.e. " + fmt(hill.standard_error) + "; " + curve});

  // Best-fitting Cauchy mixture E[exp(-Z (a |lambda| - i b lambda))] over the
  // observed Z_T, fitted by minimizing the sup distance on |lambda| <= 2.
  std::vector<double> grid;
  for (int i = -20; i <= 20; ++i) grid.push_back(i * 0.1);
  const auto ecf = empirical_cf(additive, grid);
  auto model = [&](double a, double b) {
    return [&, a, b](double lambda) {
      std::complex<double> s = 0.0;
      for (double z : z_big) s += std::exp(std::complex<double>(-z * a * std::abs(lambda), z * b * lambda));
      return s / static_cast<double>(z_big.size());
    };
  };
  double best_a = 2.0, best_b = 0.0, best = cf_distance(ecf, model(best_a, best_b)).sup;
  for (double step : {1.0, 0.25, 0.05, 0.01}) {
    bool improved = true;
    while (improved) {
      improved = false;
      for (const auto& [da, db] : {std::pair{step, 0.0}, {-step, 0.0}, {0.0, step}, {0.0, -step}}) {
        const double a = best_a + da, b = best_b + db;
        if (a <= 0.0) continue;
        const double d = cf_distance(ecf, model(a, b)).sup;
        if (d < best) {
          best = d;
          best_a = a;
          best_b = b;
          improved = true;
        }
      }
    }
  }
  out.push_back(at_most("fluctuation cf distance to best-fit Cauchy mixture on |lambda| <= 2", best, 0.0, 0.1,
                        "fitted scale " + fmt(best_a) + ", drift " + fmt(best_b) + " (limit values 2, " +
                            fmt(2.0 * std::log(2.0) / std::numbers::pi) + ")"));

  out.push_back(at_most("general-F statistic with F=1 equals the derivative statistic", worst_mode_gap, 0.0, 1e-12));

  const double q_hi = quantile(derivative, 0.99), q_lo = quantile(derivative, 0.01);
  out.push_back({"derivative statistic right-skewed: q99 > |q01|", q_hi, std::abs(q_lo), 0.0, q_hi > std::abs(q_lo),
                 "q01 = " + fmt(q_lo) + ", q99 = " + fmt(q_hi) + ", median = " + fmt(median(derivative)) +
                     ", t = " + fmt(t) + ", n = " + std::to_string(n)});
  return out;
}

std::vector<std::string> suite_names() {
  std::vector<std::string> names;
  for (const auto& [name, fn] : registry()) names.push_back(name);
  return names;
}

std::vector<Verdict> run_suite(const std::string& name, const SuiteOptions& options) {
  if (!(options.dt > 0.0)) throw invalid_argument("suite dt must be positive");
  for (const auto& [n, fn] : registry()) {
    if (n == name) return fn(options);
  }
  std::string known;
  for (const auto& n : suite_names()) known += (known.empty() ? "" : ", ") + n;
  throw invalid_argument("unknown suite '" + name + "' (known: " + known + ")");
}

bool all_pass(const std::vector<Verdict>& verdicts) {
  return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.pass; });
}

}  // namespace bbmlab
