#include "bbmlab/commands.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <sstream>

#include "bbmlab/engine.hpp"
#include "bbmlab/ensemble.hpp"
#include "bbmlab/error.hpp"
#include "bbmlab/functionals.hpp"
#include "bbmlab/limits.hpp"
#include "bbmlab/snapshot_io.hpp"
#include "bbmlab/stats.hpp"
#include "bbmlab/verify.hpp"

namespace bbmlab {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::string csv_number(double v) {
  if (!std::isfinite(v)) return "nan";
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

fs::path prepare_out(const Config& c) {
  const fs::path dir(c.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw io_error("cannot create output directory '" + c.out + "': " + ec.message());
  return dir;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw io_error("write failed for '" + path.string() + "'");
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

// The hash covers everything that determines the outputs. The output
// directory and the worker count do not, so they are left out.
std::string config_hash(const Config& c) {
  json j = to_json(c);
  j.erase("out");
  j.erase("workers");
  return fnv1a_hex(j.dump());
}

json manifest(const Config& c, const std::string& hash, std::size_t reps, const std::vector<std::string>& outputs,
              const std::string& statistic = {}) {
  json m = {
      {"format", kManifestFormat},
      {"software_version", BBMLAB_VERSION},
      {"config_hash", hash},
      {"config", to_json(c)},
      {"master_seed", c.seed},
      {"replicates", reps},
      {"wall_clock_budget_s", c.wall_clock_budget_s},
      {"outputs", outputs},
  };
  if (!statistic.empty()) m["statistic"] = statistic;
  return m;
}

json verdict_json(const Verdict& v) {
  return {{"check", v.check}, {"observed", number(v.observed)}, {"predicted", number(v.predicted)},
          {"tolerance", number(v.tolerance)}, {"pass", v.pass}, {"note", v.note}};
}

std::string verdict_table(const std::vector<Verdict>& vs) {
  std::ostringstream os;
  for (const auto& v : vs) {
    os << (v.pass ? "PASS " : "FAIL ") << v.check << ": observed " << std::setprecision(8) << v.observed
       << ", predicted " << v.predicted << ", tolerance " << v.tolerance;
    if (!v.note.empty()) os << " (" << v.note << ")";
    os << "\n";
  }
  return os.str();
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void log_runtime(const std::string& what, const Stopwatch& sw) {
  std::clog << "[bbm-lab] " << what << " finished in " << std::fixed << std::setprecision(2) << sw.seconds()
            << " s\n";
}

json stats_json(const RunStats& s) {
  return {{"particles", s.particles}, {"branch_events", s.branch_events}, {"steps", s.steps},
          {"pruned", s.pruned},       {"pruned_weight", s.pruned_weight}, {"floor_hits", s.floor_hits}};
}

}  // namespace

CommandOutcome cmd_simulate(const Config& c) {
  validate(c);
  Stopwatch sw;
  EngineSettings settings = c.engine;
  if (c.t > 0.0) {
    settings.horizon = c.t;
    if (settings.snapshot_times.empty()) settings.snapshot_times = {c.t};
  }
  Config resolved = c;
  resolved.engine = settings;
  const fs::path dir = prepare_out(c);
  const std::string hash = config_hash(resolved);
  const EngineConfig engine = engine_config(settings, c.seed);

  RunResult run;
  try {
    run = evolve(engine);
  } catch (const ResourceExhausted& e) {
    write_json(dir / "stats.json", {{"format", "bbm-lab/run-stats-v1"},
                                    {"status", "resource-exhausted"},
                                    {"message", e.what()},
                                    {"stats", stats_json(e.stats())}});
    throw;
  }

  write_snapshots((dir / "snapshots.bin").string(), run.snapshots);
  std::ostringstream sl;
  sl << "# bbm-lab/stopping-line-v1\n";
  sl << "id,time,position,at_window_start\n";
  for (const auto& r : run.stopping_line) {
    sl << r.id << "," << csv_number(r.time) << "," << csv_number(r.position) << "," << (r.at_window_start ? 1 : 0)
       << "\n";
  }
  write_text(dir / "stopping_line.csv", sl.str());

  json snaps = json::array();
  for (const auto& s : run.snapshots) {
    snaps.push_back({{"time", s.time},
                     {"particles", s.particles.size()},
                     {"W", number(eval_additive(s))},
                     {"Z", number(eval_derivative(s))}});
  }
  json stats = {{"format", "bbm-lab/run-stats-v1"},
                {"status", "ok"},
                {"stats", stats_json(run.stats)},
                {"snapshots", snaps},
                {"stopping_line_records", run.stopping_line.size()}};
  write_json(dir / "stats.json", stats);
  const json m = manifest(resolved, hash, 1, {"snapshots.bin", "stopping_line.csv", "stats.json"});
  write_json(dir / "manifest.json", m);
  log_runtime("simulate", sw);

  CommandOutcome out;
  out.manifest_hash = hash;
  out.record = stats;
  std::ostringstream os;
  os << "simulated to t = " << settings.horizon << ": " << run.stats.particles << " particles, "
     << run.snapshots.size() << " snapshot(s), " << run.stopping_line.size() << " stopping-line record(s)\n"
     << "manifest " << hash << " written to " << (dir / "manifest.json").string() << "\n";
  out.text = os.str();
  return out;
}

CommandOutcome cmd_verify(const Config& c) {
  validate(c);
  Stopwatch sw;
  const fs::path dir = prepare_out(c);
  SuiteOptions opts;
  opts.seed = c.seed;
  opts.reps = c.reps;
  opts.t = c.t;
  opts.dt = c.engine.dt;
  opts.workers = resolve_workers(c.workers);
  const std::vector<std::string> suites = c.suites.empty() ? suite_names() : c.suites;
  for (const auto& s : suites) {
    bool known = false;
    for (const auto& n : suite_names()) known = known || n == s;
    if (!known) run_suite(s, opts);  // raises the usage error listing valid names
  }
  json records = json::array();
  std::vector<Verdict> all;
  std::ostringstream text;
  for (const auto& s : suites) {
    Stopwatch one;
    const auto vs = run_suite(s, opts);
    log_runtime("suite " + s, one);
    for (const auto& v : vs) {
      json r = verdict_json(v);
      r["suite"] = s;
      records.push_back(r);
    }
    text << "== " << s << "\n" << verdict_table(vs);
    all.insert(all.end(), vs.begin(), vs.end());
  }
  const std::string hash = config_hash(c);
  const json doc = {{"format", "bbm-lab/verdicts-v1"}, {"config_hash", hash}, {"records", records}};
  write_json(dir / "verdicts.json", doc);
  write_json(dir / "manifest.json", manifest(c, hash, c.reps, {"verdicts.json"}));
  log_runtime("verify", sw);
  CommandOutcome out;
  out.checks_passed = all_pass(all);
  out.record = doc;
  out.manifest_hash = hash;
  out.text = text.str();
  return out;
}

CommandOutcome cmd_constants(const Config& c) {
  validate(c);
  const fs::path dir = prepare_out(c);
  const CfRange range = c.cf_range == "full" ? CfRange::Full : CfRange::Unit;
  std::vector<json> descriptors;
  if (c.constants_functionals.empty()) {
    descriptors.push_back(c.functional);
  } else {
    for (const auto& k : c.constants_functionals) descriptors.emplace_back(k);
  }
  json records = json::array();
  std::ostringstream csv, text;
  csv << "# bbm-lab/constants-v1\n";
  csv << "functional,mean,c1,c2,c3,logt_coeff,quadrature_error,mu_z,cf_range\n";
  for (const auto& d : descriptors) {
    const FunctionalSpec f = resolve_functional(d);
    const StableLawParams p = prop_constants(f, c.mu_z, range);
    const QuadResult logt = logt_coefficient(f);
    const QuadResult mean = expected_bessel_value(f);
    const double err = p.quadrature_error + logt.error + mean.error;
    records.push_back({{"functional", f.key},
                       {"mean", number(mean.value)},
                       {"c1", number(p.c1)},
                       {"c2", number(p.c2)},
                       {"c3", number(p.c3)},
                       {"logt_coeff", number(logt.value)},
                       {"quadrature_error", number(err)},
                       {"mu_z", c.mu_z},
                       {"cf_range", c.cf_range}});
    csv << f.key << "," << csv_number(mean.value) << "," << csv_number(p.c1) << "," << csv_number(p.c2) << ","
        << csv_number(p.c3) << "," << csv_number(logt.value) << "," << csv_number(err) << "," << csv_number(c.mu_z)
        << "," << c.cf_range << "\n";
    text << std::setprecision(12) << f.key << ": E[F(R_1)] = " << mean.value << ", c1 = " << p.c1
         << ", c2 = " << p.c2 << ", c3 = " << p.c3 << ", log t coefficient = " << logt.value
         << " (quadrature error " << std::setprecision(3) << err << ")\n";
  }
  const std::string hash = config_hash(c);
  const json doc = {{"format", "bbm-lab/constants-v1"}, {"config_hash", hash}, {"records", records}};
  write_json(dir / "constants.json", doc);
  write_text(dir / "constants.csv", csv.str());
  write_json(dir / "manifest.json", manifest(c, hash, 0, {"constants.json", "constants.csv"}));
  CommandOutcome out;
  out.record = doc;
  out.manifest_hash = hash;
  out.text = text.str();
  return out;
}

CommandOutcome cmd_fluctuations(const Config& c) {
  validate(c);
  Stopwatch sw;
  const fs::path dir = prepare_out(c);
  const bool general = c.mode == "general-F";
  FluctuationConfig fc;
  fc.engine = engine_config(c.engine, c.seed);
  fc.t = c.t > 0.0 ? c.t : 20.0;
  fc.big_t = fc.t + c.proxy_offset;
  fc.reps = c.reps > 0 ? c.reps : 2000;
  fc.seed = c.seed;
  fc.workers = resolve_workers(c.workers);
  const FunctionalSpec f = general ? resolve_functional(c.functional) : functional_from_key("inv_x");
  if (general) fc.functional = f;
  const double mean_f = general ? expected_bessel_value(f).value : 0.0;
  const double coeff = general ? logt_coefficient(f).value : 0.0;
  const std::string formula =
      general ? "sqrt(t) (Z_t(F) - E[F(R_1)] Z_T + log(t) / (2 sqrt(t)) Z_T c_log), F = " + f.key +
                    ", E[F(R_1)] = " + csv_number(mean_f) + ", c_log = " + csv_number(coeff)
              : "sqrt(t) (sqrt(t) W_t - sqrt(2/pi) Z_T)";

  const auto samples = run_fluctuation_ensemble(fc);
  Config resolved = c;
  resolved.t = fc.t;
  resolved.reps = fc.reps;
  const std::string hash = config_hash(resolved);

  std::ostringstream csv;
  csv << "# bbm-lab/fluctuations-v1 statistic=" << formula << " T=t+" << csv_number(c.proxy_offset) << "\n";
  csv << "manifest_hash,replicate,status,t,W_t,Z_t,Z_t_F,Z_T,statistic\n";
  std::vector<double> stat, z_big;
  std::size_t failed = 0;
  for (const auto& s : samples) {
    double value = NAN;
    if (s.ok) {
      FluctuationInput in{s.t, s.w_t, s.z_t_f, s.z_big_t};
      value = fluctuation_statistic(general ? FluctuationMode::GeneralF : FluctuationMode::AdditiveCauchy, in,
                                    mean_f, coeff);
      stat.push_back(value);
      z_big.push_back(s.z_big_t);
    } else {
      ++failed;
    }
    csv << hash << "," << s.replicate << "," << (s.ok ? "ok" : "resource-exhausted") << "," << csv_number(s.t)
        << "," << csv_number(s.ok ? s.w_t : NAN) << "," << csv_number(s.ok ? s.z_t : NAN) << ","
        << csv_number(s.ok ? s.z_t_f : NAN) << "," << csv_number(s.ok ? s.z_big_t : NAN) << ","
        << csv_number(value) << "\n";
  }
  write_text(dir / "fluctuations.csv", csv.str());

  // Conditional characteristic function per Z_T quintile against the limit
  // law evaluated at the bin median.
  const StableLawParams params = prop_constants(f, c.mu_z, CfRange::Full);
  std::ostringstream cf;
  cf << "# bbm-lab/conditional-cf-v1\n";
  cf << "bin,z_median,n,lambda,ecf_re,ecf_im,se,model_re,model_im\n";
  std::vector<std::size_t> order(stat.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return z_big[a] < z_big[b]; });
  std::vector<double> lambdas;
  for (int i = -20; i <= 20; ++i) lambdas.push_back(0.1 * i);
  for (int bin = 0; bin < 5 && !order.empty(); ++bin) {
    const std::size_t lo = order.size() * bin / 5, hi = order.size() * (bin + 1) / 5;
    if (hi <= lo) continue;
    std::vector<double> xs, zs;
    for (std::size_t i = lo; i < hi; ++i) {
      xs.push_back(stat[order[i]]);
      zs.push_back(z_big[order[i]]);
    }
    const double zm = median(zs);
    for (const auto& p : empirical_cf(xs, lambdas)) {
      const auto model = limit_cf(params, p.lambda, std::max(0.0, zm));
      cf << bin << "," << csv_number(zm) << "," << xs.size() << "," << csv_number(p.lambda) << ","
         << csv_number(p.value.real()) << "," << csv_number(p.value.imag()) << "," << csv_number(p.standard_error)
         << "," << csv_number(model.real()) << "," << csv_number(model.imag()) << "\n";
    }
  }
  write_text(dir / "conditional_cf.csv", cf.str());

  const auto verdicts = fluctuation_verdicts(samples);
  json records = json::array();
  for (const auto& v : verdicts) records.push_back(verdict_json(v));
  std::vector<double> zpos;
  for (double z : z_big) zpos.push_back(z);
  std::vector<double> grid;
  for (int i = 0; i <= 40; ++i) grid.push_back(std::pow(10.0, 0.05 * i));
  const MuZEstimate mu = mu_z_estimate(zpos, grid);
  const json doc = {{"format", "bbm-lab/verdicts-v1"},
                    {"config_hash", hash},
                    {"records", records},
                    {"replicates", samples.size()},
                    {"failed_replicates", failed},
                    {"statistic", formula},
                    {"mu_z_estimate",
                     {{"value", number(mu.value)},
                      {"standard_error", number(mu.standard_error)},
                      {"warning", mu.warning},
                      {"slope", number(mu.slope)}}}};
  write_json(dir / "verdicts.json", doc);
  write_json(dir / "manifest.json", manifest(resolved, hash, fc.reps,
                                             {"fluctuations.csv", "conditional_cf.csv", "verdicts.json"}, formula));
  log_runtime("fluctuations", sw);

  CommandOutcome out;
  out.checks_passed = all_pass(verdicts);
  out.record = doc;
  out.manifest_hash = hash;
  std::ostringstream text;
  text << samples.size() << " replicates (" << failed << " over budget), statistic " << formula << "\n"
       << verdict_table(verdicts) << "mu_Z plateau estimate " << mu.value << " +- " << mu.standard_error
       << (mu.warning ? " (no flat window: unreliable)" : "") << "\n";
  out.text = text.str();
  return out;
}

CommandOutcome cmd_stopping_line(const Config& c) {
  validate(c);
  Stopwatch sw;
  const fs::path dir = prepare_out(c);
  SuiteOptions opts;
  opts.seed = c.seed;
  opts.dt = c.engine.dt;
  opts.workers = resolve_workers(c.workers);
  const double horizon = c.t > 0.0 ? c.t : 10.0;
  const std::size_t reps = c.reps > 0 ? c.reps : 10000;
  const StoppingLineStudy study = stopping_line_study(opts, c.stopping_x, c.stopping_s, horizon, reps);
  Config resolved = c;
  resolved.t = horizon;
  resolved.reps = reps;
  const std::string hash = config_hash(resolved);

  std::vector<double> times = study.kill_times;
  std::sort(times.begin(), times.end());
  std::ostringstream csv;
  csv << "# bbm-lab/kill-times-v1 x=" << csv_number(c.stopping_x) << " horizon=" << csv_number(horizon) << "\n";
  csv << "time,empirical_cdf,closed_form_cdf\n";
  const double norm = std::erfc(c.stopping_x / std::sqrt(2.0 * horizon));
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double model = std::erfc(c.stopping_x / std::sqrt(2.0 * times[i])) / norm;
    csv << csv_number(times[i]) << "," << csv_number(static_cast<double>(i + 1) / static_cast<double>(times.size()))
        << "," << csv_number(model) << "\n";
  }
  write_text(dir / "kill_times.csv", csv.str());
  json records = json::array();
  for (const auto& v : study.verdicts) records.push_back(verdict_json(v));
  const json doc = {{"format", "bbm-lab/verdicts-v1"}, {"config_hash", hash}, {"records", records}};
  write_json(dir / "verdicts.json", doc);
  write_json(dir / "manifest.json", manifest(resolved, hash, reps, {"kill_times.csv", "verdicts.json"}));
  log_runtime("stopping-line", sw);
  CommandOutcome out;
  out.checks_passed = all_pass(study.verdicts);
  out.record = doc;
  out.manifest_hash = hash;
  out.text = verdict_table(study.verdicts);
  return out;
}

CommandOutcome run_command(const Config& c) {
  if (c.command == "simulate") return cmd_simulate(c);
  if (c.command == "verify") return cmd_verify(c);
  if (c.command == "constants") return cmd_constants(c);
  if (c.command == "fluctuations") return cmd_fluctuations(c);
  if (c.command == "stopping-line") return cmd_stopping_line(c);
  throw invalid_argument("command: unknown experiment kind '" + c.command + "'");
}

}  // namespace bbmlab
