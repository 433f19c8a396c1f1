// bbm_lab: command-line front end over the bbmlab C API.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "bbmlab/bbmlab.h"

namespace {

enum Exit { kPass = 0, kCheckFailed = 1, kUsage = 2, kResource = 3 };

int exit_code(bbm_status s) {
  switch (s) {
    case BBM_OK: return kPass;
    case BBM_CHECK_FAILED: return kCheckFailed;
    case BBM_USAGE:
    case BBM_IO: return kUsage;
    case BBM_RESOURCE:
    case BBM_INTERNAL: return kResource;
  }
  return kResource;
}

struct ConfigDeleter {
  void operator()(bbm_config* c) const { bbm_config_free(c); }
};
struct ReportDeleter {
  void operator()(bbm_report* r) const { bbm_report_free(r); }
};
using ConfigPtr = std::unique_ptr<bbm_config, ConfigDeleter>;
using ReportPtr = std::unique_ptr<bbm_report, ReportDeleter>;

std::string take(char* s) {
  std::string out = s ? s : "";
  bbm_string_free(s);
  return out;
}

std::string field_help() {
  char* raw = nullptr;
  if (bbm_config_fields(&raw) != BBM_OK) return {};
  const auto fields = nlohmann::json::parse(take(raw));
  std::ostringstream os;
  os << "\nConfig file (JSON, \"format\": \"bbm-lab/config-v1\"); flags override file values.\n"
     << "Fields (default) [symbol]:\n";
  for (const auto& f : fields) {
    os << "  " << f["path"].get<std::string>() << " (" << f["default"].get<std::string>() << ") ["
       << f["symbol"].get<std::string>() << "]\n      " << f["meaning"].get<std::string>() << "\n";
  }
  char* suites = nullptr;
  if (bbm_suite_names(&suites) == BBM_OK) {
    os << "Suites: ";
    bool first = true;
    for (const auto& s : nlohmann::json::parse(take(suites))) {
      os << (first ? "" : ", ") << s.get<std::string>();
      first = false;
    }
    os << "\n";
  }
  char* keys = nullptr;
  if (bbm_functional_keys(&keys) == BBM_OK) {
    os << "Functional keys: ";
    bool first = true;
    for (const auto& s : nlohmann::json::parse(take(keys))) {
      os << (first ? "" : ", ") << s.get<std::string>();
      first = false;
    }
    os << ", exp:<theta>, pow_neg:<a>, G:<key>\n";
  }
  os << "Environment: BBM_LAB_WORKERS sets the worker count when --workers is absent.\n"
     << "Exit codes: 0 pass, 1 check failure, 2 usage or IO error, 3 resource error.\n";
  return os.str();
}

struct Overrides {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> reps;
  std::optional<double> t;
  std::optional<std::string> out;
  std::vector<std::string> suites;
  std::optional<unsigned> workers;
  std::optional<std::string> functional;
};

int fail(bbm_status s, const std::string& context) {
  std::cerr << "bbm_lab: " << context << ": " << bbm_last_error() << "\n";
  return exit_code(s);
}

int run(const std::string& command, const Overrides& o) {
  bbm_config* raw = nullptr;
  bbm_status s = o.config_path.empty() ? bbm_config_new(&raw) : bbm_config_load(o.config_path.c_str(), &raw);
  if (s != BBM_OK) return fail(s, "config");
  ConfigPtr config(raw);

  auto set = [&](const std::string& path, const nlohmann::json& value) {
    const bbm_status st = bbm_config_set(config.get(), path.c_str(), value.dump().c_str());
    if (st != BBM_OK) throw st;
  };
  try {
    set("command", command);
    if (o.seed) set("seed", *o.seed);
    if (o.reps) set("reps", *o.reps);
    if (o.t) set("t", *o.t);
    if (o.out) set("out", *o.out);
    if (!o.suites.empty()) set("suites", o.suites);
    if (o.workers) set("workers", *o.workers);
    if (o.functional) {
      set("functional", *o.functional);
      set("constants_functionals", nlohmann::json::array());
    }
  } catch (bbm_status st) {
    return fail(st, "flag override");
  }
  if ((s = bbm_config_validate(config.get())) != BBM_OK) return fail(s, "invalid config");

  bbm_report* report_raw = nullptr;
  s = bbm_run(config.get(), &report_raw);
  ReportPtr report(report_raw);
  if (!report) return fail(s, command);
  std::cout << bbm_report_text(report.get());
  if (s == BBM_CHECK_FAILED) std::cerr << "bbm_lab: " << command << ": one or more checks failed\n";
  return exit_code(s);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bbm_lab " + std::string(bbm_version()) +
               ": branching Brownian motion simulation, limit constants and verification"};
  app.footer(field_help());
  app.require_subcommand(1);
  Overrides o;

  std::uint64_t seed = 0;
  std::size_t reps = 0;
  double t = 0.0;
  std::string out;
  unsigned workers = 0;
  std::string functional;
  auto* config_opt = app.add_option("--config", o.config_path, "JSON config file (bbm-lab/config-v1)");
  config_opt->check(CLI::ExistingFile);
  auto* seed_opt = app.add_option("--seed", seed, "master seed (U64)");
  auto* reps_opt = app.add_option("--reps", reps, "replicate count")->check(CLI::PositiveNumber);
  auto* t_opt = app.add_option("--t", t, "observation time or horizon")->check(CLI::PositiveNumber);
  auto* out_opt = app.add_option("--out", out, "output directory");
  app.add_option("--suite", o.suites, "verification suites (comma separated)")->delimiter(',');
  auto* workers_opt = app.add_option("--workers", workers, "worker threads (else BBM_LAB_WORKERS, else 1)")
                          ->check(CLI::PositiveNumber);
  auto* functional_opt = app.add_option("--functional", functional, "functional key F");

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"simulate", "run the engine once and write snapshots, stopping line, stats and manifest"},
      {"verify", "run verification suites and write verdicts; exit 0 iff all pass"},
      {"constants", "compute the limit-law constants for one or more functionals"},
      {"fluctuations", "run a replicate ensemble and check the fluctuation statistic"},
      {"stopping-line", "compare the stopping line of a barrier at 0 with its closed forms"},
  };
  for (const auto& [name, help] : commands) app.add_subcommand(name, help)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kUsage;
  }
  if (*seed_opt) o.seed = seed;
  if (*reps_opt) o.reps = reps;
  if (*t_opt) o.t = t;
  if (*out_opt) o.out = out;
  if (*workers_opt) o.workers = workers;
  if (*functional_opt) o.functional = functional;
  return run(app.get_subcommands().front()->get_name(), o);
}
