#include "bbmlab/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "bbmlab/error.hpp"

namespace bbmlab {

using nlohmann::json;

namespace {

const std::set<std::string> kCommands = {"simulate", "verify", "constants", "fluctuations", "stopping-line"};

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json barrier_json(const std::optional<BarrierSpec>& b) {
  if (!b) return nullptr;
  return {{"level", b->level}, {"t_start", b->t_start},
          {"t_end", std::isinf(b->t_end) ? json(nullptr) : json(b->t_end)}};
}

json engine_json(const EngineSettings& e) {
  json offspring = json::object();
  for (const auto& [k, p] : e.offspring) offspring[std::to_string(k)] = p;
  return {
      {"dt", e.dt},
      {"horizon", e.horizon},
      {"start", e.start},
      {"x_max", optional_number(e.x_max)},
      {"offspring", offspring},
      {"sigma", e.sigma},
      {"drift", e.drift},
      {"snapshot_times", e.snapshot_times},
      {"barrier", barrier_json(e.barrier)},
      {"floor", optional_number(e.floor)},
      {"stop_at_floor", e.stop_at_floor},
      {"continue_killed", e.continue_killed},
      {"record_pruned", e.record_pruned},
      {"max_particles", e.max_particles},
  };
}

// Reads the members of one JSON object, rejecting anything it was not asked for.
class Reader {
 public:
  Reader(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw invalid_argument(where_ + ": expected an object");
  }

  template <typename T>
  void get(const char* key, T& into) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) return;
    try {
      into = it->template get<T>();
    } catch (const json::exception&) {
      throw invalid_argument(path(key) + ": wrong type (" + it->type_name() + ")");
    }
  }

  void get_optional(const char* key, std::optional<double>& into) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) return;
    if (it->is_null()) {
      into.reset();
    } else if (it->is_number()) {
      into = it->get<double>();
    } else {
      throw invalid_argument(path(key) + ": expected a number or null");
    }
  }

  const json* raw(const char* key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  void finish() const {
    for (const auto& [k, v] : j_.items()) {
      if (!seen_.count(k)) throw invalid_argument(path(k.c_str()) + ": unknown key");
    }
  }

  std::string path(const char* key) const { return where_.empty() ? key : where_ + "." + key; }

 private:
  const json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

std::optional<BarrierSpec> barrier_from(const json& j) {
  if (j.is_null()) return std::nullopt;
  Reader r(j, "engine.barrier");
  BarrierSpec b;
  r.get("level", b.level);
  r.get("t_start", b.t_start);
  std::optional<double> end;
  r.get_optional("t_end", end);
  b.t_end = end ? *end : kInfinity;
  r.finish();
  return b;
}

EngineSettings engine_from(const json& j) {
  Reader r(j, "engine");
  EngineSettings e;
  r.get("dt", e.dt);
  r.get("horizon", e.horizon);
  r.get("start", e.start);
  r.get_optional("x_max", e.x_max);
  if (const json* off = r.raw("offspring")) {
    if (!off->is_object()) throw invalid_argument("engine.offspring: expected an object {count: probability}");
    e.offspring.clear();
    for (const auto& [k, v] : off->items()) {
      int count = 0;
      try {
        std::size_t used = 0;
        count = std::stoi(k, &used);
        if (used != k.size()) throw std::invalid_argument(k);
      } catch (const std::exception&) {
        throw invalid_argument("engine.offspring: key '" + k + "' is not an integer");
      }
      if (!v.is_number()) throw invalid_argument("engine.offspring." + k + ": expected a number");
      e.offspring[count] = v.get<double>();
    }
  }
  r.get("sigma", e.sigma);
  r.get("drift", e.drift);
  r.get("snapshot_times", e.snapshot_times);
  if (const json* b = r.raw("barrier")) e.barrier = barrier_from(*b);
  r.get_optional("floor", e.floor);
  r.get("stop_at_floor", e.stop_at_floor);
  r.get("continue_killed", e.continue_killed);
  r.get("record_pruned", e.record_pruned);
  r.get("max_particles", e.max_particles);
  r.finish();
  return e;
}

}  // namespace

json to_json(const Config& c) {
  return {
      {"format", kConfigFormat},
      {"command", c.command},
      {"seed", c.seed},
      {"reps", c.reps},
      {"t", c.t},
      {"out", c.out},
      {"workers", c.workers},
      {"wall_clock_budget_s", c.wall_clock_budget_s},
      {"engine", engine_json(c.engine)},
      {"functional", c.functional},
      {"mode", c.mode},
      {"proxy_offset", c.proxy_offset},
      {"cf_range", c.cf_range},
      {"mu_z", c.mu_z},
      {"constants_functionals", c.constants_functionals},
      {"suites", c.suites},
      {"stopping_x", c.stopping_x},
      {"stopping_s", c.stopping_s},
  };
}

Config config_from_json(const json& j) {
  Reader r(j, "");
  std::string format = kConfigFormat;
  r.get("format", format);
  if (format != kConfigFormat) {
    throw invalid_argument("format: expected '" + std::string(kConfigFormat) + "', got '" + format + "'");
  }
  Config c;
  r.get("command", c.command);
  r.get("seed", c.seed);
  r.get("reps", c.reps);
  r.get("t", c.t);
  r.get("out", c.out);
  r.get("workers", c.workers);
  r.get("wall_clock_budget_s", c.wall_clock_budget_s);
  if (const json* e = r.raw("engine")) c.engine = engine_from(*e);
  if (const json* f = r.raw("functional")) c.functional = *f;
  r.get("mode", c.mode);
  r.get("proxy_offset", c.proxy_offset);
  r.get("cf_range", c.cf_range);
  r.get("mu_z", c.mu_z);
  r.get("constants_functionals", c.constants_functionals);
  r.get("suites", c.suites);
  r.get("stopping_x", c.stopping_x);
  r.get("stopping_s", c.stopping_s);
  r.finish();
  return c;
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open config file '" + path + "'");
  json j;
  try {
    j = json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw invalid_argument("config file '" + path + "' is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

void set_config_value(Config& config, const std::string& path, const json& value) {
  json j = to_json(config);
  json* node = &j;
  std::stringstream ss(path);
  std::string part;
  std::vector<std::string> parts;
  while (std::getline(ss, part, '.')) parts.push_back(part);
  if (parts.empty()) throw invalid_argument("empty config path");
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    if (!node->contains(parts[i])) throw invalid_argument(path + ": unknown key");
    node = &(*node)[parts[i]];
    if (node->is_null()) *node = json::object();
  }
  if (parts.size() == 1 && !node->contains(parts.back())) throw invalid_argument(path + ": unknown key");
  (*node)[parts.back()] = value;
  config = config_from_json(j);
}

void validate(const Config& c) {
  if (!kCommands.count(c.command)) throw invalid_argument("command: unknown experiment kind '" + c.command + "'");
  if (c.t < 0.0 || !std::isfinite(c.t)) throw invalid_argument("t: must be >= 0 (0 selects the default)");
  if (c.mode != "additive-cauchy" && c.mode != "general-F") {
    throw invalid_argument("mode: expected additive-cauchy or general-F, got '" + c.mode + "'");
  }
  if (c.cf_range != "unit" && c.cf_range != "full") {
    throw invalid_argument("cf_range: expected unit or full, got '" + c.cf_range + "'");
  }
  if (!(c.proxy_offset > 0.0)) throw invalid_argument("proxy_offset: must be > 0 (T = t + proxy_offset)");
  if (!(c.stopping_x > 0.0)) throw invalid_argument("stopping_x: the start must be > 0");
  if (!(c.stopping_s >= 0.0)) throw invalid_argument("stopping_s: must be >= 0");
  if (c.wall_clock_budget_s < 0.0) throw invalid_argument("wall_clock_budget_s: must be >= 0");
  if (c.out.empty()) throw invalid_argument("out: output directory must not be empty");
  try {
    engine_config(c.engine, c.seed).validate();
  } catch (const Error& e) {
    std::string msg = e.what();
    throw invalid_argument(msg.rfind("engine.", 0) == 0 ? msg : "engine: " + msg);
  }
  resolve_functional(c.functional);
}

EngineConfig engine_config(const EngineSettings& s, std::uint64_t seed) {
  EngineConfig e;
  e.dt = s.dt;
  e.horizon = s.horizon;
  e.start = s.start;
  e.x_max = s.x_max;
  e.law = OffspringLaw::from_map(s.offspring);
  e.diffusion = Diffusion{s.sigma, s.drift};
  e.snapshot_times = s.snapshot_times.empty() ? std::vector<double>{s.horizon} : s.snapshot_times;
  e.barrier = s.barrier;
  e.floor = s.floor;
  e.stop_at_floor = s.stop_at_floor;
  e.continue_killed = s.continue_killed;
  e.record_pruned = s.record_pruned;
  e.seed = seed;
  e.max_particles = s.max_particles;
  return e;
}

FunctionalSpec resolve_functional(const json& d) {
  if (d.is_string()) return functional_from_key(d.get<std::string>());
  Reader r(d, "functional");
  std::string key = "custom";
  double alpha = 0.0, kappa = 1.0, bound = 1.0;
  r.get("key", key);
  r.get("alpha", alpha);
  r.get("kappa", kappa);
  r.get("bound_constant", bound);
  AssumptionFlags flags;
  if (const json* f = r.raw("flags")) {
    Reader fr(*f, "functional.flags");
    fr.get("a1", flags.a1);
    fr.get("a2", flags.a2);
    fr.get("h1", flags.h1);
    fr.get("h2", flags.h2);
    fr.get("h3", flags.h3);
    fr.finish();
  }
  std::vector<PiecewiseTerm> pieces;
  const json* ps = r.raw("pieces");
  if (!ps || !ps->is_array()) throw invalid_argument("functional.pieces: expected an array of {from, coeffs, rate}");
  for (const auto& p : *ps) {
    Reader pr(p, "functional.pieces[]");
    PiecewiseTerm term;
    pr.get("from", term.from);
    pr.get("coeffs", term.coeffs);
    pr.get("rate", term.rate);
    pr.finish();
    pieces.push_back(std::move(term));
  }
  r.finish();
  return functional_from_pieces(key, std::move(pieces), alpha, kappa, bound, flags);
}

std::vector<FieldDoc> config_field_docs() {
  return {
      {"command", "simulate", "-", "experiment kind: simulate | verify | constants | fluctuations | stopping-line"},
      {"seed", "20240607", "-", "master seed; replicate r uses a seed derived from (seed, r)"},
      {"reps", "0", "-", "replicate count; 0 selects the command default"},
      {"t", "0", "t", "observation time (simulate: horizon; fluctuations: t; stopping-line: horizon); 0 = default"},
      {"out", "bbm-out", "-", "output directory"},
      {"workers", "0", "-", "worker threads; 0 falls back to BBM_LAB_WORKERS, then 1"},
      {"wall_clock_budget_s", "0", "-", "wall-clock budget recorded in the manifest; 0 = none"},
      {"engine.dt", "0.01", "dt", "time step inside barrier windows and floor checks"},
      {"engine.horizon", "1", "t", "final simulation time"},
      {"engine.start", "0", "x", "start position of the root particle"},
      {"engine.x_max", "40", "-", "pruning level; null disables pruning"},
      {"engine.offspring", "{\"2\": 1}", "L", "offspring law P(L = k); branching rate 1/(2(E[L]-1))"},
      {"engine.sigma", "1", "sigma", "diffusion coefficient"},
      {"engine.drift", "1", "rho", "drift; 1 makes sum e^{-X} a mean-one martingale"},
      {"engine.snapshot_times", "[]", "t", "recorded times; empty records the horizon only"},
      {"engine.barrier", "null", "gamma, t^a", "killing barrier {level, t_start, t_end (null = infinity)}"},
      {"engine.floor", "null", "-M", "absorbing floor for the global-minimum experiment"},
      {"engine.stop_at_floor", "false", "-", "abandon the run once the floor is reached"},
      {"engine.continue_killed", "false", "L", "keep simulating progeny of killed particles, tagged by lineage"},
      {"engine.record_pruned", "false", "-", "record every pruned particle"},
      {"engine.max_particles", "5000000", "-", "particle budget per run; exceeding it is a resource error"},
      {"functional", "\"x\"", "F", "catalog key or {key, pieces:[{from, coeffs, rate}], alpha, kappa, bound_constant, flags}"},
      {"mode", "additive-cauchy", "-", "fluctuation statistic: additive-cauchy | general-F"},
      {"proxy_offset", "5", "T - t", "the limit Z is replaced by Z_T with T = t + proxy_offset"},
      {"cf_range", "unit", "-", "constants over killing times in [0,1] (unit) or [0,inf) (full)"},
      {"mu_z", "0", "mu_Z", "centering constant entering c3"},
      {"constants_functionals", "[]", "F", "catalog keys for the constants report; empty uses functional"},
      {"suites", "[]", "-", "verification suites; empty runs all"},
      {"stopping_x", "1", "x", "start of the stopping-line experiment (barrier at 0 from time 0)"},
      {"stopping_s", "4", "s", "tail start for E_x[#L_[s,inf)]"},
  };
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace bbmlab
