#include "bbmlab/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

#include "bbmlab/engine.hpp"
#include "bbmlab/error.hpp"
#include "bbmlab/rng.hpp"

namespace bbmlab {

unsigned resolve_workers(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("BBM_LAB_WORKERS")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0' && v > 0 && v <= 1024) return static_cast<unsigned>(v);
    throw invalid_argument(std::string("BBM_LAB_WORKERS must be a positive integer, got '") + env + "'");
  }
  return 1;
}

std::vector<ReplicateStatus> run_replicates(std::size_t reps, std::uint64_t master_seed,
                                            unsigned workers,
                                            const std::function<void(std::size_t, std::uint64_t)>& body) {
  std::vector<ReplicateStatus> status(reps);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> abort{false};
  std::exception_ptr fatal;
  std::mutex fatal_mutex;

  auto worker = [&] {
    for (;;) {
      if (abort.load()) return;
      const std::size_t rep = next.fetch_add(1);
      if (rep >= reps) return;
      try {
        body(rep, replicate_seed(master_seed, rep));
      } catch (const ResourceExhausted& e) {
        status[rep] = {false, e.what()};
      } catch (...) {
        std::lock_guard lock(fatal_mutex);
        if (!fatal) fatal = std::current_exception();
        abort.store(true);
        return;
      }
    }
  };

  const unsigned n = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(reps, 1))));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n);
    for (unsigned i = 0; i < n; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (fatal) std::rethrow_exception(fatal);
  if (reps > 0) {
    bool any = false;
    for (const auto& s : status) any = any || s.ok;
    if (!any) throw Error(ErrorKind::Resource, "every replicate exceeded its particle budget");
  }
  return status;
}

std::vector<FluctuationSample> run_fluctuation_ensemble(const FluctuationConfig& config) {
  if (!(config.t > 0.0 && config.big_t > config.t)) {
    throw invalid_argument("fluctuations need 0 < t < T (got t = " + std::to_string(config.t) +
                           ", T = " + std::to_string(config.big_t) + ")");
  }
  EngineConfig base = config.engine;
  base.horizon = config.big_t;
  base.snapshot_times = {config.t, config.big_t};
  base.barrier.reset();
  base.validate();
  const FunctionalSpec f = config.functional ? *config.functional : functional_from_key("one");

  std::vector<FluctuationSample> out(config.reps);
  const auto status = run_replicates(config.reps, config.seed, config.workers, [&](std::size_t rep, std::uint64_t seed) {
    EngineConfig engine = base;
    engine.seed = seed;
    FluctuationSample& s = out[rep];
    s.replicate = rep;
    s.t = config.t;
    const RunResult run = evolve(engine);
    const auto& at_t = snapshot_at(run, config.t);
    s.w_t = eval_additive(at_t);
    s.z_t = eval_derivative(at_t);
    s.z_t_f = eval_front(at_t, f, config.t);
    s.z_big_t = eval_derivative(snapshot_at(run, config.big_t));
    s.particles = run.stats.particles;
    s.status = "ok";
  });
  for (std::size_t rep = 0; rep < out.size(); ++rep) {
    if (!status[rep].ok) {
      out[rep] = FluctuationSample{};
      out[rep].replicate = rep;
      out[rep].t = config.t;
      out[rep].ok = false;
      out[rep].status = status[rep].message;
    }
  }
  return out;
}

}  // namespace bbmlab
