#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "bbmlab/engine.hpp"
#include "bbmlab/functionals.hpp"

namespace bbmlab {

/// Number of worker threads: the explicit request if positive, otherwise
/// the BBM_LAB_WORKERS environment variable, otherwise 1.
unsigned resolve_workers(unsigned requested);

struct ReplicateStatus {
  bool ok = true;
  std::string message;  // set when the replicate failed
};

/// Runs body(rep, seed) for rep in [0, reps) on the given number of threads.
/// seed = replicate_seed(master_seed, rep), so results never depend on the
/// worker count or scheduling as long as body writes only to slot rep.
/// A replicate that throws ResourceExhausted is recorded as failed and the
/// ensemble continues; any other exception is rethrown after all workers
/// stop. Throws Resource when every replicate failed.
std::vector<ReplicateStatus> run_replicates(std::size_t reps, std::uint64_t master_seed,
                                            unsigned workers,
                                            const std::function<void(std::size_t, std::uint64_t)>& body);

/// Replicate ensemble for the fluctuation statistics: each replicate is
/// observed at t and at the proxy time big_t > t.
struct FluctuationConfig {
  EngineConfig engine;  // horizon and snapshots are set from t and big_t
  double t = 20.0;
  double big_t = 25.0;
  std::size_t reps = 2000;
  std::uint64_t seed = 1;
  unsigned workers = 1;
  /// Functional for Z_t(F); the derivative martingale when unset.
  std::optional<FunctionalSpec> functional;
};

struct FluctuationSample {
  std::size_t replicate = 0;
  bool ok = true;
  std::string status;  // "ok" or the failure message
  double t = 0.0;
  double w_t = 0.0;
  double z_t = 0.0;
  double z_t_f = 0.0;
  double z_big_t = 0.0;
  std::uint64_t particles = 0;
};

std::vector<FluctuationSample> run_fluctuation_ensemble(const FluctuationConfig& config);

}  // namespace bbmlab
