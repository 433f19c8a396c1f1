#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "bbmlab/error.hpp"
#include "bbmlab/kernels.hpp"

namespace bbmlab {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Killing barrier at a fixed level over the time window [t_start, t_end].
struct BarrierSpec {
  double level = 0.0;
  double t_start = 0.0;
  double t_end = kInfinity;

  friend bool operator==(const BarrierSpec&, const BarrierSpec&) = default;
};

/// Barrier level 1/2 log t + beta_t used by the fluctuation experiments.
inline double gamma_level(double t, double beta) { return 0.5 * std::log(t) + beta; }

struct EngineConfig {
  double dt = 1e-2;
  double horizon = 10.0;
  double start = 0.0;
  /// Particles above this level are dropped; their e^{-X} weight is reported.
  std::optional<double> x_max = 40.0;
  OffspringLaw law = OffspringLaw::binary();
  Diffusion diffusion{};
  /// Times at which the population is recorded; each must lie in [0, horizon].
  std::vector<double> snapshot_times;
  std::optional<BarrierSpec> barrier;
  /// Absorbing floor (the -M of the global-minimum bound).
  std::optional<double> floor;
  /// Abandon the replicate as soon as any particle reaches the floor.
  bool stop_at_floor = false;
  /// Keep simulating the progeny of killed particles, tagged by the stopping
  /// line record they descend from. When false killed particles are frozen.
  bool continue_killed = false;
  /// Record every pruned particle in RunResult::pruned.
  bool record_pruned = false;
  std::uint64_t seed = 1;
  std::uint64_t max_particles = 5'000'000;

  /// Throws InvalidArgument naming the offending field.
  void validate() const;
};

struct Particle {
  std::uint64_t id = 0;
  std::uint64_t parent_id = 0;  // 0 for the root
  double birth_time = 0.0;
  double position = 0.0;
  bool alive = true;
  std::uint64_t stream_id = 0;
  /// Index of the stopping line record this lineage descends from, or -1.
  std::int64_t tag = -1;
};

struct SnapshotEntry {
  std::uint64_t id = 0;
  std::uint64_t parent_id = 0;
  double birth_time = 0.0;
  double position = 0.0;
  std::int64_t tag = -1;

  friend bool operator==(const SnapshotEntry&, const SnapshotEntry&) = default;
};

/// Population at a scheduled time, sorted by particle id.
struct PopulationSnapshot {
  double time = 0.0;
  std::vector<SnapshotEntry> particles;

  friend bool operator==(const PopulationSnapshot&, const PopulationSnapshot&) = default;
};

struct StoppingLineRecord {
  std::uint64_t id = 0;
  double time = 0.0;
  double position = 0.0;
  /// The particle was already at or below the level when the window opened.
  bool at_window_start = false;

  friend bool operator==(const StoppingLineRecord&, const StoppingLineRecord&) = default;
};

struct PrunedRecord {
  std::uint64_t id = 0;
  double time = 0.0;
  double position = 0.0;
  std::int64_t tag = -1;
};

struct RunStats {
  std::uint64_t particles = 0;
  std::uint64_t branch_events = 0;
  std::uint64_t steps = 0;
  std::uint64_t pruned = 0;
  /// Sum of e^{-X} over pruned particles: the expected additive-martingale
  /// mass lost to pruning.
  double pruned_weight = 0.0;
  std::uint64_t floor_hits = 0;
  std::optional<double> first_floor_time;
  bool stopped_at_floor = false;
};

struct RunResult {
  std::optional<BarrierSpec> barrier;
  bool continue_killed = false;
  std::vector<PopulationSnapshot> snapshots;
  std::vector<StoppingLineRecord> stopping_line;
  std::vector<PrunedRecord> pruned;
  RunStats stats;
};

/// Raised when the particle budget is exhausted; carries what was done.
class ResourceExhausted : public Error {
 public:
  ResourceExhausted(const std::string& what, RunStats stats)
      : Error(ErrorKind::Resource, what), stats_(stats) {}
  const RunStats& stats() const noexcept { return stats_; }

 private:
  RunStats stats_;
};

/// Simulates one replicate on [0, horizon].
///
/// Branching clocks are exact exponentials. Between branch events the path is
/// sampled exactly at every checkpoint (snapshot times, window edges, death);
/// inside an active barrier window it is refined to steps of at most dt and
/// each step is tested with the exact Brownian-bridge crossing probability.
/// A crossing time is attributed uniformly within its step. Each lineage owns
/// a counter-based stream, so pruning or freezing one particle never changes
/// the path of another.
RunResult evolve(const EngineConfig& config);

/// Returns the snapshot recorded at exactly time t.
const PopulationSnapshot& snapshot_at(const RunResult& run, double t);

/// Stopping line records with killing time in [t1, t2].
std::vector<StoppingLineRecord> extract_stopping_line(const RunResult& run, double t1, double t2);

}  // namespace bbmlab
