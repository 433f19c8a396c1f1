#include "bbmlab/engine.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace bbmlab {

namespace {

constexpr std::uint64_t kRootStream = 0x243f6a8885a308d3ull;

struct Pending {
  Particle particle;
};

class Simulation {
 public:
  explicit Simulation(const EngineConfig& cfg) : cfg_(cfg) {
    schedule_ = cfg.snapshot_times;
    std::sort(schedule_.begin(), schedule_.end());
    schedule_.erase(std::unique(schedule_.begin(), schedule_.end()), schedule_.end());
    result_.barrier = cfg.barrier;
    result_.continue_killed = cfg.continue_killed;
    result_.snapshots.reserve(schedule_.size());
    for (double s : schedule_) result_.snapshots.push_back({s, {}});
  }

  RunResult run() {
    Particle root;
    root.id = next_id_++;
    root.position = cfg_.start;
    root.stream_id = kRootStream;
    stack_.push_back({root});
    while (!stack_.empty()) {
      Particle p = stack_.back().particle;
      stack_.pop_back();
      if (++result_.stats.particles > cfg_.max_particles) {
        throw ResourceExhausted("particle budget of " + std::to_string(cfg_.max_particles) +
                                    " exceeded at seed " + std::to_string(cfg_.seed),
                                result_.stats);
      }
      live(p);
      if (result_.stats.stopped_at_floor) break;
    }
    for (auto& snap : result_.snapshots) {
      std::sort(snap.particles.begin(), snap.particles.end(),
                [](const SnapshotEntry& a, const SnapshotEntry& b) { return a.id < b.id; });
    }
    return std::move(result_);
  }

 private:
  bool barrier_active(const Particle& p, double from, double to) const {
    if (!cfg_.barrier || p.tag >= 0) return false;
    return from >= cfg_.barrier->t_start && to <= cfg_.barrier->t_end;
  }

  // Returns false if the particle stops (frozen on the stopping line).
  bool kill(Particle& p, double time, double position, bool at_start) {
    p.tag = static_cast<std::int64_t>(result_.stopping_line.size());
    result_.stopping_line.push_back({p.id, time, position, at_start});
    return cfg_.continue_killed;
  }

  void record(const Particle& p, double t, double death) {
    // Census convention: a particle is present on [birth, death).
    if (!(t < death)) return;
    auto it = std::lower_bound(schedule_.begin(), schedule_.end(), t);
    if (it == schedule_.end() || *it != t) return;
    auto& snap = result_.snapshots[static_cast<std::size_t>(it - schedule_.begin())];
    snap.particles.push_back({p.id, p.parent_id, p.birth_time, p.position, p.tag});
  }

  void prune(const Particle& p, double t) {
    ++result_.stats.pruned;
    result_.stats.pruned_weight += std::exp(-p.position);
    if (cfg_.record_pruned) result_.pruned.push_back({p.id, t, p.position, p.tag});
  }

  double next_checkpoint(const Particle& p, double t, double end) const {
    double next = end;
    auto it = std::upper_bound(schedule_.begin(), schedule_.end(), t);
    if (it != schedule_.end()) next = std::min(next, *it);
    if (cfg_.barrier && p.tag < 0) {
      if (cfg_.barrier->t_start > t) next = std::min(next, cfg_.barrier->t_start);
      if (cfg_.barrier->t_end > t) next = std::min(next, cfg_.barrier->t_end);
    }
    return next;
  }

  void live(Particle p) {
    RngStream rng(cfg_.seed, p.stream_id);
    const double death = p.birth_time + branch_time(rng, cfg_.law);
    const double end = std::min(death, cfg_.horizon);
    const double sigma = cfg_.diffusion.sigma;
    const double drift = cfg_.diffusion.drift;
    double t = p.birth_time;

    auto at_checkpoint = [&](double now) -> bool {
      if (cfg_.barrier && p.tag < 0 && now == cfg_.barrier->t_start &&
          p.position <= cfg_.barrier->level) {
        if (!kill(p, now, p.position, true)) return false;
      }
      record(p, now, death);
      return true;
    };

    if (!at_checkpoint(t)) return;
    while (t < end) {
      const double next = next_checkpoint(p, t, end);
      const bool active = barrier_active(p, t, next);
      const double span = next - t;
      const auto steps = active ? std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(span / cfg_.dt))) : 1;
      const double h = span / static_cast<double>(steps);
      for (std::int64_t k = 1; k <= steps; ++k) {
        const double t_next = k == steps ? next : t + h;
        const double step = t_next - t;
        const double x0 = p.position;
        const double x1 = x0 + drift * step + sigma * std::sqrt(step) * rng.normal();
        ++result_.stats.steps;
        if (cfg_.floor) {
          const BridgeHit hit = bridge_min_hits(rng, x0, x1, step, *cfg_.floor, true, sigma);
          if (hit.hit) {
            ++result_.stats.floor_hits;
            const double when = t + hit.fraction * step;
            if (!result_.stats.first_floor_time || when < *result_.stats.first_floor_time) {
              result_.stats.first_floor_time = when;
            }
            if (cfg_.stop_at_floor) result_.stats.stopped_at_floor = true;
            return;
          }
        }
        if (active && p.tag < 0) {
          const BridgeHit hit = bridge_min_hits(rng, x0, x1, step, cfg_.barrier->level, true, sigma);
          if (hit.hit && !kill(p, t + hit.fraction * step, cfg_.barrier->level, false)) return;
        }
        p.position = x1;
        t = t_next;
        if (cfg_.x_max && p.position > *cfg_.x_max) {
          prune(p, t);
          return;
        }
      }
      if (!at_checkpoint(t)) return;
    }

    if (death > cfg_.horizon) return;
    ++result_.stats.branch_events;
    const int children = offspring_count(rng, cfg_.law);
    // Pushed in reverse so that the first child is simulated first.
    const std::uint64_t first_id = next_id_;
    next_id_ += static_cast<std::uint64_t>(children);
    for (int i = children - 1; i >= 0; --i) {
      Particle child;
      child.id = first_id + static_cast<std::uint64_t>(i);
      child.parent_id = p.id;
      child.birth_time = death;
      child.position = p.position;
      child.stream_id = child_stream(p.stream_id, static_cast<std::uint64_t>(i));
      child.tag = p.tag;
      stack_.push_back({child});
    }
  }

  const EngineConfig& cfg_;
  std::vector<double> schedule_;
  std::vector<Pending> stack_;
  std::uint64_t next_id_ = 1;
  RunResult result_;
};

void require(bool ok, const std::string& field, const std::string& message) {
  if (!ok) throw invalid_argument("engine." + field + ": " + message);
}

}  // namespace

void EngineConfig::validate() const {
  require(dt > 0.0 && std::isfinite(dt), "dt", "must be > 0");
  require(horizon > 0.0 && std::isfinite(horizon), "horizon", "must be > 0 and finite");
  require(std::isfinite(start), "start", "must be finite");
  require(diffusion.sigma > 0.0, "sigma", "must be > 0");
  for (double s : snapshot_times) {
    require(s >= 0.0 && s <= horizon, "snapshots", "time " + std::to_string(s) + " outside [0, horizon]");
  }
  if (barrier) {
    require(barrier->t_start <= barrier->t_end, "barrier", "t_start must not exceed t_end");
    require(barrier->t_start >= 0.0, "barrier", "t_start must be >= 0");
    require(std::isfinite(barrier->level), "barrier", "level must be finite");
  }
  if (x_max) {
    const double lowest_allowed = (barrier ? barrier->level : start) + 10.0;
    require(*x_max > lowest_allowed, "x_max",
            "must exceed the barrier level (or start) by more than 10, got " + std::to_string(*x_max));
  }
  if (floor) require(*floor < start, "floor", "must lie below the start position");
  require(max_particles > 0, "max_particles", "must be positive");
}

RunResult evolve(const EngineConfig& config) {
  config.validate();
  return Simulation(config).run();
}

const PopulationSnapshot& snapshot_at(const RunResult& run, double t) {
  for (const auto& snap : run.snapshots) {
    if (snap.time == t) return snap;
  }
  throw invalid_argument("no snapshot was scheduled at t = " + std::to_string(t));
}

std::vector<StoppingLineRecord> extract_stopping_line(const RunResult& run, double t1, double t2) {
  std::vector<StoppingLineRecord> out;
  if (!run.barrier) return out;
  for (const auto& rec : run.stopping_line) {
    if (rec.time >= t1 && rec.time <= t2) out.push_back(rec);
  }
  return out;
}

}  // namespace bbmlab
