#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "bbmlab/engine.hpp"
#include "bbmlab/error.hpp"
#include "bbmlab/functionals.hpp"

using namespace bbmlab;

namespace {

EngineConfig basic(double horizon, std::uint64_t seed) {
  EngineConfig e;
  e.horizon = horizon;
  e.snapshot_times = {horizon / 2, horizon};
  e.seed = seed;
  return e;
}

std::string validation_message(const EngineConfig& e) {
  try {
    e.validate();
  } catch (const Error& err) {
    return err.what();
  }
  return {};
}

}  // namespace

TEST_CASE("same seed, same run") {
  const auto a = evolve(basic(6.0, 17));
  const auto b = evolve(basic(6.0, 17));
  REQUIRE(a.snapshots.size() == 2);
  CHECK(a.snapshots == b.snapshots);
  CHECK(a.stats.particles == b.stats.particles);
  const auto c = evolve(basic(6.0, 18));
  CHECK_FALSE(a.snapshots == c.snapshots);
}

TEST_CASE("snapshots are sorted by id and consistent with the genealogy") {
  const auto run = evolve(basic(8.0, 3));
  for (const auto& snap : run.snapshots) {
    CHECK(std::is_sorted(snap.particles.begin(), snap.particles.end(),
                         [](const SnapshotEntry& x, const SnapshotEntry& y) { return x.id < y.id; }));
    for (const auto& p : snap.particles) {
      CHECK(p.birth_time <= snap.time);
      if (p.id != 1) CHECK(p.parent_id < p.id);
    }
  }
}

TEST_CASE("root alone until its first branching") {
  EngineConfig e = basic(1e-9, 4);
  const auto run = evolve(e);
  CHECK(run.snapshots.back().particles.size() == 1);
  CHECK(run.snapshots.back().particles.front().id == 1);
}

TEST_CASE("validation names the offending field") {
  EngineConfig e = basic(1.0, 1);
  e.dt = 0.0;
  CHECK(validation_message(e).find("engine.dt") != std::string::npos);
  e = basic(1.0, 1);
  e.snapshot_times = {2.0};
  CHECK(validation_message(e).find("engine.snapshots") != std::string::npos);
  e = basic(1.0, 1);
  e.floor = 0.5;
  CHECK(validation_message(e).find("engine.floor") != std::string::npos);
  e = basic(1.0, 1);
  e.x_max = 5.0;
  CHECK(validation_message(e).find("engine.x_max") != std::string::npos);
}

TEST_CASE("particle budget overflow is a resource error with partial stats") {
  EngineConfig e = basic(20.0, 5);
  e.max_particles = 50;
  try {
    evolve(e);
    FAIL("expected ResourceExhausted");
  } catch (const ResourceExhausted& r) {
    CHECK(r.kind() == ErrorKind::Resource);
    CHECK(r.stats().particles > 0);
  }
}

TEST_CASE("freeze mode: killed lineages leave the population") {
  EngineConfig e = basic(5.0, 9);
  e.start = 1.0;
  e.barrier = BarrierSpec{0.0, 0.0, kInfinity};
  const auto run = evolve(e);
  for (const auto& snap : run.snapshots) {
    for (const auto& p : snap.particles) {
      CHECK(p.tag < 0);
      CHECK(p.position > 0.0);
    }
  }
  for (const auto& r : run.stopping_line) CHECK(r.position <= 1e-12);
}

TEST_CASE("continue mode keeps tagged progeny; freeze and continue agree on the untagged part") {
  EngineConfig e = basic(6.0, 21);
  e.start = 0.5;
  e.barrier = BarrierSpec{0.0, 1.0, 4.0};
  e.snapshot_times = {6.0};
  const auto frozen = evolve(e);
  e.continue_killed = true;
  const auto cont = evolve(e);
  CHECK(frozen.stopping_line == cont.stopping_line);
  std::vector<SnapshotEntry> untagged;
  for (const auto& p : cont.snapshots[0].particles) {
    if (p.tag < 0) untagged.push_back(p);
  }
  CHECK(untagged == frozen.snapshots[0].particles);
}

TEST_CASE("window-start kills are flagged") {
  EngineConfig e = basic(3.0, 2);
  e.start = 0.0;
  e.barrier = BarrierSpec{10.0, 1.0, 2.0};  // everyone is below 10 when the window opens
  const auto run = evolve(e);
  REQUIRE_FALSE(run.stopping_line.empty());
  for (const auto& r : run.stopping_line) {
    CHECK(r.at_window_start);
    CHECK(r.time == 1.0);
  }
  CHECK(run.snapshots.back().particles.empty());
}

TEST_CASE("floor stop abandons the run") {
  EngineConfig e = basic(10.0, 77);
  e.floor = -0.1;
  e.stop_at_floor = true;
  int hit = 0;
  for (std::uint64_t s = 0; s < 50; ++s) {
    e.seed = s;
    hit += evolve(e).stats.floor_hits > 0;
  }
  CHECK(hit > 0);
  CHECK(hit < 50);
}

TEST_CASE("extract_stopping_line filters by time") {
  EngineConfig e = basic(4.0, 31);
  e.start = 1.0;
  e.barrier = BarrierSpec{0.0, 0.0, kInfinity};
  for (std::uint64_t s = 0; s < 20; ++s) {
    e.seed = s;
    const auto run = evolve(e);
    for (const auto& r : extract_stopping_line(run, 1.0, 2.0)) {
      CHECK(r.time >= 1.0);
      CHECK(r.time <= 2.0);
    }
  }
}
