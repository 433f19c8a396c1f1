#include <doctest.h>

#include <cstring>
#include <sstream>

#include "bbmlab/engine.hpp"
#include "bbmlab/error.hpp"
#include "bbmlab/snapshot_io.hpp"

using namespace bbmlab;

TEST_CASE("round trip is lossless") {
  EngineConfig e;
  e.horizon = 5.0;
  e.snapshot_times = {1.0, 5.0};
  e.seed = 12;
  const auto run = evolve(e);
  std::stringstream buf;
  write_snapshots(buf, run.snapshots);
  CHECK(read_snapshots(buf) == run.snapshots);
}

TEST_CASE("header layout is little-endian and versioned") {
  PopulationSnapshot s;
  s.time = 1.5;
  s.particles.push_back({3, 1, 0.25, -0.5, -1});
  std::stringstream buf;
  write_snapshots(buf, {s});
  const std::string bytes = buf.str();
  REQUIRE(bytes.size() == 8 + 4 + 4 + 8 + 16 + 40);
  CHECK(std::memcmp(bytes.data(), kSnapshotMagic, 8) == 0);
  CHECK(static_cast<unsigned char>(bytes[8]) == 1);
  CHECK(bytes[9] == 0);
  CHECK(static_cast<unsigned char>(bytes[16]) == 1);
  // first record id = 3 in little-endian order
  CHECK(static_cast<unsigned char>(bytes[40]) == 3);
}

TEST_CASE("records are written sorted by id") {
  PopulationSnapshot s;
  s.time = 2.0;
  s.particles.push_back({9, 1, 0.0, 1.0, -1});
  s.particles.push_back({4, 1, 0.0, 2.0, -1});
  std::stringstream buf;
  write_snapshots(buf, {s});
  const auto back = read_snapshots(buf);
  CHECK(back[0].particles[0].id == 4);
  CHECK(back[0].particles[1].id == 9);
}

TEST_CASE("corrupt input is rejected") {
  std::stringstream bad("NOTASNAP........");
  CHECK_THROWS_AS(read_snapshots(bad), Error);
  std::stringstream truncated(std::string(kSnapshotMagic, 8) + "\x01");
  CHECK_THROWS_AS(read_snapshots(truncated), Error);
}
