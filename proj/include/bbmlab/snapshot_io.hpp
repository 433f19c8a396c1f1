#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "bbmlab/engine.hpp"

namespace bbmlab {

inline constexpr char kSnapshotMagic[8] = {'B', 'B', 'M', 'S', 'N', 'A', 'P', '\0'};
inline constexpr std::uint32_t kSnapshotVersion = 1;

/// Binary layout, all integers and floats little-endian:
///   magic[8] | u32 version | u32 reserved | u64 snapshot count
///   per snapshot: f64 time | u64 record count
///   per record:   u64 id | u64 parent id | f64 birth | f64 position | i64 tag
/// Records are written sorted by id.
void write_snapshots(std::ostream& out, const std::vector<PopulationSnapshot>& snapshots);
void write_snapshots(const std::string& path, const std::vector<PopulationSnapshot>& snapshots);

std::vector<PopulationSnapshot> read_snapshots(std::istream& in);
std::vector<PopulationSnapshot> read_snapshots(const std::string& path);

}  // namespace bbmlab
