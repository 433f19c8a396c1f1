#include "bbmlab/snapshot_io.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "bbmlab/error.hpp"

namespace bbmlab {

namespace {

template <typename T>
void put(std::ostream& out, T value) {
  static_assert(sizeof(T) == 4 || sizeof(T) == 8);
  using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
  U bits = std::bit_cast<U>(value);
  unsigned char bytes[sizeof(T)];
  for (std::size_t i = 0; i < sizeof(T); ++i) bytes[i] = static_cast<unsigned char>(bits >> (8 * i));
  out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
  using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
  unsigned char bytes[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(bytes), sizeof(T))) throw io_error("snapshot dump is truncated");
  U bits = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) bits |= static_cast<U>(bytes[i]) << (8 * i);
  return std::bit_cast<T>(bits);
}

}  // namespace

void write_snapshots(std::ostream& out, const std::vector<PopulationSnapshot>& snapshots) {
  out.write(kSnapshotMagic, sizeof kSnapshotMagic);
  put<std::uint32_t>(out, kSnapshotVersion);
  put<std::uint32_t>(out, 0);
  put<std::uint64_t>(out, snapshots.size());
  for (const auto& snap : snapshots) {
    put<double>(out, snap.time);
    put<std::uint64_t>(out, snap.particles.size());
    std::vector<SnapshotEntry> sorted = snap.particles;
    std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
    for (const auto& e : sorted) {
      put<std::uint64_t>(out, e.id);
      put<std::uint64_t>(out, e.parent_id);
      put<double>(out, e.birth_time);
      put<double>(out, e.position);
      put<std::int64_t>(out, e.tag);
    }
  }
  if (!out) throw io_error("failed writing snapshot dump");
}

void write_snapshots(const std::string& path, const std::vector<PopulationSnapshot>& snapshots) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw io_error("cannot open " + path + " for writing");
  write_snapshots(out, snapshots);
}

std::vector<PopulationSnapshot> read_snapshots(std::istream& in) {
  char magic[8];
  if (!in.read(magic, sizeof magic) || std::memcmp(magic, kSnapshotMagic, sizeof magic) != 0) {
    throw io_error("not a snapshot dump (bad magic)");
  }
  const auto version = get<std::uint32_t>(in);
  if (version != kSnapshotVersion) {
    throw io_error("unsupported snapshot dump version " + std::to_string(version));
  }
  get<std::uint32_t>(in);
  const auto count = get<std::uint64_t>(in);
  std::vector<PopulationSnapshot> out;
  for (std::uint64_t s = 0; s < count; ++s) {
    PopulationSnapshot snap;
    snap.time = get<double>(in);
    const auto n = get<std::uint64_t>(in);
    snap.particles.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(n, 1u << 20)));
    for (std::uint64_t i = 0; i < n; ++i) {
      SnapshotEntry e;
      e.id = get<std::uint64_t>(in);
      e.parent_id = get<std::uint64_t>(in);
      e.birth_time = get<double>(in);
      e.position = get<double>(in);
      e.tag = get<std::int64_t>(in);
      snap.particles.push_back(e);
    }
    out.push_back(std::move(snap));
  }
  return out;
}

std::vector<PopulationSnapshot> read_snapshots(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open " + path);
  return read_snapshots(in);
}

}  // namespace bbmlab
