#pragma once

#include <array>
#include <cstdint>

namespace bbmlab {

/// SplitMix64 finalizer. Used to derive seeds and stream keys; never as a
/// generator on its own.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

/// Philox4x32-10 block function (Salmon et al., SC'11).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key) noexcept;

/// Counter-based random stream.
///
/// The output is a pure function of (seed, stream_id, counter): two streams
/// with identical parameters produce identical sequences regardless of thread
/// or schedule. A stream is cheap to construct, so the engine gives every
/// particle lineage its own stream.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id) noexcept
      : seed_(seed), stream_id_(stream_id) {}

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }
  /// Number of 64-bit words consumed so far.
  std::uint64_t counter() const noexcept { return counter_; }

  std::uint64_t next_u64() noexcept;
  /// Uniform on the open interval (0, 1).
  double uniform() noexcept;
  /// Standard normal, Box-Muller (both variates are used).
  double normal() noexcept;
  /// Exponential with the given rate.
  double exponential(double rate) noexcept;

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t counter_ = 0;
  std::uint64_t block_[2] = {0, 0};
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

/// Per-replicate seed derived from the master seed.
constexpr std::uint64_t replicate_seed(std::uint64_t master, std::uint64_t replicate) noexcept {
  return mix64(master ^ mix64(replicate + 0x5bd1e995ull));
}

/// Stream key of the child with the given birth order.
constexpr std::uint64_t child_stream(std::uint64_t parent, std::uint64_t child_index) noexcept {
  return mix64(parent + 0x632be59bd9b4e019ull * (child_index + 1));
}

}  // namespace bbmlab
