#pragma once

#include <array>
#include <cstdint>
#include <utility>

namespace occtime {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter generate(Counter counter, Key key) noexcept;
};

/// A reproducible random stream keyed by (seed, stream_id).
///
/// Draw number k of a stream is a pure function of (seed, stream_id, k): the
/// k-th Philox block is computed from the counter (k, stream_id) under the
/// key seed. Streams with distinct ids never overlap, so replications can be
/// assigned to threads in any order without changing any draw.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id) noexcept;

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }
  /// Number of counter blocks consumed so far.
  std::uint64_t position() const noexcept { return block_; }

  /// Two independent uniforms on the open interval (0,1) with 53-bit
  /// resolution, from a single counter block.
  std::pair<double, double> uniform_pair() noexcept;

  /// One uniform on (0,1). Uses half a block; the other half is kept for
  /// the next call.
  double uniform() noexcept;

  /// Standard exponential variate.
  double exponential() noexcept;

  /// Pair of independent standard normal variates (Box-Muller).
  std::pair<double, double> normal_pair() noexcept;

 private:
  std::array<std::uint64_t, 2> next_block() noexcept;

  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t block_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace occtime
