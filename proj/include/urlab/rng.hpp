#pragma once

// Counter-based random streams.
//
// Philox4x32-10 maps a 128-bit counter and a 64-bit key to 128 random bits. A
// stream is identified by (base_seed, replication, role): the seed selects the
// key, replication and role occupy the upper counter words, and the lower two
// counter words enumerate blocks within the stream. Streams therefore never
// overlap and any replication can be regenerated without touching the others.

#include <array>
#include <cstdint>
#include <limits>

namespace urlab {

using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

/// One application of the Philox4x32 bijection with 10 rounds.
PhiloxCounter philox4x32_10(PhiloxCounter counter, PhiloxKey key) noexcept;

/// Stream roles. Distinct roles of one replication draw from disjoint counters.
enum class StreamRole : std::uint32_t {
  innovations = 0,
  brownian_a = 1,
  brownian_b = 2,
  diagnostic = 3,
  // Resampling after a degenerate draw uses resample_base + attempt.
  resample_base = 0x100,
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// A sequential view of one counter-based stream. Satisfies
/// UniformRandomBitGenerator, so it plugs into <random> and Boost.Random.
class Stream {
 public:
  using result_type = std::uint64_t;

  Stream(std::uint64_t base_seed, std::uint64_t replication, std::uint32_t role) noexcept;
  Stream(std::uint64_t base_seed, std::uint64_t replication, StreamRole role) noexcept
      : Stream(base_seed, replication, static_cast<std::uint32_t>(role)) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    if (buffered_ == 0) refill();
    --buffered_;
    return buffer_[buffered_];
  }

  /// Uniform on the open interval (0, 1) with 53 random bits.
  double uniform() noexcept {
    return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Skip ahead by a whole number of 128-bit blocks.
  void discard_blocks(std::uint64_t blocks) noexcept;

  std::uint64_t block_index() const noexcept { return block_; }

 private:
  void refill() noexcept;

  PhiloxKey key_{};
  std::uint32_t replication_lo_ = 0;
  std::uint32_t role_word_ = 0;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int buffered_ = 0;
};

}  // namespace urlab
