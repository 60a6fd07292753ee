#pragma once

#include <array>
#include <cstdint>

namespace mucogarch {

// Counter-based generator (Philox4x32-10). A stream is fully determined by
// (seed, replicate, stream_id), so replicates and parallel chunks are
// independent and reproducible regardless of execution order.
class PhiloxRng {
 public:
  // stream_id < 256; replicate < 2^56.
  PhiloxRng(std::uint64_t seed, std::uint64_t replicate, std::uint32_t stream_id);

  std::uint64_t next_u64();

  // Uniform on [0, 1): 53-bit mantissa, so 1 - u is bounded away from 0.
  double uniform();

  // Standard normal via Box-Muller; the second value of each pair is cached.
  double normal();

  // Exponential with the given rate (mean 1/rate).
  double exponential(double rate);

  // One keyed block cipher application; exposed for known-answer tests.
  static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> ctr,
                                            std::array<std::uint32_t, 2> key);

 private:
  std::array<std::uint32_t, 2> key_;
  std::array<std::uint32_t, 2> prefix_;  // (c2, c3): replicate and stream packing
  std::uint64_t block_index_ = 0;        // fills (c0, c1)
  std::array<std::uint32_t, 4> buffer_{};
  int pos_ = 4;  // next unread u32 lane; 4 forces a refill
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;

  void refill();
};

}  // namespace mucogarch
