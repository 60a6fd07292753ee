#include "core/rng.hpp"

#include <cmath>

namespace mucogarch {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

inline std::array<std::uint32_t, 4> round_once(const std::array<std::uint32_t, 4>& c,
                                               const std::array<std::uint32_t, 2>& k) {
  std::uint32_t hi0, lo0, hi1, lo1;
  mulhilo(kMul0, c[0], hi0, lo0);
  mulhilo(kMul1, c[2], hi1, lo1);
  return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
}

constexpr double kTwoPi = 6.283185307179586476925286766559;

}  // namespace

std::array<std::uint32_t, 4> PhiloxRng::block(std::array<std::uint32_t, 4> ctr,
                                              std::array<std::uint32_t, 2> key) {
  for (int r = 0; r < 10; ++r) {
    ctr = round_once(ctr, key);
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return ctr;
}

PhiloxRng::PhiloxRng(std::uint64_t seed, std::uint64_t replicate, std::uint32_t stream_id) {
  key_ = {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  prefix_ = {static_cast<std::uint32_t>(replicate),
             (stream_id & 0xFFu) | (static_cast<std::uint32_t>(replicate >> 32) << 8)};
}

void PhiloxRng::refill() {
  buffer_ = block({static_cast<std::uint32_t>(block_index_),
                   static_cast<std::uint32_t>(block_index_ >> 32), prefix_[0], prefix_[1]},
                  key_);
  ++block_index_;
  pos_ = 0;
}

std::uint64_t PhiloxRng::next_u64() {
  if (pos_ >= 4) refill();
  std::uint64_t lo = buffer_[pos_];
  std::uint64_t hi = buffer_[pos_ + 1];
  pos_ += 2;
  return lo | (hi << 32);
}

double PhiloxRng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double PhiloxRng::normal() {
  if (has_cached_normal_) {
    has_cached_normal_ = false;
    return cached_normal_;
  }
  double u1 = uniform();
  double u2 = uniform();
  double r = std::sqrt(-2.0 * std::log(1.0 - u1));  // 1 - u1 >= 2^-53 > 0
  cached_normal_ = r * std::sin(kTwoPi * u2);
  has_cached_normal_ = true;
  return r * std::cos(kTwoPi * u2);
}

double PhiloxRng::exponential(double rate) {
  return -std::log1p(-uniform()) / rate;
}

}  // namespace mucogarch
