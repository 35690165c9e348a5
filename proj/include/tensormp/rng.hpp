#pragma once

// Counter-based splittable random streams (Philox4x32-10, Salmon et al.,
// "Parallel random numbers: as easy as 1, 2, 3", SC'11).
//
// A stream is addressed by (master seed, stream id): the seed is the cipher
// key and the stream id occupies the high counter words, so distinct ids
// yield statistically independent sequences and any (seed, id) pair replays
// the same sequence on every run.  Monte Carlo code derives one stream per
// replicate, which makes the replicate loop order- and thread-agnostic.

#include <array>
#include <cmath>
#include <cstdint>

#include "tensormp/common.hpp"

namespace tensormp {

namespace detail {

inline void philox_round(std::array<std::uint32_t, 4>& ctr,
                         const std::array<std::uint32_t, 2>& key) {
  constexpr std::uint32_t kMul0 = 0xD2511F53u;
  constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * ctr[0];
  const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * ctr[2];
  const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
  const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
  const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
  const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
  ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
}

}  // namespace detail

// One 10-round Philox4x32 block.
inline std::array<std::uint32_t, 4> philox4x32(
    std::array<std::uint32_t, 4> counter, std::array<std::uint32_t, 2> key) {
  for (int round = 0;; ++round) {
    detail::philox_round(counter, key);
    if (round == 9) break;
    key[0] += 0x9E3779B9u;  // golden ratio
    key[1] += 0xBB67AE85u;  // sqrt(3) - 1
  }
  return counter;
}

class PhiloxStream {
 public:
  PhiloxStream(std::uint64_t seed, std::uint64_t stream_id)
      : key_{static_cast<std::uint32_t>(seed),
             static_cast<std::uint32_t>(seed >> 32)},
        base_{0u, 0u, static_cast<std::uint32_t>(stream_id),
              static_cast<std::uint32_t>(stream_id >> 32)} {}

  std::uint64_t next_u64() {
    if (word_pos_ == 4) refill();
    const std::uint64_t lo = buffer_[word_pos_];
    const std::uint64_t hi = buffer_[word_pos_ + 1];
    word_pos_ += 2;
    return (hi << 32) | lo;
  }

  // Uniform on [0, 1), 53-bit resolution.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform on (0, 1]; safe as a logarithm argument.
  double next_open_double() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller; the second deviate of each pair is cached.
  double next_gaussian() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    const double u1 = next_open_double();
    const double u2 = next_double();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * kPi * u2;
    cached_ = r * std::sin(theta);
    have_cached_ = true;
    return r * std::cos(theta);
  }

  double next_exponential() { return -std::log(next_open_double()); }

  // Gamma(alpha, 1) via Marsaglia-Tsang squeeze; alpha < 1 is boosted through
  // Gamma(alpha + 1) * U^{1/alpha}.
  double next_gamma(double alpha) {
    if (!(alpha > 0.0)) throw std::invalid_argument("next_gamma: alpha <= 0");
    if (alpha < 1.0) {
      const double boost = std::pow(next_open_double(), 1.0 / alpha);
      return next_gamma(alpha + 1.0) * boost;
    }
    const double d = alpha - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x;
      double v;
      do {
        x = next_gaussian();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = next_open_double();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

 private:
  void refill() {
    std::array<std::uint32_t, 4> ctr = base_;
    ctr[0] = static_cast<std::uint32_t>(block_);
    ctr[1] = static_cast<std::uint32_t>(block_ >> 32);
    buffer_ = philox4x32(ctr, key_);
    ++block_;
    word_pos_ = 0;
  }

  std::array<std::uint32_t, 2> key_;
  std::array<std::uint32_t, 4> base_;
  std::array<std::uint32_t, 4> buffer_{};
  std::uint64_t block_ = 0;
  int word_pos_ = 4;
  double cached_ = 0.0;
  bool have_cached_ = false;
};

// Stream for one replicate of a run keyed by master_seed.
inline PhiloxStream derive_stream(std::uint64_t master_seed,
                                  std::uint64_t replicate_index) {
  return PhiloxStream(master_seed, replicate_index);
}

}  // namespace tensormp
