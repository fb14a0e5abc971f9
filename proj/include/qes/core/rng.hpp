#pragma once

// Reproducible random streams.
//
// Every stream is addressed by (master seed, domain, a, b): a Philox4x64-10
// block keyed by the master seed and evaluated at counter (a, b, domain, lane)
// yields the 256-bit state of one xoshiro256++ lane. Streams therefore never
// depend on how many other streams were created before them, which is what
// lets cycles and sweep points run on any worker in any order.

#include <array>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <numbers>

namespace qes {

using Philox4x64 = std::array<std::uint64_t, 4>;

namespace detail {

inline void mulhilo64(std::uint64_t a, std::uint64_t b, std::uint64_t& hi, std::uint64_t& lo) noexcept {
  const unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
  hi = static_cast<std::uint64_t>(p >> 64);
  lo = static_cast<std::uint64_t>(p);
}

constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept { return (x << k) | (x >> (64 - k)); }

constexpr std::uint64_t splitmix64(std::uint64_t& x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace detail

/// Philox4x64-10 bijection (Salmon et al., SC'11). Matches numpy.random.Philox block output.
inline Philox4x64 philox4x64_10(Philox4x64 ctr, std::array<std::uint64_t, 2> key) noexcept {
  constexpr std::uint64_t kM0 = 0xD2E7470EE14C6C93ULL;
  constexpr std::uint64_t kM1 = 0xCA5A826395121157ULL;
  constexpr std::uint64_t kW0 = 0x9E3779B97F4A7C15ULL;
  constexpr std::uint64_t kW1 = 0xBB67AE8584CAA73BULL;
  for (int round = 0; round < 10; ++round) {
    std::uint64_t hi0, lo0, hi1, lo1;
    detail::mulhilo64(kM0, ctr[0], hi0, lo0);
    detail::mulhilo64(kM1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kW0;
    key[1] += kW1;
  }
  return ctr;
}

/// Stream families. Values are part of the reproducibility contract; never renumber.
enum class StreamDomain : std::uint64_t {
  laser_noise = 1,     // a = ensemble, b = cycle * 2 + laser
  amplifier = 2,       // a = ensemble, b = trace index
  extractor_seed = 3,  // a = 0, b = 0
  batch = 4,           // a = experiment-local batch / sweep index
  user = 5,            // free for tests and tools
};

/// xoshiro256++ (Blackman & Vigna). Satisfies UniformRandomBitGenerator.
class Xoshiro256pp {
 public:
  using result_type = std::uint64_t;

  constexpr explicit Xoshiro256pp(std::uint64_t seed = 1) noexcept {
    for (auto& w : s_) w = detail::splitmix64(seed);
  }
  constexpr explicit Xoshiro256pp(const std::array<std::uint64_t, 4>& state) noexcept : s_(state) {
    if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 1;
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return ~result_type{0}; }

  constexpr result_type operator()() noexcept {
    const std::uint64_t result = detail::rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = detail::rotl(s_[3], 45);
    return result;
  }

  /// Uniform double in [0, 1).
  double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

 private:
  std::array<std::uint64_t, 4> s_{};
};

/// State for lane `lane` of stream (domain, a, b) under `master_seed`.
inline std::array<std::uint64_t, 4> stream_state(std::uint64_t master_seed, StreamDomain domain, std::uint64_t a,
                                                 std::uint64_t b, std::uint64_t lane = 0) noexcept {
  constexpr std::uint64_t kKeySalt = 0x51455350494331ULL;  // "QESPIC1"
  return philox4x64_10({a, b, static_cast<std::uint64_t>(domain), lane}, {master_seed, kKeySalt});
}

inline Xoshiro256pp make_stream(std::uint64_t master_seed, StreamDomain domain, std::uint64_t a, std::uint64_t b) {
  return Xoshiro256pp(stream_state(master_seed, domain, a, b));
}

/// Derive a child master seed; used to give each experiment batch its own seed space.
inline std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index) noexcept {
  return stream_state(master_seed, StreamDomain::batch, index, 0)[0];
}

namespace fastmath {

// Branch-free kernels used by the batched Gaussian generator so the refill loop
// vectorizes. Accuracy is a few ulp over the ranges used below.

/// Natural log for x in (0, 1].
inline double log_unit(double x) noexcept {
  // Split x = 2^k * m with m in [sqrt(1/2), sqrt(2)) using integer arithmetic only.
  constexpr std::uint64_t kSqrtHalfBits = 0x3FE6A09E667F3BCDULL;
  const std::uint64_t bits = std::bit_cast<std::uint64_t>(x);
  const std::uint64_t tmp = bits - kSqrtHalfBits;
  const double e = static_cast<double>(static_cast<std::int64_t>(tmp) >> 52);
  const double m = std::bit_cast<double>(bits - (tmp & 0xFFF0000000000000ULL));
  const double s = (m - 1.0) / (m + 1.0);
  const double s2 = s * s;
  // 2 atanh(s) with |s| <= 0.1716; truncation error below 1e-17.
  double p = 1.0 / 19.0;
  p = p * s2 + 1.0 / 17.0;
  p = p * s2 + 1.0 / 15.0;
  p = p * s2 + 1.0 / 13.0;
  p = p * s2 + 1.0 / 11.0;
  p = p * s2 + 1.0 / 9.0;
  p = p * s2 + 1.0 / 7.0;
  p = p * s2 + 1.0 / 5.0;
  p = p * s2 + 1.0 / 3.0;
  p = p * s2 + 1.0;
  constexpr double kLn2Hi = 6.93147180369123816490e-01;
  constexpr double kLn2Lo = 1.90821492927058770002e-10;
  return e * kLn2Hi + (2.0 * s * p + e * kLn2Lo);
}

/// sin and cos for |x| <= pi/4.
inline void sincos_octant(double x, double& s, double& c) noexcept {
  const double x2 = x * x;
  double ps = -1.0 / 1307674368000.0;  // -1/15!
  ps = ps * x2 + 1.0 / 6227020800.0;
  ps = ps * x2 - 1.0 / 39916800.0;
  ps = ps * x2 + 1.0 / 362880.0;
  ps = ps * x2 - 1.0 / 5040.0;
  ps = ps * x2 + 1.0 / 120.0;
  ps = ps * x2 - 1.0 / 6.0;
  s = x + x * x2 * ps;
  double pc = 1.0 / 20922789888000.0;  // 1/16!
  pc = pc * x2 - 1.0 / 87178291200.0;
  pc = pc * x2 + 1.0 / 479001600.0;
  pc = pc * x2 - 1.0 / 3628800.0;
  pc = pc * x2 + 1.0 / 40320.0;
  pc = pc * x2 - 1.0 / 720.0;
  pc = pc * x2 + 1.0 / 24.0;
  pc = pc * x2 - 0.5;
  c = 1.0 + x2 * pc;
}

}  // namespace fastmath

/// Standard-normal stream backed by four interleaved xoshiro256++ lanes and a
/// batched Box-Muller transform. Draw order is fixed by (master, domain, a, b)
/// alone, so two consumers reading the same stream see the same sequence.
class NormalStream {
 public:
  static constexpr std::size_t kLanes = 4;
  static constexpr std::size_t kPairsPerLane = 64;
  static constexpr std::size_t kBatch = 2 * kLanes * kPairsPerLane;

  NormalStream() : NormalStream(0, StreamDomain::user, 0, 0) {}

  NormalStream(std::uint64_t master_seed, StreamDomain domain, std::uint64_t a, std::uint64_t b) {
    reseed(master_seed, domain, a, b);
  }

  void reseed(std::uint64_t master_seed, StreamDomain domain, std::uint64_t a, std::uint64_t b) {
    for (std::size_t lane = 0; lane < kLanes; ++lane) {
      auto st = stream_state(master_seed, domain, a, b, lane);
      if ((st[0] | st[1] | st[2] | st[3]) == 0) st[0] = 1;
      s0_[lane] = st[0];
      s1_[lane] = st[1];
      s2_[lane] = st[2];
      s3_[lane] = st[3];
    }
    pos_ = kBatch;
  }

  double operator()() {
    if (pos_ == kBatch) refill();
    return buf_[pos_++];
  }

  /// Next `count` draws as a contiguous span. Mixing take() and operator() on
  /// one stream keeps the same sequence as long as kBatch % count == 0.
  const double* take(std::size_t count) {
    if (pos_ + count > kBatch) refill();
    const double* p = buf_.data() + pos_;
    pos_ += count;
    return p;
  }

 private:
  [[gnu::noinline]] void refill() {
    constexpr std::size_t kPairs = kBatch / 2;
    using Lanes = std::uint64_t __attribute__((vector_size(8 * kLanes)));
    alignas(64) std::uint64_t words[kBatch];
    Lanes a, b, c, d;
    std::memcpy(&a, s0_.data(), sizeof a);
    std::memcpy(&b, s1_.data(), sizeof b);
    std::memcpy(&c, s2_.data(), sizeof c);
    std::memcpy(&d, s3_.data(), sizeof d);
    for (std::size_t j = 0; j < kBatch; j += kLanes) {
      const Lanes sum = a + d;
      const Lanes out = ((sum << 23) | (sum >> 41)) + a;
      std::memcpy(words + j, &out, sizeof out);
      const Lanes t = b << 17;
      c ^= a;
      d ^= b;
      b ^= c;
      a ^= d;
      c ^= t;
      d = (d << 45) | (d >> 19);
    }
    std::memcpy(s0_.data(), &a, sizeof a);
    std::memcpy(s1_.data(), &b, sizeof b);
    std::memcpy(s2_.data(), &c, sizeof c);
    std::memcpy(s3_.data(), &d, sizeof d);
    alignas(64) double re[kPairs], im[kPairs];
    for (std::size_t k = 0; k < kPairs; ++k) {
      const std::uint64_t wr = words[k];
      const std::uint64_t wa = words[k + kPairs];
      // radius from u in (0, 1]
      const double u = 2.0 - std::bit_cast<double>((wr >> 12) | 0x3FF0000000000000ULL);
      const double r = std::sqrt(-2.0 * fastmath::log_unit(u));
      // angle = quadrant * pi/2 + x, x uniform in [-pi/4, pi/4)
      const double f = std::bit_cast<double>((wa >> 12) | 0x3FF0000000000000ULL) - 1.0;
      const double x = (f - 0.5) * (0.5 * std::numbers::pi);
      double sn, cs;
      fastmath::sincos_octant(x, sn, cs);
      // rotate by the quadrant without branches
      // 1.0 with mantissa bit 51 set is 1.5, so each expression below is exactly 0 or 1
      const double odd = 2.0 * (std::bit_cast<double>(((wa & 1) << 51) | 0x3FF0000000000000ULL) - 1.0);
      const double flip = 2.0 * (std::bit_cast<double>((((wa >> 1) & 1) << 51) | 0x3FF0000000000000ULL) - 1.0);
      const double sign = 1.0 - 2.0 * flip;
      re[k] = r * sign * (cs + odd * (-sn - cs));
      im[k] = r * sign * (sn + odd * (cs - sn));
    }
    for (std::size_t k = 0; k < kPairs; ++k) {
      buf_[2 * k] = re[k];
      buf_[2 * k + 1] = im[k];
    }
    pos_ = 0;
  }

  alignas(64) std::array<std::uint64_t, kLanes> s0_{}, s1_{}, s2_{}, s3_{};
  alignas(64) std::array<double, kBatch> buf_{};
  std::size_t pos_ = kBatch;
};

}  // namespace qes
