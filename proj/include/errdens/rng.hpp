#pragma once

#include <cmath>
#include <cstdint>

namespace errdens {

//! SplitMix64; used for seeding and for deriving independent substreams.
struct SplitMix64 {
  uint64_t state;

  explicit SplitMix64(uint64_t seed) : state(seed) {}

  uint64_t next()
  {
    uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
};

//! xoshiro256++ stream. Self-contained so that draws are reproducible
//! bit-for-bit independent of the standard library implementation.
class Rng {
public:
  explicit Rng(uint64_t seed)
  {
    SplitMix64 sm(seed);
    for (auto& word : s_)
      word = sm.next();
  }

  uint64_t next_u64()
  {
    const uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  //! Uniform on [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  //! Uniform on (0, 1]; safe as a log() argument.
  double uniform01_open_low()
  {
    return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  }

  //! Standard normal via Box-Muller (fixed two-uniform cost per draw).
  double normal()
  {
    const double u1 = uniform01_open_low();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
  }

private:
  static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  uint64_t s_[4];
};

//! Derives a substream seed from (master seed, a, b). Streams for distinct
//! (a, b) pairs are independent for practical purposes; the derivation is a
//! pure function, so replications can run in any order or in parallel.
inline uint64_t derive_stream(uint64_t master_seed, uint64_t a, uint64_t b)
{
  SplitMix64 sm(master_seed ^ 0x6a09e667f3bcc908ULL);
  uint64_t h = sm.next();
  h ^= a + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  SplitMix64 sm2(h);
  h = sm2.next();
  h ^= b + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  SplitMix64 sm3(h);
  return sm3.next();
}

} // namespace errdens
