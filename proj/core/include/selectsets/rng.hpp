#pragma once

#include <cstdint>

namespace selectsets {

// splitmix64: used to expand a master seed into per-replication seeds and to
// seed xoshiro state. Replication r draws from an independent splitmix stream
// offset, so replications form a splittable counter-based family: the stream
// for (seed, rep) never depends on how many replications run or in what order.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

// xoshiro256++ (Blackman/Vigna). Small, fast, and fully specified — the byte
// stream is part of this library's determinism contract, which rules out
// implementation-defined std:: distributions.
class Xoshiro256pp {
 public:
  explicit Xoshiro256pp(std::uint64_t seed) {
    SplitMix64 sm(seed);
    for (auto& w : s_) w = sm.next();
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  std::uint64_t s_[4];
};

// Single hash step of splitmix64 (stateless finalizer).
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Seed for replication index `rep` under master seed `seed`.
inline std::uint64_t replication_seed(std::uint64_t seed, std::uint64_t rep) {
  return mix64(seed + (rep + 1) * 0x9E3779B97F4A7C15ull);
}

inline Xoshiro256pp replication_rng(std::uint64_t seed, std::uint64_t rep) {
  return Xoshiro256pp(replication_seed(seed, rep));
}

}  // namespace selectsets
