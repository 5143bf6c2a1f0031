#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>

// Counter-seeded random streams. Every consumer derives its generator from
// (run seed, stream tag, block index), so a run is reproducible bit-for-bit
// no matter how blocks are distributed over workers. Distributions are
// implemented here rather than taken from <random> because libstdc++ does not
// guarantee a stable draw sequence across versions.

namespace oamsim::rng {

constexpr std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Stable sub-stream derivation: hash chain over (seed, tag, block).
inline std::uint64_t substream_seed(std::uint64_t seed, std::uint32_t tag, std::uint64_t block) {
  std::uint64_t s = seed;
  std::uint64_t a = splitmix64(s);
  s ^= (std::uint64_t{tag} << 32) | 0x5bf03635ULL;
  std::uint64_t b = splitmix64(s);
  s ^= block;
  std::uint64_t c = splitmix64(s);
  return a ^ (b * 0x9e3779b97f4a7c15ULL) ^ c;
}

// xoshiro256++ (Blackman & Vigna), seeded through splitmix64.
class Xoshiro256pp {
 public:
  explicit Xoshiro256pp(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& w : s_) w = splitmix64(sm);
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

  // uniform in [0,1)
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  // uniform in (0,1]
  double uniform_pos() { return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53; }

  double exponential() { return -std::log(uniform_pos()); }

  bool bernoulli(double p) { return uniform() < p; }

  // standard normal, Marsaglia polar with one cached deviate
  double normal() {
    if (has_cache_) {
      has_cache_ = false;
      return cache_;
    }
    double u, v, r2;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      r2 = u * u + v * v;
    } while (r2 >= 1.0 || r2 == 0.0);
    const double f = std::sqrt(-2.0 * std::log(r2) / r2);
    cache_ = v * f;
    has_cache_ = true;
    return u * f;
  }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  std::array<std::uint64_t, 4> s_{};
  double cache_ = 0.0;
  bool has_cache_ = false;
};

// Draw from Poisson(mu) conditioned on >= 1, by CDF inversion. Intended for
// mu well below ~30 (per-pulse pair numbers are ~1e-2 here).
inline int zero_truncated_poisson(Xoshiro256pp& g, double mu) {
  const double p_any = -std::expm1(-mu);  // 1 - e^-mu
  double u = g.uniform() * p_any;
  double term = mu * std::exp(-mu);  // P(n=1)
  int n = 1;
  double cum = term;
  while (u > cum && n < 1000) {
    ++n;
    term *= mu / n;
    cum += term;
  }
  return n;
}

// Thermal (Bose-Einstein) pair number conditioned on >= 1: geometric with
// success probability 1/(1+mu).
inline int zero_truncated_thermal(Xoshiro256pp& g, double mu) {
  const double ratio = mu / (1.0 + mu);
  int n = 1;
  while (g.uniform() < ratio && n < 10000) ++n;
  return n;
}

// Iterates the pulses carrying at least one event of a per-pulse Bernoulli
// (or Poisson-thinned) process via geometric gaps. log_q is log of the
// per-pulse no-event probability: log1p(-p) for Bernoulli(p), -mu for
// Poisson(mu).
class EventGapWalker {
 public:
  EventGapWalker(double log_q, std::uint64_t begin, std::uint64_t end)
      : log_q_(log_q), pos_(begin), end_(end) {}

  std::optional<std::uint64_t> next(Xoshiro256pp& g) {
    if (log_q_ >= 0.0) return std::nullopt;  // p == 0
    const double gap = std::floor(std::log(g.uniform_pos()) / log_q_);
    if (!(gap < static_cast<double>(end_ - pos_))) {
      pos_ = end_;
      return std::nullopt;
    }
    pos_ += static_cast<std::uint64_t>(gap);
    if (pos_ >= end_) return std::nullopt;
    return pos_++;
  }

 private:
  double log_q_;
  std::uint64_t pos_;
  std::uint64_t end_;
};

}  // namespace oamsim::rng
