#pragma once

#include <cstdint>

// Self-contained random number generation.  The standard library engines and
// distributions are deliberately not used: their output is not pinned across
// implementations, and every number drawn here must be bit-for-bit
// reproducible from a seed alone.  The generator is PCG32 (XSH-RR 64/32);
// seed material is spread with SplitMix64.
//
// Stream discipline: independent consumers never share a generator.  Each
// consumer builds its own Pcg32 from a seed derived with derive_seed plus a
// fixed stream id from StreamId, so adding draws to one consumer cannot
// perturb another.

namespace pmeta::rng {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

// Fixed PCG stream selectors, one per consumer kind.
enum StreamId : std::uint64_t {
  kStreamSignMatrix = 1,  // resampled sign matrices
  kStreamMetaDraw = 2,    // simulated meta-analyses
  kStreamOracle = 3,      // large-sample truth evaluation
  kStreamGeneric = 4,     // tests and ad hoc sampling
};

struct SplitMix64 {
  std::uint64_t state;
  explicit SplitMix64(std::uint64_t seed) : state(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (state += kGolden);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }
};

// Maps (base seed, index) to a well-mixed child seed.  Used wherever work is
// split into independently seeded units (replications, chunks, grid cells).
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  SplitMix64 sm(base + (index + 1) * kGolden);
  return sm.next();
}

class Pcg32 {
 public:
  explicit Pcg32(std::uint64_t seed, std::uint64_t stream = kStreamGeneric)
      : state_(0), inc_((stream << 1u) | 1u) {
    next_u32();
    state_ += seed;
    next_u32();
  }

  std::uint32_t next_u32() {
    const std::uint64_t old = state_;
    state_ = old * 6364136223846793005ull + inc_;
    const auto xorshifted = static_cast<std::uint32_t>(((old >> 18u) ^ old) >> 27u);
    const auto rot = static_cast<std::uint32_t>(old >> 59u);
    return (xorshifted >> rot) | (xorshifted << ((32u - rot) & 31u));
  }

  std::uint64_t next_u64() {
    const std::uint64_t hi = next_u32();
    return (hi << 32) | next_u32();
  }

  // Uniform on [0, 1) with 53 random bits.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform on the open interval (0, 1); safe to feed to quantile functions.
  double next_open() {
    return (static_cast<double>(next_u64() >> 12) + 0.5) * 0x1.0p-52;
  }

 private:
  std::uint64_t state_;
  std::uint64_t inc_;
};

// Standard normal draw via the inverse CDF (one uniform consumed).
double sample_normal(Pcg32& gen);

// Gamma(shape, 1) via Marsaglia-Tsang, with the power boost for shape < 1.
double sample_gamma(Pcg32& gen, double shape);

// Binomial(n, p) as n Bernoulli trials.  Always consumes exactly n uniforms,
// so the stream position after the call does not depend on the outcome.
long sample_binomial(Pcg32& gen, long n, double p);

}  // namespace pmeta::rng
