#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <span>

namespace dlgain {

using Rng = std::mt19937_64;
using Complex = std::complex<double>;

// Counter-based stream splitting: every (seed, a, b, c) tuple names an
// independent stream, so results do not depend on task scheduling.
//   stream seed = splitmix64(splitmix64(splitmix64(seed ^ a) ^ b) ^ c)
std::uint64_t split_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0,
                         std::uint64_t c = 0);

Rng make_stream(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0);

// Stream-purpose tags used as the last split coordinate.
namespace stream {
inline constexpr std::uint64_t kSetup = 0x5e7;
inline constexpr std::uint64_t kBlock = 0xb10c;
inline constexpr std::uint64_t kInterference = 0x7a1;
inline constexpr std::uint64_t kNormConstants = 0x2052;
inline constexpr std::uint64_t kCalibration = 0xca1;
inline constexpr std::uint64_t kTraining = 0x7ea;
inline constexpr std::uint64_t kSplit = 0x591;
}  // namespace stream

double standard_normal(Rng& rng);

// Circularly-symmetric CN(0, 1): real and imaginary parts i.i.d. N(0, 1/2).
Complex standard_cn(Rng& rng);
void fill_standard_cn(Rng& rng, std::span<Complex> out);

double uniform(Rng& rng, double lo, double hi);

}  // namespace dlgain
