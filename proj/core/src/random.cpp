#include "dlgain/random.hpp"

#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_real_distribution.hpp>
#include <cmath>

namespace dlgain {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

const double kHalfSqrt = std::sqrt(0.5);

}  // namespace

std::uint64_t split_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  return splitmix64(splitmix64(splitmix64(seed ^ splitmix64(a)) ^ b) ^ c);
}

Rng make_stream(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  return Rng(split_seed(seed, a, b, c));
}

double standard_normal(Rng& rng) {
  boost::random::normal_distribution<double> dist;
  return dist(rng);
}

Complex standard_cn(Rng& rng) {
  boost::random::normal_distribution<double> dist;
  const double re = dist(rng);
  const double im = dist(rng);
  return {kHalfSqrt * re, kHalfSqrt * im};
}

void fill_standard_cn(Rng& rng, std::span<Complex> out) {
  boost::random::normal_distribution<double> dist;
  for (auto& z : out) {
    const double re = dist(rng);
    const double im = dist(rng);
    z = {kHalfSqrt * re, kHalfSqrt * im};
  }
}

double uniform(Rng& rng, double lo, double hi) {
  boost::random::uniform_real_distribution<double> dist(lo, hi);
  return dist(rng);
}

}  // namespace dlgain
