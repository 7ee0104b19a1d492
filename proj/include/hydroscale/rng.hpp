#ifndef HYDROSCALE_RNG_HPP_
#define HYDROSCALE_RNG_HPP_

#include <cmath>
#include <cstdint>
#include <random>

namespace hydroscale {

using Rng = std::mt19937_64;

// Uniform on [0, 1) with 53 random bits. Written out instead of
// std::uniform_real_distribution so streams are identical across standard libraries.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double exponential(Rng& rng, double rate) {
  return -std::log1p(-uniform01(rng)) / rate;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Independent stream for (base seed, experiment tag, N, replica).
inline Rng make_stream(std::uint64_t seed, std::uint64_t tag, std::uint64_t a = 0,
                       std::uint64_t b = 0) {
  std::uint64_t s = splitmix64(seed);
  s = splitmix64(s ^ tag);
  s = splitmix64(s ^ a);
  s = splitmix64(s ^ b);
  return Rng(s);
}

}  // namespace hydroscale

#endif  // HYDROSCALE_RNG_HPP_
