#pragma once

#include <cstdint>
#include <random>

namespace dsd {

using Rng = std::mt19937_64;

// Stream identifiers keep generator, H0 and H1 draws of one trial apart.
enum class Stream : std::uint64_t {
  kGraph = 1,
  kH0 = 2,
  kH1 = 3,
  kMixed = 4,
  kValidation = 5,
  kCalibration = 6,
};

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seed for trial `index` of `stream`, a pure function of its arguments so
/// that results do not depend on which thread runs which trial.
constexpr std::uint64_t stream_seed(std::uint64_t seed, Stream stream,
                                    std::uint64_t index) {
  return mix64(mix64(mix64(seed) ^ static_cast<std::uint64_t>(stream)) ^ index);
}

inline Rng make_rng(std::uint64_t seed, Stream stream, std::uint64_t index) {
  return Rng(stream_seed(seed, stream, index));
}

}  // namespace dsd
