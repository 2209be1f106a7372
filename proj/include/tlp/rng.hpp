#pragma once

#include <cstdint>
#include <random>

namespace tlp {

// splitmix64 finalizer; decorrelates nearby seeds/indices
inline uint64_t mix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Independent generator for work item `index` of a run seeded with `seed`.
// Results of parallel loops stay schedule-independent because every item
// draws from its own stream.
inline std::mt19937_64 substream(uint64_t seed, uint64_t index) {
  return std::mt19937_64(mix64(mix64(seed) ^ mix64(index + 1)));
}

}  // namespace tlp
