// Copyright 2026 The noisegram Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// Counter-based deterministic randomness. Every variate is a pure function
// of (seed, stream, position, draw), so results do not depend on thread
// count, batch partitioning, or evaluation order.

#ifndef NOISEGRAM_RNG_HPP
#define NOISEGRAM_RNG_HPP

#include <cstdint>

namespace noisegram {

inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t mix_words(std::uint64_t a, std::uint64_t b) {
  return splitmix64(a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2)));
}

// One logical random stream. `stream` separates epochs, replicas, and the
// source/target sides of a parallel pair under a single user seed.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t stream)
      : base_(mix_words(splitmix64(seed), stream)) {}

  std::uint64_t bits(std::uint64_t position, std::uint64_t draw) const {
    return splitmix64(mix_words(base_, mix_words(position, draw)));
  }

  // Uniform in [0, 1) with 53 random mantissa bits.
  double uniform(std::uint64_t position, std::uint64_t draw) const {
    return static_cast<double>(bits(position, draw) >> 11) * 0x1.0p-53;
  }

  // Derives an independent child stream (used for per-line and per-side
  // sub-streams).
  RandomStream substream(std::uint64_t tag) const {
    return RandomStream(base_, splitmix64(tag ^ 0x517cc1b727220a95ULL));
  }

 private:
  std::uint64_t base_;
};

}  // namespace noisegram

#endif  // NOISEGRAM_RNG_HPP
