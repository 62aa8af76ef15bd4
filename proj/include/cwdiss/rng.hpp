/*
   Copyright 2026 The cwdiss Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace cwdiss {

inline constexpr std::uint64_t splitmix64(std::uint64_t& state) noexcept {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Per-replica random stream. The engine state is a pure function of
/// (seed, replica): the pair is hashed through a counter-indexed SplitMix64
/// sequence and the resulting words seed a 64-bit Mersenne Twister.
class ReplicaStream {
 public:
  ReplicaStream(std::uint64_t seed, std::uint64_t replica) {
    std::uint64_t key = seed;
    const std::uint64_t mixed_seed = splitmix64(key);
    std::uint64_t counter = mixed_seed ^ (replica * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL);
    std::seed_seq seq{static_cast<std::uint32_t>(splitmix64(counter)),
                      static_cast<std::uint32_t>(splitmix64(counter)),
                      static_cast<std::uint32_t>(splitmix64(counter)),
                      static_cast<std::uint32_t>(splitmix64(counter)),
                      static_cast<std::uint32_t>(splitmix64(counter)),
                      static_cast<std::uint32_t>(splitmix64(counter)),
                      static_cast<std::uint32_t>(splitmix64(counter)),
                      static_cast<std::uint32_t>(splitmix64(counter))};
    engine_.seed(seq);
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Exponential waiting time with the given rate (> 0).
  double exponential(double rate) noexcept { return -std::log1p(-uniform()) / rate; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace cwdiss
