// Copyright 2026 The iadmm Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
#ifndef IADMM_RNG_HPP_
#define IADMM_RNG_HPP_

#include <cstdint>
#include <random>

namespace iadmm {

using Engine = std::mt19937_64;

// splitmix64 finalizer; used to derive independent sub-seeds.
constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Fixed stream ids so a variant's draws never depend on which other
// streams it consumes.
enum class Stream : std::uint64_t {
  kInit = 1,
  kGamma = 2,
  kOmega = 3,
  kWalk = 4,
  kPlanted = 5,
  kData = 6,
};

inline Engine make_engine(std::uint64_t seed, Stream s) {
  return Engine(mix_seed(seed, static_cast<std::uint64_t>(s)));
}

inline Engine make_engine(std::uint64_t seed, Stream s, std::uint64_t index) {
  return Engine(mix_seed(mix_seed(seed, static_cast<std::uint64_t>(s)), index));
}

}  // namespace iadmm

#endif  // IADMM_RNG_HPP_
