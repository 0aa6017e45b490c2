// Copyright 2026 The PLAS Authors.
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

#ifndef PLAS_RANDOM_H_
#define PLAS_RANDOM_H_

#include <cstdint>
#include <random>
#include <string_view>

namespace plas {

using Rng = std::mt19937_64;

// SplitMix64 finalizer.
inline std::uint64_t Mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Derives an independent seed for a named stream, so that adding a consumer
// of randomness (e.g. an optional network) never shifts the draws of others.
inline std::uint64_t DeriveSeed(std::uint64_t seed, std::string_view stream) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : stream) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return Mix64(seed ^ Mix64(h));
}

inline Rng MakeRng(std::uint64_t seed, std::string_view stream) {
  return Rng(DeriveSeed(seed, stream));
}

}  // namespace plas

#endif  // PLAS_RANDOM_H_
