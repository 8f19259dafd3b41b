// Copyright 2026 The SQPC Simulator Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "sqpc/rng.h"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sqpc {

std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t Fnv1a64(std::string_view text) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

std::uint64_t DeriveSeed(std::uint64_t seed, std::string_view label,
                         std::uint64_t index) {
  return SplitMix64(seed ^ Fnv1a64(label) ^ SplitMix64(index + 1));
}

Rng::Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

std::uint64_t Rng::NextU64() { return engine_(); }

double Rng::Uniform() {
  return static_cast<double>(NextU64() >> 11) * 0x1.0p-53;
}

bool Rng::Coin() { return (NextU64() >> 63) != 0; }

std::uint64_t Rng::Below(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("Rng::Below: bound must be positive");
  // Rejection sampling keeps the result exactly uniform.
  const std::uint64_t limit = bound * (UINT64_MAX / bound);
  std::uint64_t x;
  do {
    x = NextU64();
  } while (x >= limit);
  return x % bound;
}

double Rng::Gaussian() {
  double u1 = Uniform();
  while (u1 <= 0.0) u1 = Uniform();
  const double u2 = Uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Rng Rng::Fork(std::string_view label, std::uint64_t index) const {
  return Rng(DeriveSeed(seed_, label, index));
}

}  // namespace sqpc
