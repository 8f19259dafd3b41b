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

#ifndef SQPC_RNG_H_
#define SQPC_RNG_H_

#include <cstdint>
#include <random>
#include <string_view>

namespace sqpc {

// Seedable, splittable pseudorandom source.
//
// Every sampling operation in the library takes an Rng explicitly; there is
// no global randomness. The output sequence depends only on the seed and is
// identical on every platform: the engine is std::mt19937_64 (fully
// specified by the standard) and the conversions below avoid the
// implementation-defined std:: distributions.
//
// Fork() derives an independent child stream from this stream's seed (not
// its current position), so the child is the same no matter how many values
// the parent has already produced:
//
//   child_seed = SplitMix64(seed ^ Fnv1a64(label) ^ SplitMix64(index + 1))
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t seed() const { return seed_; }

  std::uint64_t NextU64();
  // Uniform double in [0, 1) with 53 random bits.
  double Uniform();
  bool Coin();
  // Uniform integer in [0, bound). bound must be positive.
  std::uint64_t Below(std::uint64_t bound);
  // Standard normal deviate (Box-Muller; used only for random test unitaries).
  double Gaussian();

  Rng Fork(std::string_view label, std::uint64_t index = 0) const;

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

std::uint64_t SplitMix64(std::uint64_t x);
std::uint64_t Fnv1a64(std::string_view text);
std::uint64_t DeriveSeed(std::uint64_t seed, std::string_view label,
                         std::uint64_t index = 0);

}  // namespace sqpc

#endif  // SQPC_RNG_H_
