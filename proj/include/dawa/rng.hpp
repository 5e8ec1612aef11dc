// Copyright 2026 The DAWA Authors
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

#ifndef DAWA_RNG_HPP_
#define DAWA_RNG_HPP_

#include <cstdint>
#include <functional>
#include <random>
#include <string_view>

namespace dawa {

// SplitMix64 finalizer. Used to derive independent child seeds.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// FNV-1a, for keying sub-streams by name.
constexpr std::uint64_t hash_name(std::string_view name) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : name) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Deterministic, splittable random stream. Identical seeds give identical
// sequences on every platform: only the mt19937_64 engine is used, and all
// conversions to floating point are done here rather than through <random>
// distributions, whose output is implementation-defined.
//
// Not thread-safe. Give each task its own stream via split().
class RngStream {
 public:
  // Called with the scale of every Laplace draw taken from this stream.
  using NoiseObserver = std::function<void(double scale)>;

  explicit RngStream(std::uint64_t seed) : seed_(seed), engine_(mix64(seed)) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on the open interval (0, 1), 53 bits of resolution.
  double uniform() {
    const std::uint64_t k = engine_() >> 11;
    return (static_cast<double>(k) + 0.5) * 0x1.0p-53;
  }

  // Uniform integer in [lo, hi] by rejection (no modulo bias).
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

  // Standard normal via Box-Muller.
  double normal();

  // Child stream that depends only on (seed, key); the parent state is not
  // consumed, so adding new children never perturbs existing ones.
  RngStream split(std::uint64_t key) const {
    return RngStream(mix64(seed_ ^ mix64(key + 0x632be59bd9b4e019ULL)));
  }
  RngStream split(std::string_view key) const { return split(hash_name(key)); }

  void set_noise_observer(NoiseObserver observer) {
    observer_ = std::move(observer);
  }
  void notify_noise(double scale) const {
    if (observer_) observer_(scale);
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  NoiseObserver observer_;
};

// One draw from Laplace(0, scale) by inverting the CDF.
double laplace_sample(double scale, RngStream& rng);

}  // namespace dawa

#endif  // DAWA_RNG_HPP_
