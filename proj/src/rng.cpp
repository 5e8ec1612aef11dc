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

#include "dawa/rng.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "dawa/error.hpp"

namespace dawa {

std::int64_t RngStream::uniform_int(std::int64_t lo, std::int64_t hi) {
  require(lo <= hi, ErrorCode::kInvalidArgument, "uniform_int: empty range");
  const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
  if (span == 0) return static_cast<std::int64_t>(engine_());  // full 64-bit range
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % span;
  std::uint64_t r;
  do {
    r = engine_();
  } while (r >= limit);
  return lo + static_cast<std::int64_t>(r % span);
}

double RngStream::normal() {
  const double u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double laplace_sample(double scale, RngStream& rng) {
  require(scale > 0 && std::isfinite(scale), ErrorCode::kInvalidArgument,
          "Laplace scale must be positive and finite");
  rng.notify_noise(scale);
  const double v = rng.uniform() - 0.5;
  // 1 - 2|v| >= 2^-53 because uniform() never returns 0 or 1.
  const double magnitude = -scale * std::log1p(-2.0 * std::abs(v));
  return v < 0 ? -magnitude : magnitude;
}

}  // namespace dawa
