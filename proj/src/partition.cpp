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

#include "dawa/partition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dawa/dev_tree.hpp"

namespace dawa {
namespace {

void check_eps(double eps, const char* name) {
  require(eps > 0 && std::isfinite(eps), ErrorCode::kInvalidArgument,
          std::string(name) + " must be positive and finite");
}

__int128 abs128(__int128 v) { return v < 0 ? -v : v; }

}  // namespace

CostMode parse_cost_mode(std::string_view name) {
  if (name == "all") return CostMode::kAll;
  if (name == "pow2") return CostMode::kPow2;
  fail(ErrorCode::kInvalidArgument, "unknown cost mode '" + std::string(name) + "'");
}

std::string_view to_string(CostMode mode) { return mode == CostMode::kAll ? "all" : "pow2"; }

CostTable::CostTable(CostMode mode, std::int64_t n) : mode_(mode), n_(n) {
  require(n >= 1, ErrorCode::kInvalidArgument, "domain size must be positive");
  if (mode == CostMode::kAll) {
    for (std::int64_t len = 1; len <= n; ++len) lengths_.push_back(len);
  } else {
    for (std::int64_t len = 1; len <= n; len *= 2) lengths_.push_back(len);
  }
  costs_.reserve(lengths_.size());
  for (std::int64_t len : lengths_) costs_.emplace_back(static_cast<std::size_t>(n - len + 1), 0.0);
}

std::size_t CostTable::size() const {
  std::size_t total = 0;
  for (const auto& c : costs_) total += c.size();
  return total;
}

std::size_t CostTable::length_index(std::int64_t len) const {
  auto it = std::lower_bound(lengths_.begin(), lengths_.end(), len);
  if (it == lengths_.end() || *it != len) return lengths_.size();
  return static_cast<std::size_t>(it - lengths_.begin());
}

bool CostTable::contains(const Interval& b) const {
  return b.valid_for(n_) && length_index(b.length()) < lengths_.size();
}

double CostTable::cost(const Interval& b) const {
  require(contains(b), ErrorCode::kInvalidInterval, to_string(b) + " is not a candidate bucket");
  return costs_[length_index(b.length())][static_cast<std::size_t>(b.lo - 1)];
}

double& CostTable::cost(const Interval& b) {
  require(contains(b), ErrorCode::kInvalidInterval, to_string(b) + " is not a candidate bucket");
  return costs_[length_index(b.length())][static_cast<std::size_t>(b.lo - 1)];
}

CostTable CostTable::scaled(double factor) const {
  CostTable out = *this;
  for (auto& row : out.costs_) {
    for (double& c : row) c *= factor;
  }
  return out;
}

void PartitionParams::validate() const {
  check_eps(eps1, "eps1");
  check_eps(eps2, "eps2");
  require(bucket_cost_sensitivity > 0, ErrorCode::kInvalidArgument,
          "bucket cost sensitivity must be positive");
  require(!per_bucket_refinement, ErrorCode::kInvalidArgument,
          "per-bucket sensitivity refinement is not supported: no formula for the "
          "per-bucket sensitivity is available");
}

double bucket_dev(const DataVector& x, const Interval& b) {
  require(b.valid_for(x.size()), ErrorCode::kInvalidInterval,
          "bucket " + to_string(b) + " outside domain");
  const std::int64_t len = b.length();
  __int128 total = 0;
  for (std::int64_t j = b.lo; j <= b.hi; ++j) total += x[j];
  __int128 scaled = 0;
  for (std::int64_t j = b.lo; j <= b.hi; ++j) scaled += abs128(static_cast<__int128>(x[j]) * len - total);
  return dev_from_scaled(scaled, len);
}

double bucket_dev_one_sided(const DataVector& x, const Interval& b) {
  require(b.valid_for(x.size()), ErrorCode::kInvalidInterval,
          "bucket " + to_string(b) + " outside domain");
  const double len = static_cast<double>(b.length());
  double total = 0;
  for (std::int64_t j = b.lo; j <= b.hi; ++j) total += static_cast<double>(x[j]);
  const double mean = total / len;
  double above = 0;
  for (std::int64_t j = b.lo; j <= b.hi; ++j) {
    if (static_cast<double>(x[j]) >= mean) above += static_cast<double>(x[j]) - mean;
  }
  return 2.0 * above;
}

double bucket_cost(const DataVector& x, const Interval& b, double eps2) {
  check_eps(eps2, "eps2");
  return bucket_dev(x, b) + 1.0 / eps2;
}

double partition_cost(const DataVector& x, const Partition& p, double eps2) {
  require(p.domain_size() == x.size(), ErrorCode::kInvalidPartition,
          "partition domain does not match data length");
  double total = 0.0;
  for (const Interval& b : p) total += bucket_cost(x, b, eps2);
  return total;
}

std::vector<double> costs_size_k(const DataVector& x, double eps2, std::int64_t len) {
  check_eps(eps2, "eps2");
  const std::int64_t n = x.size();
  require(1 <= len && len <= n, ErrorCode::kInvalidArgument, "bucket length out of range");
  const double noise_cost = 1.0 / eps2;
  std::vector<double> out(static_cast<std::size_t>(n - len + 1));
  if (len == 1) {
    std::fill(out.begin(), out.end(), noise_cost);
    return out;
  }
  DeviationTree tree;
  for (std::int64_t j = 1; j <= len; ++j) tree.insert(x[j]);
  for (std::int64_t lo = 1;; ++lo) {
    // dev = 2 * sum_{x_j >= S/len} (x_j - S/len). Scaling by len keeps the
    // comparison and the numerator exact.
    const std::int64_t total = tree.sum();
    const auto [count, sum] = tree.at_least_ratio(total, len);
    const __int128 scaled = 2 * (static_cast<__int128>(sum) * len - static_cast<__int128>(count) * total);
    out[static_cast<std::size_t>(lo - 1)] = dev_from_scaled(scaled, len) + noise_cost;
    if (lo + len > n) break;
    tree.remove(x[lo]);
    tree.insert(x[lo + len]);
  }
  return out;
}

CostTable all_costs(const DataVector& x, double eps2, CostMode mode) {
  CostTable table(mode, x.size());
  for (std::size_t i = 0; i < table.lengths().size(); ++i) {
    table.costs_for(i) = costs_size_k(x, eps2, table.lengths()[i]);
  }
  return table;
}

CostTable perturb_costs(const CostTable& table, double eps1, double sensitivity, RngStream& rng) {
  check_eps(eps1, "eps1");
  require(sensitivity > 0, ErrorCode::kInvalidArgument, "sensitivity must be positive");
  const double scale = 2.0 * sensitivity / eps1;
  CostTable noisy = table;
  for (std::size_t i = 0; i < noisy.lengths().size(); ++i) {
    for (double& c : noisy.costs_for(i)) c += laplace_sample(scale, rng);
  }
  return noisy;
}

Partition least_cost_partition(const CostTable& costs) {
  const std::int64_t n = costs.domain_size();
  const auto& lengths = costs.lengths();
  std::vector<double> best(static_cast<std::size_t>(n + 1), std::numeric_limits<double>::infinity());
  std::vector<std::int64_t> last_len(static_cast<std::size_t>(n + 1), 0);
  best[0] = 0.0;
  for (std::int64_t j = 1; j <= n; ++j) {
    for (std::size_t li = 0; li < lengths.size() && lengths[li] <= j; ++li) {
      const std::int64_t len = lengths[li];
      const double candidate = best[j - len] + costs.costs_for(li)[static_cast<std::size_t>(j - len)];
      // Lengths ascend, so <= hands ties to the longer bucket.
      if (candidate <= best[j]) {
        best[j] = candidate;
        last_len[j] = len;
      }
    }
  }
  std::vector<Interval> buckets;
  for (std::int64_t j = n; j > 0; j -= last_len[j]) buckets.push_back({j - last_len[j] + 1, j});
  std::reverse(buckets.begin(), buckets.end());
  return Partition(std::move(buckets), n);
}

double table_cost(const CostTable& costs, const Partition& p) {
  double total = 0.0;
  for (const Interval& b : p) total += costs.cost(b);
  return total;
}

Partition private_partition(const DataVector& x, const PartitionParams& params, RngStream& rng) {
  params.validate();
  const CostTable exact = all_costs(x, params.eps2, params.mode);
  const CostTable noisy = perturb_costs(exact, params.eps1, params.bucket_cost_sensitivity, rng);
  return least_cost_partition(noisy);
}

Partition exact_least_cost_partition(const DataVector& x, double eps2, CostMode mode) {
  return least_cost_partition(all_costs(x, eps2, mode));
}

double utility_bound(std::int64_t n, std::int64_t num_buckets, double delta, double eps1,
                     double sensitivity) {
  require(n >= 1 && num_buckets >= 1, ErrorCode::kInvalidArgument,
          "n and the number of candidate buckets must be positive");
  require(delta > 0 && delta < 1, ErrorCode::kInvalidArgument, "delta must lie in (0,1)");
  check_eps(eps1, "eps1");
  require(sensitivity > 0, ErrorCode::kInvalidArgument, "sensitivity must be positive");
  return 4.0 * sensitivity * static_cast<double>(n) *
         std::log(static_cast<double>(num_buckets) / delta) / eps1;
}

}  // namespace dawa
