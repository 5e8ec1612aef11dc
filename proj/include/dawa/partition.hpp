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

#ifndef DAWA_PARTITION_HPP_
#define DAWA_PARTITION_HPP_

#include <cstdint>
#include <string_view>
#include <vector>

#include "dawa/core.hpp"
#include "dawa/rng.hpp"

// Stage 1: L1 bucket costs, Laplace-perturbed costs and the least (noisy) cost
// partition.
namespace dawa {

enum class CostMode {
  kAll,   // every interval [i,j]
  kPow2,  // intervals whose length is a power of two
};

CostMode parse_cost_mode(std::string_view name);
std::string_view to_string(CostMode mode);

// Bucket cost for every candidate interval. Candidates are grouped by length;
// within a length they are indexed by their left end.
class CostTable {
 public:
  CostTable(CostMode mode, std::int64_t n);

  CostMode mode() const { return mode_; }
  std::int64_t domain_size() const { return n_; }
  // Candidate lengths, ascending. Always starts with 1.
  const std::vector<std::int64_t>& lengths() const { return lengths_; }
  // Costs of intervals with lengths()[i], indexed by lo - 1.
  std::vector<double>& costs_for(std::size_t length_index) { return costs_[length_index]; }
  const std::vector<double>& costs_for(std::size_t length_index) const { return costs_[length_index]; }

  // Total number of candidate intervals.
  std::size_t size() const;
  bool contains(const Interval& b) const;
  // Throws kInvalidInterval for non-candidates.
  double cost(const Interval& b) const;
  double& cost(const Interval& b);

  // Multiplies every entry by factor.
  CostTable scaled(double factor) const;

 private:
  std::size_t length_index(std::int64_t len) const;

  CostMode mode_;
  std::int64_t n_;
  std::vector<std::int64_t> lengths_;
  std::vector<std::vector<double>> costs_;
};

struct PartitionParams {
  double eps1 = 0.0;
  double eps2 = 0.0;
  CostMode mode = CostMode::kPow2;
  // Sensitivity of a single bucket cost.
  double bucket_cost_sensitivity = 2.0;
  // Reserved for a per-bucket noise refinement whose sensitivity formula is
  // not known; enabling it is rejected with kInvalidArgument.
  bool per_bucket_refinement = false;

  void validate() const;
};

// sum_{j in b} |x_j - mean(b)|, computed directly in exact integer arithmetic.
double bucket_dev(const DataVector& x, const Interval& b);
// The same quantity via 2 * sum_{x_j >= mean} (x_j - mean).
double bucket_dev_one_sided(const DataVector& x, const Interval& b);

double bucket_cost(const DataVector& x, const Interval& b, double eps2);
double partition_cost(const DataVector& x, const Partition& p, double eps2);

// Turns an exact scaled deviation  sum_j |len * x_j - S|  into dev.
inline double dev_from_scaled(__int128 scaled_abs_deviation, std::int64_t len) {
  return static_cast<double>(scaled_abs_deviation) / static_cast<double>(len);
}

// Costs of all intervals of length len, indexed by lo - 1, computed with a
// sliding DeviationTree.
std::vector<double> costs_size_k(const DataVector& x, double eps2, std::int64_t len);

CostTable all_costs(const DataVector& x, double eps2, CostMode mode);

// Adds independent Laplace(2 * sensitivity / eps1) noise to every entry.
CostTable perturb_costs(const CostTable& table, double eps1, double sensitivity, RngStream& rng);

// Minimizes total table cost over partitions built from candidate intervals.
// Ties go to the longer last bucket.
Partition least_cost_partition(const CostTable& costs);
// Sum of table entries over the buckets of p.
double table_cost(const CostTable& costs, const Partition& p);

Partition private_partition(const DataVector& x, const PartitionParams& params, RngStream& rng);

// Noise-free variant for debugging and oracles. Not differentially private.
Partition exact_least_cost_partition(const DataVector& x, double eps2, CostMode mode);

// With probability at least 1 - delta the private partition costs at most
// OPT + 4 * sensitivity * n * ln(num_buckets / delta) / eps1.
double utility_bound(std::int64_t n, std::int64_t num_buckets, double delta, double eps1,
                     double sensitivity = 2.0);

}  // namespace dawa

#endif  // DAWA_PARTITION_HPP_
