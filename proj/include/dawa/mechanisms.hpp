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

#ifndef DAWA_MECHANISMS_HPP_
#define DAWA_MECHANISMS_HPP_

#include <span>
#include <string_view>
#include <vector>

#include "dawa/core.hpp"
#include "dawa/estimation.hpp"
#include "dawa/partition.hpp"
#include "dawa/rng.hpp"

// End-to-end DAWA and the ablation baselines. Every mechanism returns an
// EstimateVector of the input's length.
namespace dawa {

enum class MechanismName {
  kDawa,
  kIdentity,
  kPartitionLaplace,
  kHierUniform,
  kHierGeometric,
  kGreedyNoPartition,
};

MechanismName parse_mechanism_name(std::string_view name);
std::string_view to_string(MechanismName name);
std::span<const MechanismName> all_mechanisms();

struct MechanismConfig {
  MechanismName name = MechanismName::kDawa;
  PrivacyBudget budget = PrivacyBudget::split(1.0);
  CostMode mode = CostMode::kPow2;
  int branching = 2;
};

EstimateVector run_dawa(const DataVector& x, const Workload& w, const PrivacyBudget& budget,
                        CostMode mode, int branching, RngStream& rng);

// Laplace(1/eps) on every count.
EstimateVector run_identity(const DataVector& x, double eps, RngStream& rng);

// Private partition with eps1, then Laplace(1/eps2) on every bucket total.
EstimateVector run_partition_laplace(const DataVector& x, const PrivacyBudget& budget,
                                     CostMode mode, RngStream& rng);

// Every tree node gets 1 / (number of levels).
void apply_uniform_scaling(QueryTree& tree);
// Node at height h (leaves 0) gets weight ratio^-h, normalized so every leaf
// column sums to 1. Default ratio is t^(1/3).
void apply_geometric_scaling(QueryTree& tree, double ratio);

// Hierarchical measurements on the raw domain with uniform / geometric level
// scalings, then least squares.
EstimateVector run_hier_uniform(const DataVector& x, double eps, int branching, RngStream& rng);
EstimateVector run_hier_geometric(const DataVector& x, double eps, int branching, RngStream& rng);

// Greedy workload-aware scaling on the unit-bucket partition with the full
// budget.
EstimateVector run_greedy_no_partition(const DataVector& x, const Workload& w, double eps,
                                       int branching, RngStream& rng);

EstimateVector run_mechanism(const MechanismConfig& config, const DataVector& x, const Workload& w,
                             RngStream& rng);

}  // namespace dawa

#endif  // DAWA_MECHANISMS_HPP_
