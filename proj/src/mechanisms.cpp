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

#include "dawa/mechanisms.hpp"

#include <array>
#include <cmath>

namespace dawa {
namespace {

constexpr std::array<MechanismName, 6> kAllMechanisms = {
    MechanismName::kDawa,          MechanismName::kIdentity,      MechanismName::kPartitionLaplace,
    MechanismName::kHierUniform,   MechanismName::kHierGeometric, MechanismName::kGreedyNoPartition,
};

void check_eps(double eps) {
  require(eps > 0 && std::isfinite(eps), ErrorCode::kInvalidArgument,
          "epsilon must be positive and finite");
}

std::vector<double> as_doubles(const DataVector& x) {
  return std::vector<double>(x.values().begin(), x.values().end());
}

EstimateVector run_hierarchy(const DataVector& x, double eps, const QueryTree& tree, RngStream& rng) {
  const MeasurementSet y = measure(as_doubles(x), tree, eps, rng);
  return EstimateVector(ols_infer(tree, y));
}

}  // namespace

MechanismName parse_mechanism_name(std::string_view name) {
  for (MechanismName m : kAllMechanisms) {
    if (to_string(m) == name) return m;
  }
  fail(ErrorCode::kInvalidArgument, "unknown mechanism '" + std::string(name) + "'");
}

std::string_view to_string(MechanismName name) {
  switch (name) {
    case MechanismName::kDawa: return "dawa";
    case MechanismName::kIdentity: return "identity";
    case MechanismName::kPartitionLaplace: return "partition_laplace";
    case MechanismName::kHierUniform: return "hier_uniform";
    case MechanismName::kHierGeometric: return "hier_geometric";
    case MechanismName::kGreedyNoPartition: return "greedy_no_partition";
  }
  return "unknown";
}

std::span<const MechanismName> all_mechanisms() { return kAllMechanisms; }

EstimateVector run_dawa(const DataVector& x, const Workload& w, const PrivacyBudget& budget,
                        CostMode mode, int branching, RngStream& rng) {
  budget.validate();
  PartitionParams params;
  params.eps1 = budget.eps1;
  params.eps2 = budget.eps2;
  params.mode = mode;
  const Partition buckets = private_partition(x, params, rng);
  const Histogram h = estimate_buckets(buckets, w, x, budget.eps2, branching, rng);
  return uniform_expand(h, x.size());
}

EstimateVector run_identity(const DataVector& x, double eps, RngStream& rng) {
  check_eps(eps);
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(x.size()));
  for (std::int64_t v : x.values()) out.push_back(static_cast<double>(v) + laplace_sample(1.0 / eps, rng));
  return EstimateVector(std::move(out));
}

EstimateVector run_partition_laplace(const DataVector& x, const PrivacyBudget& budget,
                                     CostMode mode, RngStream& rng) {
  budget.validate();
  PartitionParams params;
  params.eps1 = budget.eps1;
  params.eps2 = budget.eps2;
  params.mode = mode;
  const Partition buckets = private_partition(x, params, rng);
  std::vector<double> stats = bucket_totals(buckets, x);
  for (double& s : stats) s += laplace_sample(1.0 / budget.eps2, rng);
  return uniform_expand(Histogram(buckets, std::move(stats)), x.size());
}

void apply_uniform_scaling(QueryTree& tree) {
  const double share = 1.0 / static_cast<double>(tree.levels().size());
  for (std::size_t i = 0; i < tree.size(); ++i) tree.set_scale(i, share);
}

void apply_geometric_scaling(QueryTree& tree, double ratio) {
  require(ratio > 0, ErrorCode::kInvalidArgument, "geometric ratio must be positive");
  const auto& levels = tree.levels();
  double norm = 0.0;
  for (std::size_t h = 0; h < levels.size(); ++h) norm += std::pow(ratio, -static_cast<double>(h));
  for (std::size_t h = 0; h < levels.size(); ++h) {
    const double c = std::pow(ratio, -static_cast<double>(h)) / norm;
    for (std::size_t id : levels[h]) tree.set_scale(id, c);
  }
}

EstimateVector run_hier_uniform(const DataVector& x, double eps, int branching, RngStream& rng) {
  check_eps(eps);
  QueryTree tree = build_query_tree(static_cast<std::size_t>(x.size()), branching);
  apply_uniform_scaling(tree);
  return run_hierarchy(x, eps, tree, rng);
}

EstimateVector run_hier_geometric(const DataVector& x, double eps, int branching, RngStream& rng) {
  check_eps(eps);
  QueryTree tree = build_query_tree(static_cast<std::size_t>(x.size()), branching);
  apply_geometric_scaling(tree, std::cbrt(static_cast<double>(branching)));
  return run_hierarchy(x, eps, tree, rng);
}

EstimateVector run_greedy_no_partition(const DataVector& x, const Workload& w, double eps,
                                       int branching, RngStream& rng) {
  check_eps(eps);
  const Histogram h = estimate_buckets(Partition::unit_buckets(x.size()), w, x, eps, branching, rng);
  return EstimateVector(h.stats);
}

EstimateVector run_mechanism(const MechanismConfig& config, const DataVector& x, const Workload& w,
                             RngStream& rng) {
  require(w.domain_size() == x.size(), ErrorCode::kDimensionMismatch,
          "workload domain does not match data length");
  const PrivacyBudget& b = config.budget;
  switch (config.name) {
    case MechanismName::kDawa: return run_dawa(x, w, b, config.mode, config.branching, rng);
    case MechanismName::kIdentity: return run_identity(x, b.epsilon, rng);
    case MechanismName::kPartitionLaplace: return run_partition_laplace(x, b, config.mode, rng);
    case MechanismName::kHierUniform: return run_hier_uniform(x, b.epsilon, config.branching, rng);
    case MechanismName::kHierGeometric: return run_hier_geometric(x, b.epsilon, config.branching, rng);
    case MechanismName::kGreedyNoPartition:
      return run_greedy_no_partition(x, w, b.epsilon, config.branching, rng);
  }
  fail(ErrorCode::kInvalidArgument, "unhandled mechanism");
}

}  // namespace dawa
