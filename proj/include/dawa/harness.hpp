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

#ifndef DAWA_HARNESS_HPP_
#define DAWA_HARNESS_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "dawa/core.hpp"
#include "dawa/estimation.hpp"
#include "dawa/mechanisms.hpp"
#include "dawa/partition.hpp"
#include "dawa/rng.hpp"

// Workload and data generators, the experiment runner with its JSON report,
// and brute-force oracles.
namespace dawa {

enum class WorkloadKind { kIdentity, kUniform, kClustered, kLargeClustered };

WorkloadKind parse_workload_kind(std::string_view name);
std::string_view to_string(WorkloadKind kind);

struct WorkloadParams {
  std::size_t count = 2000;        // uniform
  std::size_t clusters = 5;        // clustered kinds
  std::size_t per_cluster = 400;
  // Endpoint spread; 0 selects the kind's default (256, or 1024 for large).
  double sigma = 0.0;
};

Workload gen_workload(WorkloadKind kind, std::int64_t n, const WorkloadParams& params, RngStream& rng);

enum class DataKind { kPiecewiseConstant, kHeavyTail, kConstant };

DataKind parse_data_kind(std::string_view name);
std::string_view to_string(DataKind kind);

struct DataParams {
  std::int64_t segments = 8;   // piecewise_constant
  double scale = 100000.0;     // target total mass (piecewise_constant, heavy_tail)
  std::int64_t value = 5;      // constant
  double tail_index = 1.5;     // heavy_tail Pareto shape
};

DataVector gen_synthetic_data(DataKind kind, std::int64_t n, const DataParams& params, RngStream& rng);

struct ExperimentConfig {
  std::vector<MechanismName> mechanisms{MechanismName::kDawa};
  std::vector<double> epsilons{1.0};
  // Either a data file or a synthetic generator.
  std::optional<std::string> data_path;
  DataKind data_kind = DataKind::kPiecewiseConstant;
  std::int64_t n = 1024;
  DataParams data_params;
  WorkloadKind workload_kind = WorkloadKind::kUniform;
  WorkloadParams workload_params;
  std::size_t workload_replicates = 5;
  std::size_t trials = 3;
  std::uint64_t seed = 0;
  CostMode mode = CostMode::kPow2;
  int branching = 2;
  double eps1_fraction = 0.25;
  // Wall time is nondeterministic; reports are byte-reproducible only with
  // this off (wall_ms is then written as 0).
  bool record_timing = false;
  // 0 means DAWA_THREADS or the hardware concurrency.
  unsigned threads = 0;

  static ExperimentConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

struct ResultRow {
  std::string mechanism;
  double epsilon;
  std::size_t workload_id;
  std::size_t trial;
  std::uint64_t seed;
  double avg_l1_error;
  double wall_ms;
};

struct Aggregate {
  std::string mechanism;
  double epsilon;
  std::size_t count;
  double mean;
  double std;  // sample standard deviation, 0 for a single row
  double mean_wall_ms;
};

struct Report {
  ExperimentConfig config;
  std::vector<ResultRow> results;
  std::vector<Aggregate> aggregates;

  nlohmann::json to_json() const;
  std::string to_json_string() const;
};

// Seed of trial `trial` on workload replicate `workload_id`.
std::uint64_t trial_seed(std::uint64_t master, std::size_t workload_id, std::size_t trial);

std::vector<Aggregate> compute_aggregates(const std::vector<ResultRow>& rows);

Report run_experiment(const ExperimentConfig& config);

void report_emit(const Report& report, const std::string& path);

struct BrutePartition {
  Partition partition;
  double cost;
};

// Exhaustive minimizer of partition cost over all 2^(n-1) partitions, n <= 12.
BrutePartition oracle_brute_partition(const DataVector& x, double eps2);
// Same enumeration against an arbitrary cost table (all mode).
BrutePartition oracle_brute_partition(const CostTable& costs);

// Dense strategy error with explicit per-node scalings.
double oracle_dense_stage2(const TransformedWorkload& what, const QueryTree& tree,
                           std::span<const double> scalings, double eps2);

}  // namespace dawa

#endif  // DAWA_HARNESS_HPP_
