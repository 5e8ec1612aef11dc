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

#include "dawa/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <thread>

#include "dawa/io.hpp"

namespace dawa {
namespace {

std::int64_t clamp_position(double v, std::int64_t n) {
  const double r = std::nearbyint(v);
  if (r < 1.0) return 1;
  if (r > static_cast<double>(n)) return n;
  return static_cast<std::int64_t>(r);
}

unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("DAWA_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

template <typename T>
T get_or(const nlohmann::json& j, const char* key, T fallback) {
  return j.contains(key) ? j.at(key).get<T>() : fallback;
}

std::vector<Interval> buckets_from_cuts(std::int64_t n, std::uint64_t mask) {
  std::vector<Interval> buckets;
  std::int64_t lo = 1;
  for (std::int64_t j = 1; j < n; ++j) {
    if (mask >> (j - 1) & 1U) {
      buckets.push_back({lo, j});
      lo = j + 1;
    }
  }
  buckets.push_back({lo, n});
  return buckets;
}

}  // namespace

WorkloadKind parse_workload_kind(std::string_view name) {
  if (name == "identity") return WorkloadKind::kIdentity;
  if (name == "uniform") return WorkloadKind::kUniform;
  if (name == "clustered") return WorkloadKind::kClustered;
  if (name == "large-clustered" || name == "large_clustered") return WorkloadKind::kLargeClustered;
  fail(ErrorCode::kInvalidArgument, "unknown workload kind '" + std::string(name) + "'");
}

std::string_view to_string(WorkloadKind kind) {
  switch (kind) {
    case WorkloadKind::kIdentity: return "identity";
    case WorkloadKind::kUniform: return "uniform";
    case WorkloadKind::kClustered: return "clustered";
    case WorkloadKind::kLargeClustered: return "large-clustered";
  }
  return "unknown";
}

Workload gen_workload(WorkloadKind kind, std::int64_t n, const WorkloadParams& params, RngStream& rng) {
  require(n >= 1, ErrorCode::kInvalidArgument, "domain size must be positive");
  std::vector<Interval> queries;
  switch (kind) {
    case WorkloadKind::kIdentity:
      for (std::int64_t j = 1; j <= n; ++j) queries.push_back({j, j});
      break;
    case WorkloadKind::kUniform:
      require(params.count >= 1, ErrorCode::kInvalidArgument, "query count must be positive");
      for (std::size_t i = 0; i < params.count; ++i) {
        std::int64_t a = rng.uniform_int(1, n);
        std::int64_t b = rng.uniform_int(1, n);
        if (a > b) std::swap(a, b);
        queries.push_back({a, b});
      }
      break;
    case WorkloadKind::kClustered:
    case WorkloadKind::kLargeClustered: {
      require(params.clusters >= 1 && params.per_cluster >= 1, ErrorCode::kInvalidArgument,
              "cluster counts must be positive");
      const double sigma = params.sigma > 0 ? params.sigma
                                            : (kind == WorkloadKind::kClustered ? 256.0 : 1024.0);
      std::vector<std::int64_t> centers;
      for (std::size_t c = 0; c < params.clusters; ++c) centers.push_back(rng.uniform_int(1, n));
      for (std::int64_t c : centers) {
        for (std::size_t i = 0; i < params.per_cluster; ++i) {
          const double left = std::abs(sigma * rng.normal());
          const double right = std::abs(sigma * rng.normal());
          std::int64_t a = clamp_position(static_cast<double>(c) - left, n);
          std::int64_t b = clamp_position(static_cast<double>(c) + right, n);
          if (a > b) std::swap(a, b);
          queries.push_back({a, b});
        }
      }
      break;
    }
  }
  return Workload(std::move(queries), n);
}

DataKind parse_data_kind(std::string_view name) {
  if (name == "piecewise_constant") return DataKind::kPiecewiseConstant;
  if (name == "heavy_tail") return DataKind::kHeavyTail;
  if (name == "constant") return DataKind::kConstant;
  fail(ErrorCode::kInvalidArgument, "unknown data kind '" + std::string(name) + "'");
}

std::string_view to_string(DataKind kind) {
  switch (kind) {
    case DataKind::kPiecewiseConstant: return "piecewise_constant";
    case DataKind::kHeavyTail: return "heavy_tail";
    case DataKind::kConstant: return "constant";
  }
  return "unknown";
}

DataVector gen_synthetic_data(DataKind kind, std::int64_t n, const DataParams& params, RngStream& rng) {
  require(n >= 1, ErrorCode::kInvalidArgument, "domain size must be positive");
  std::vector<std::int64_t> x(static_cast<std::size_t>(n), 0);
  switch (kind) {
    case DataKind::kConstant:
      require(params.value >= 0, ErrorCode::kInvalidArgument, "constant value must be nonnegative");
      std::fill(x.begin(), x.end(), params.value);
      break;
    case DataKind::kPiecewiseConstant: {
      const std::int64_t segments = params.segments;
      require(segments >= 1 && segments <= n, ErrorCode::kInvalidArgument,
              "segment count must lie in [1, n]");
      require(params.scale >= 0, ErrorCode::kInvalidArgument, "scale must be nonnegative");
      // Distinct cut positions 2..n by partial Fisher-Yates.
      std::vector<std::int64_t> candidates;
      for (std::int64_t j = 2; j <= n; ++j) candidates.push_back(j);
      std::vector<std::int64_t> starts{1};
      for (std::int64_t s = 0; s + 1 < segments; ++s) {
        const auto pick = static_cast<std::size_t>(
            rng.uniform_int(s, static_cast<std::int64_t>(candidates.size()) - 1));
        std::swap(candidates[static_cast<std::size_t>(s)], candidates[pick]);
        starts.push_back(candidates[static_cast<std::size_t>(s)]);
      }
      std::sort(starts.begin(), starts.end());
      starts.push_back(n + 1);
      std::vector<double> weights;
      double weighted_len = 0.0;
      for (std::int64_t s = 0; s < segments; ++s) {
        weights.push_back(0.1 + rng.uniform());
        weighted_len += weights.back() * static_cast<double>(starts[s + 1] - starts[s]);
      }
      std::int64_t previous = -1;
      for (std::int64_t s = 0; s < segments; ++s) {
        auto level = static_cast<std::int64_t>(std::llround(params.scale * weights[s] / weighted_len));
        // Neighbouring segments must differ so the runs stay maximal.
        if (level == previous) level = level > 0 ? level - 1 : level + 1;
        std::fill(x.begin() + (starts[s] - 1), x.begin() + (starts[s + 1] - 1), level);
        previous = level;
      }
      break;
    }
    case DataKind::kHeavyTail: {
      require(params.tail_index > 1.0, ErrorCode::kInvalidArgument, "tail index must exceed 1");
      // Pareto(x_m, alpha) has mean alpha x_m / (alpha - 1).
      const double alpha = params.tail_index;
      const double xm = params.scale / static_cast<double>(n) * (alpha - 1.0) / alpha;
      for (auto& v : x) v = static_cast<std::int64_t>(std::floor(xm * std::pow(rng.uniform(), -1.0 / alpha)));
      break;
    }
  }
  return DataVector(std::move(x));
}

// ---------------------------------------------------------------------------
// Configuration and report

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  ExperimentConfig cfg;
  try {
    if (j.contains("mechanisms")) {
      cfg.mechanisms.clear();
      for (const auto& m : j.at("mechanisms")) cfg.mechanisms.push_back(parse_mechanism_name(m.get<std::string>()));
    }
    cfg.epsilons = get_or(j, "epsilons", cfg.epsilons);
    if (j.contains("data")) {
      const auto& d = j.at("data");
      if (d.contains("path")) cfg.data_path = d.at("path").get<std::string>();
      if (d.contains("kind")) cfg.data_kind = parse_data_kind(d.at("kind").get<std::string>());
      cfg.n = get_or(d, "n", cfg.n);
      cfg.data_params.segments = get_or(d, "segments", cfg.data_params.segments);
      cfg.data_params.scale = get_or(d, "scale", cfg.data_params.scale);
      cfg.data_params.value = get_or(d, "value", cfg.data_params.value);
      cfg.data_params.tail_index = get_or(d, "tail_index", cfg.data_params.tail_index);
    }
    if (j.contains("workload")) {
      const auto& w = j.at("workload");
      if (w.contains("kind")) cfg.workload_kind = parse_workload_kind(w.at("kind").get<std::string>());
      cfg.workload_params.count = get_or(w, "count", cfg.workload_params.count);
      cfg.workload_params.clusters = get_or(w, "clusters", cfg.workload_params.clusters);
      cfg.workload_params.per_cluster = get_or(w, "per_cluster", cfg.workload_params.per_cluster);
      cfg.workload_params.sigma = get_or(w, "sigma", cfg.workload_params.sigma);
    }
    cfg.workload_replicates = get_or(j, "workload_replicates", cfg.workload_replicates);
    cfg.trials = get_or(j, "trials", cfg.trials);
    cfg.seed = get_or(j, "seed", cfg.seed);
    if (j.contains("partition_mode")) cfg.mode = parse_cost_mode(j.at("partition_mode").get<std::string>());
    cfg.branching = get_or(j, "branching", cfg.branching);
    cfg.eps1_fraction = get_or(j, "eps1_fraction", cfg.eps1_fraction);
    cfg.record_timing = get_or(j, "record_timing", cfg.record_timing);
    cfg.threads = get_or(j, "threads", cfg.threads);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kParse, std::string("invalid experiment config: ") + e.what());
  }
  require(!cfg.mechanisms.empty() && !cfg.epsilons.empty(), ErrorCode::kInvalidArgument,
          "config needs at least one mechanism and one epsilon");
  require(cfg.trials >= 1 && cfg.workload_replicates >= 1, ErrorCode::kInvalidArgument,
          "trials and workload_replicates must be positive");
  for (double e : cfg.epsilons) {
    require(e > 0 && std::isfinite(e), ErrorCode::kInvalidArgument, "epsilons must be positive");
  }
  return cfg;
}

nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json mech = nlohmann::json::array();
  for (MechanismName m : mechanisms) mech.push_back(std::string(to_string(m)));
  nlohmann::json data;
  if (data_path) {
    data["path"] = *data_path;
  } else {
    data = {{"kind", std::string(to_string(data_kind))},
            {"n", n},
            {"segments", data_params.segments},
            {"scale", data_params.scale},
            {"value", data_params.value},
            {"tail_index", data_params.tail_index}};
  }
  return {
      {"mechanisms", mech},
      {"epsilons", epsilons},
      {"data", data},
      {"workload",
       {{"kind", std::string(to_string(workload_kind))},
        {"count", workload_params.count},
        {"clusters", workload_params.clusters},
        {"per_cluster", workload_params.per_cluster},
        {"sigma", workload_params.sigma}}},
      {"workload_replicates", workload_replicates},
      {"trials", trials},
      {"seed", seed},
      {"partition_mode", std::string(to_string(mode))},
      {"branching", branching},
      {"eps1_fraction", eps1_fraction},
      {"record_timing", record_timing},
  };
}

nlohmann::json Report::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (const ResultRow& r : results) {
    rows.push_back({{"mechanism", r.mechanism},
                    {"epsilon", r.epsilon},
                    {"workload_id", r.workload_id},
                    {"trial", r.trial},
                    {"seed", r.seed},
                    {"avg_l1_error", r.avg_l1_error},
                    {"wall_ms", r.wall_ms}});
  }
  nlohmann::json aggs = nlohmann::json::array();
  for (const Aggregate& a : aggregates) {
    aggs.push_back({{"mechanism", a.mechanism},
                    {"epsilon", a.epsilon},
                    {"count", a.count},
                    {"mean_avg_l1_error", a.mean},
                    {"std_avg_l1_error", a.std},
                    {"mean_wall_ms", a.mean_wall_ms}});
  }
  return {{"config", config.to_json()}, {"results", rows}, {"aggregates", aggs}};
}

std::string Report::to_json_string() const { return to_json().dump(2) + "\n"; }

std::uint64_t trial_seed(std::uint64_t master, std::size_t workload_id, std::size_t trial) {
  return RngStream(master).split("trial").split(workload_id).split(trial).seed();
}

std::vector<Aggregate> compute_aggregates(const std::vector<ResultRow>& rows) {
  std::vector<Aggregate> out;
  for (const ResultRow& r : rows) {
    auto it = std::find_if(out.begin(), out.end(), [&](const Aggregate& a) {
      return a.mechanism == r.mechanism && a.epsilon == r.epsilon;
    });
    if (it == out.end()) {
      out.push_back({r.mechanism, r.epsilon, 0, 0.0, 0.0, 0.0});
      it = out.end() - 1;
    }
    ++it->count;
    it->mean += r.avg_l1_error;
    it->mean_wall_ms += r.wall_ms;
  }
  for (Aggregate& a : out) {
    a.mean /= static_cast<double>(a.count);
    a.mean_wall_ms /= static_cast<double>(a.count);
    double ss = 0.0;
    for (const ResultRow& r : rows) {
      if (r.mechanism == a.mechanism && r.epsilon == a.epsilon) {
        ss += (r.avg_l1_error - a.mean) * (r.avg_l1_error - a.mean);
      }
    }
    a.std = a.count > 1 ? std::sqrt(ss / static_cast<double>(a.count - 1)) : 0.0;
  }
  return out;
}

Report run_experiment(const ExperimentConfig& config) {
  const RngStream master(config.seed);
  const DataVector x = [&] {
    if (config.data_path) return io::read_data_file(*config.data_path);
    RngStream data_rng = master.split("data");
    return gen_synthetic_data(config.data_kind, config.n, config.data_params, data_rng);
  }();

  std::vector<Workload> workloads;
  for (std::size_t w = 0; w < config.workload_replicates; ++w) {
    RngStream wrng = master.split("workload").split(w);
    workloads.push_back(gen_workload(config.workload_kind, x.size(), config.workload_params, wrng));
  }

  struct Task {
    MechanismName mechanism;
    double epsilon;
    std::size_t workload_id;
    std::size_t trial;
  };
  std::vector<Task> tasks;
  for (MechanismName m : config.mechanisms) {
    for (double eps : config.epsilons) {
      for (std::size_t w = 0; w < config.workload_replicates; ++w) {
        for (std::size_t t = 0; t < config.trials; ++t) tasks.push_back({m, eps, w, t});
      }
    }
  }

  std::vector<ResultRow> rows(tasks.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size() && !failed; i = next++) {
      const Task& task = tasks[i];
      try {
        const std::uint64_t seed = trial_seed(config.seed, task.workload_id, task.trial);
        RngStream rng(seed);
        MechanismConfig mc{task.mechanism, PrivacyBudget::split(task.epsilon, config.eps1_fraction),
                           config.mode, config.branching};
        const auto start = std::chrono::steady_clock::now();
        const EstimateVector xhat = run_mechanism(mc, x, workloads[task.workload_id], rng);
        const auto stop = std::chrono::steady_clock::now();
        const double ms = config.record_timing
                              ? std::chrono::duration<double, std::milli>(stop - start).count()
                              : 0.0;
        rows[i] = {std::string(to_string(task.mechanism)), task.epsilon, task.workload_id, task.trial,
                   seed, average_workload_error(workloads[task.workload_id], x, xhat), ms};
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        failed = true;
      }
    }
  };
  const unsigned thread_count =
      std::min<unsigned>(resolve_threads(config.threads), static_cast<unsigned>(tasks.size()));
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < thread_count; ++t) pool.emplace_back(worker);
    worker();
  }
  if (error) std::rethrow_exception(error);

  Report report{config, std::move(rows), {}};
  report.aggregates = compute_aggregates(report.results);
  return report;
}

void report_emit(const Report& report, const std::string& path) {
  auto out = io::open_out(path);
  out << report.to_json_string();
  require(out.good(), ErrorCode::kIo, "failed writing report to '" + path + "'");
}

// ---------------------------------------------------------------------------
// Oracles

BrutePartition oracle_brute_partition(const CostTable& costs) {
  const std::int64_t n = costs.domain_size();
  require(n >= 1 && n <= 12, ErrorCode::kInvalidArgument, "brute-force partition oracle needs n <= 12");
  require(costs.mode() == CostMode::kAll, ErrorCode::kInvalidArgument,
          "brute-force partition oracle needs an all-intervals table");
  std::optional<BrutePartition> best;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << (n - 1)); ++mask) {
    Partition p(buckets_from_cuts(n, mask), n);
    const double c = table_cost(costs, p);
    if (!best || c < best->cost) best = BrutePartition{std::move(p), c};
  }
  return *best;
}

BrutePartition oracle_brute_partition(const DataVector& x, double eps2) {
  const std::int64_t n = x.size();
  require(n <= 12, ErrorCode::kInvalidArgument, "brute-force partition oracle needs n <= 12");
  std::optional<BrutePartition> best;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << (n - 1)); ++mask) {
    Partition p(buckets_from_cuts(n, mask), n);
    const double c = partition_cost(x, p, eps2);
    if (!best || c < best->cost) best = BrutePartition{std::move(p), c};
  }
  return *best;
}

double oracle_dense_stage2(const TransformedWorkload& what, const QueryTree& tree,
                           std::span<const double> scalings, double eps2) {
  QueryTree scaled = tree;
  scaled.set_scales(scalings);
  return strategy_error(what, scaled, eps2);
}

}  // namespace dawa
