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

#include "dawa/dawa.h"

#include <cstring>
#include <new>
#include <sstream>
#include <string>

#include "dawa/core.hpp"
#include "dawa/error.hpp"
#include "dawa/estimation.hpp"
#include "dawa/harness.hpp"
#include "dawa/io.hpp"
#include "dawa/mechanisms.hpp"
#include "dawa/partition.hpp"
#include "dawa/spatial.hpp"
#include "dawa/transform.hpp"

struct dawa_data {
  dawa::DataVector value;
};
struct dawa_workload {
  dawa::Workload value;
};
struct dawa_partition {
  dawa::Partition value;
};
struct dawa_estimate {
  dawa::EstimateVector value;
};

namespace {

thread_local std::string last_error;

dawa_status to_status(dawa::ErrorCode code) {
  switch (code) {
    case dawa::ErrorCode::kInvalidArgument: return DAWA_ERR_INVALID_ARGUMENT;
    case dawa::ErrorCode::kInvalidInterval: return DAWA_ERR_INVALID_INTERVAL;
    case dawa::ErrorCode::kInvalidPartition: return DAWA_ERR_INVALID_PARTITION;
    case dawa::ErrorCode::kDimensionMismatch: return DAWA_ERR_DIMENSION_MISMATCH;
    case dawa::ErrorCode::kSingular: return DAWA_ERR_SINGULAR;
    case dawa::ErrorCode::kLogic: return DAWA_ERR_LOGIC;
    case dawa::ErrorCode::kIo: return DAWA_ERR_IO;
    case dawa::ErrorCode::kParse: return DAWA_ERR_PARSE;
  }
  return DAWA_ERR_INTERNAL;
}

// Runs body, translating exceptions into status codes.
template <typename Fn>
dawa_status guarded(Fn&& body) {
  try {
    last_error.clear();
    body();
    return DAWA_OK;
  } catch (const dawa::Error& e) {
    last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
  } catch (const std::exception& e) {
    last_error = e.what();
  } catch (...) {
    last_error = "unknown error";
  }
  return DAWA_ERR_INTERNAL;
}

void need(const void* p, const char* what) {
  dawa::require(p != nullptr, dawa::ErrorCode::kInvalidArgument, std::string(what) + " is NULL");
}

char* copy_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

extern "C" {

const char* dawa_status_string(dawa_status status) {
  switch (status) {
    case DAWA_OK: return "ok";
    case DAWA_ERR_INVALID_ARGUMENT: return "invalid argument";
    case DAWA_ERR_INVALID_INTERVAL: return "invalid interval";
    case DAWA_ERR_INVALID_PARTITION: return "invalid partition";
    case DAWA_ERR_DIMENSION_MISMATCH: return "dimension mismatch";
    case DAWA_ERR_SINGULAR: return "singular system";
    case DAWA_ERR_LOGIC: return "logic error";
    case DAWA_ERR_IO: return "I/O error";
    case DAWA_ERR_PARSE: return "parse error";
    case DAWA_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* dawa_last_error(void) { return last_error.c_str(); }

const char* dawa_version(void) { return "1.0.0"; }

void dawa_string_free(char* s) { delete[] s; }

dawa_status dawa_data_create(const int64_t* counts, size_t n, dawa_data** out) {
  return guarded([&] {
    need(out, "out");
    need(counts, "counts");
    *out = new dawa_data{dawa::DataVector(std::vector<std::int64_t>(counts, counts + n))};
  });
}

dawa_status dawa_data_load(const char* path, dawa_data** out) {
  return guarded([&] {
    need(out, "out");
    need(path, "path");
    *out = new dawa_data{dawa::io::read_data_file(path)};
  });
}

dawa_status dawa_data_save(const dawa_data* data, const char* path) {
  return guarded([&] {
    need(data, "data");
    need(path, "path");
    auto f = dawa::io::open_out(path);
    dawa::io::write_data(f, data->value);
  });
}

dawa_status dawa_data_generate(const char* kind, int64_t n, int64_t segments, double scale, int64_t value,
                               double tail_index, uint64_t seed, dawa_data** out) {
  return guarded([&] {
    need(out, "out");
    need(kind, "kind");
    dawa::DataParams params{segments, scale, value, tail_index};
    dawa::RngStream rng(seed);
    *out = new dawa_data{dawa::gen_synthetic_data(dawa::parse_data_kind(kind), n, params, rng)};
  });
}

size_t dawa_data_size(const dawa_data* data) {
  return data ? static_cast<size_t>(data->value.size()) : 0;
}

int64_t dawa_data_get(const dawa_data* data, size_t j) {
  if (!data || j < 1 || j > static_cast<size_t>(data->value.size())) return -1;
  return data->value[static_cast<std::int64_t>(j)];
}

void dawa_data_free(dawa_data* data) { delete data; }

dawa_status dawa_workload_create(const int64_t* lo, const int64_t* hi, size_t m, int64_t n,
                                 dawa_workload** out) {
  return guarded([&] {
    need(out, "out");
    need(lo, "lo");
    need(hi, "hi");
    std::vector<dawa::Interval> queries;
    queries.reserve(m);
    for (size_t i = 0; i < m; ++i) queries.push_back({lo[i], hi[i]});
    *out = new dawa_workload{dawa::Workload(std::move(queries), n)};
  });
}

dawa_status dawa_workload_load(const char* path, int64_t n, dawa_workload** out) {
  return guarded([&] {
    need(out, "out");
    need(path, "path");
    *out = new dawa_workload{dawa::io::read_workload_file(path, n)};
  });
}

dawa_status dawa_workload_save(const dawa_workload* w, const char* path) {
  return guarded([&] {
    need(w, "workload");
    need(path, "path");
    auto f = dawa::io::open_out(path);
    dawa::io::write_intervals(f, w->value.queries());
  });
}

dawa_status dawa_workload_generate(const char* kind, int64_t n, size_t count, size_t clusters,
                                   size_t per_cluster, double sigma, uint64_t seed, dawa_workload** out) {
  return guarded([&] {
    need(out, "out");
    need(kind, "kind");
    dawa::WorkloadParams params{count, clusters, per_cluster, sigma};
    dawa::RngStream rng(seed);
    *out = new dawa_workload{dawa::gen_workload(dawa::parse_workload_kind(kind), n, params, rng)};
  });
}

size_t dawa_workload_size(const dawa_workload* w) { return w ? w->value.size() : 0; }

int64_t dawa_workload_domain(const dawa_workload* w) { return w ? w->value.domain_size() : 0; }

dawa_status dawa_workload_get(const dawa_workload* w, size_t i, int64_t* lo, int64_t* hi) {
  return guarded([&] {
    need(w, "workload");
    dawa::require(i < w->value.size(), dawa::ErrorCode::kInvalidArgument, "query index out of range");
    if (lo) *lo = w->value[i].lo;
    if (hi) *hi = w->value[i].hi;
  });
}

void dawa_workload_free(dawa_workload* w) { delete w; }

dawa_status dawa_partition_private(const dawa_data* data, double eps1, double eps2, const char* mode,
                                   int exact, uint64_t seed, dawa_partition** out) {
  return guarded([&] {
    need(out, "out");
    need(data, "data");
    const dawa::CostMode cost_mode = mode ? dawa::parse_cost_mode(mode) : dawa::CostMode::kPow2;
    if (exact) {
      dawa::require(eps2 > 0, dawa::ErrorCode::kInvalidArgument, "eps2 must be positive");
      *out = new dawa_partition{dawa::exact_least_cost_partition(data->value, eps2, cost_mode)};
    } else {
      dawa::PartitionParams params{eps1, eps2, cost_mode};
      dawa::RngStream rng(seed);
      *out = new dawa_partition{dawa::private_partition(data->value, params, rng)};
    }
  });
}

size_t dawa_partition_size(const dawa_partition* p) { return p ? p->value.size() : 0; }

dawa_status dawa_partition_get(const dawa_partition* p, size_t i, int64_t* lo, int64_t* hi) {
  return guarded([&] {
    need(p, "partition");
    dawa::require(i < p->value.size(), dawa::ErrorCode::kInvalidArgument, "bucket index out of range");
    if (lo) *lo = p->value[i].lo;
    if (hi) *hi = p->value[i].hi;
  });
}

dawa_status dawa_partition_cost(const dawa_partition* p, const dawa_data* data, double eps2, double* out) {
  return guarded([&] {
    need(p, "partition");
    need(data, "data");
    need(out, "out");
    *out = dawa::partition_cost(data->value, p->value, eps2);
  });
}

dawa_status dawa_partition_save(const dawa_partition* p, const char* path) {
  return guarded([&] {
    need(p, "partition");
    need(path, "path");
    auto f = dawa::io::open_out(path);
    dawa::io::write_intervals(f, p->value.buckets());
  });
}

void dawa_partition_free(dawa_partition* p) { delete p; }

dawa_status dawa_mechanism_run(const char* mechanism, const dawa_data* data, const dawa_workload* w,
                               double epsilon, double eps1_fraction, const char* mode, int branching,
                               uint64_t seed, dawa_estimate** out) {
  return guarded([&] {
    need(out, "out");
    need(mechanism, "mechanism");
    need(data, "data");
    dawa::MechanismConfig config{dawa::parse_mechanism_name(mechanism),
                                 dawa::PrivacyBudget::split(epsilon, eps1_fraction),
                                 mode ? dawa::parse_cost_mode(mode) : dawa::CostMode::kPow2, branching};
    // Workload-independent mechanisms accept a missing workload.
    const dawa::Workload fallback({{1, data->value.size()}}, data->value.size());
    const bool uses_workload =
        config.name == dawa::MechanismName::kDawa || config.name == dawa::MechanismName::kGreedyNoPartition;
    if (uses_workload) need(w, "workload");
    dawa::RngStream rng(seed);
    *out = new dawa_estimate{dawa::run_mechanism(config, data->value, w ? w->value : fallback, rng)};
  });
}

size_t dawa_estimate_size(const dawa_estimate* e) { return e ? static_cast<size_t>(e->value.size()) : 0; }

double dawa_estimate_get(const dawa_estimate* e, size_t j) {
  if (!e || j < 1 || j > static_cast<size_t>(e->value.size())) return 0.0;
  return e->value[static_cast<std::int64_t>(j)];
}

dawa_status dawa_estimate_save(const dawa_estimate* e, const char* path) {
  return guarded([&] {
    need(e, "estimate");
    need(path, "path");
    auto f = dawa::io::open_out(path);
    dawa::io::write_estimate(f, e->value);
  });
}

dawa_status dawa_workload_error(const dawa_workload* w, const dawa_data* data, const dawa_estimate* e,
                                double* out) {
  return guarded([&] {
    need(w, "workload");
    need(data, "data");
    need(e, "estimate");
    need(out, "out");
    *out = dawa::average_workload_error(w->value, data->value, e->value);
  });
}

void dawa_estimate_free(dawa_estimate* e) { delete e; }

dawa_status dawa_stage2_dump(const dawa_workload* w, const dawa_partition* p, int branching,
                             const char* transformed_path, const char* tree_path) {
  return guarded([&] {
    need(w, "workload");
    need(p, "partition");
    const dawa::TransformedWorkload what = dawa::transform_workload(w->value, p->value);
    if (transformed_path) {
      auto f = dawa::io::open_out(transformed_path);
      what.write_csv(f);
    }
    if (tree_path) {
      const dawa::QueryTree tree = dawa::greedy_scale(what, dawa::build_query_tree(p->value.size(), branching));
      auto f = dawa::io::open_out(tree_path);
      tree.write_csv(f);
    }
  });
}

dawa_status dawa_experiment_run(const char* config_json, char** report_json) {
  return guarded([&] {
    need(config_json, "config_json");
    need(report_json, "report_json");
    nlohmann::json parsed;
    try {
      parsed = nlohmann::json::parse(config_json);
    } catch (const nlohmann::json::parse_error& e) {
      dawa::fail(dawa::ErrorCode::kParse, std::string("config is not valid JSON: ") + e.what());
    }
    const dawa::Report report = dawa::run_experiment(dawa::ExperimentConfig::from_json(parsed));
    *report_json = copy_string(report.to_json_string());
  });
}

dawa_status dawa_spatial_run(const double* x, const double* y, size_t n_points, const double* rects,
                             size_t n_rects, const double* bbox, int g, double epsilon, uint64_t seed,
                             double* answers) {
  return guarded([&] {
    if (n_points > 0) {
      need(x, "x");
      need(y, "y");
    }
    need(rects, "rects");
    need(answers, "answers");
    std::vector<dawa::Point2> points(n_points);
    for (size_t i = 0; i < n_points; ++i) points[i] = {x[i], y[i]};
    std::vector<dawa::Box> boxes(n_rects);
    for (size_t i = 0; i < n_rects; ++i) {
      boxes[i] = {rects[4 * i], rects[4 * i + 1], rects[4 * i + 2], rects[4 * i + 3]};
    }
    dawa::SpatialOptions options;
    options.grid.g = g;
    if (bbox) options.grid.bounds = {bbox[0], bbox[1], bbox[2], bbox[3]};
    options.epsilon = epsilon;
    dawa::RngStream rng(seed);
    const std::vector<double> out = dawa::run_spatial(points, boxes, options, rng);
    std::copy(out.begin(), out.end(), answers);
  });
}

dawa_status dawa_spatial_run_files(const char* points_path, const char* rects_path, const double* bbox,
                                   int g, double epsilon, uint64_t seed, char** answers_csv) {
  return guarded([&] {
    need(points_path, "points_path");
    need(rects_path, "rects_path");
    need(answers_csv, "answers_csv");
    auto pin = dawa::io::open_in(points_path);
    const std::vector<dawa::Point2> points = dawa::io::read_points(pin);
    auto rin = dawa::io::open_in(rects_path);
    const std::vector<dawa::Box> boxes = dawa::io::read_rects(rin);
    dawa::SpatialOptions options;
    options.grid.g = g;
    if (bbox) options.grid.bounds = {bbox[0], bbox[1], bbox[2], bbox[3]};
    options.epsilon = epsilon;
    dawa::RngStream rng(seed);
    std::ostringstream out;
    out.precision(17);
    out << "answer\n";
    for (double a : dawa::run_spatial(points, boxes, options, rng)) out << a << '\n';
    *answers_csv = copy_string(out.str());
  });
}

}  // extern "C"
