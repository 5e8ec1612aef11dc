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

/* C interface to the DAWA library.
 *
 * Objects are opaque handles owned by the caller and released with the
 * matching *_free function (NULL is accepted). Every fallible call returns a
 * dawa_status; on failure dawa_last_error() describes the most recent error
 * on the calling thread. Positions are 1-based and intervals inclusive. */
#ifndef DAWA_DAWA_H_
#define DAWA_DAWA_H_

#include <stddef.h>
#include <stdint.h>

#if defined(DAWA_BUILDING_LIBRARY)
#define DAWA_API __attribute__((visibility("default")))
#else
#define DAWA_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum dawa_status {
  DAWA_OK = 0,
  DAWA_ERR_INVALID_ARGUMENT = 1,
  DAWA_ERR_INVALID_INTERVAL = 2,
  DAWA_ERR_INVALID_PARTITION = 3,
  DAWA_ERR_DIMENSION_MISMATCH = 4,
  DAWA_ERR_SINGULAR = 5,
  DAWA_ERR_LOGIC = 6,
  DAWA_ERR_IO = 7,
  DAWA_ERR_PARSE = 8,
  DAWA_ERR_INTERNAL = 9
} dawa_status;

typedef struct dawa_data dawa_data;
typedef struct dawa_workload dawa_workload;
typedef struct dawa_partition dawa_partition;
typedef struct dawa_estimate dawa_estimate;

DAWA_API const char* dawa_status_string(dawa_status status);
/* Message of the last failure on this thread; "" if none. */
DAWA_API const char* dawa_last_error(void);
DAWA_API const char* dawa_version(void);

/* Strings returned through char** out-parameters are freed with this. */
DAWA_API void dawa_string_free(char* s);

/* ---- data vectors ---- */
DAWA_API dawa_status dawa_data_create(const int64_t* counts, size_t n, dawa_data** out);
DAWA_API dawa_status dawa_data_load(const char* path, dawa_data** out);
DAWA_API dawa_status dawa_data_save(const dawa_data* data, const char* path);
/* kind: "piecewise_constant", "heavy_tail" or "constant". Parameters that do
 * not apply to the kind are ignored. */
DAWA_API dawa_status dawa_data_generate(const char* kind, int64_t n, int64_t segments, double scale,
                                        int64_t value, double tail_index, uint64_t seed,
                                        dawa_data** out);
DAWA_API size_t dawa_data_size(const dawa_data* data);
DAWA_API int64_t dawa_data_get(const dawa_data* data, size_t j);
DAWA_API void dawa_data_free(dawa_data* data);

/* ---- workloads ---- */
/* lo[i], hi[i] for i < m over domain [1, n]. */
DAWA_API dawa_status dawa_workload_create(const int64_t* lo, const int64_t* hi, size_t m, int64_t n,
                                          dawa_workload** out);
DAWA_API dawa_status dawa_workload_load(const char* path, int64_t n, dawa_workload** out);
DAWA_API dawa_status dawa_workload_save(const dawa_workload* w, const char* path);
/* kind: "identity", "uniform", "clustered" or "large-clustered". sigma <= 0
 * selects the kind's default spread. */
DAWA_API dawa_status dawa_workload_generate(const char* kind, int64_t n, size_t count, size_t clusters,
                                            size_t per_cluster, double sigma, uint64_t seed,
                                            dawa_workload** out);
DAWA_API size_t dawa_workload_size(const dawa_workload* w);
DAWA_API int64_t dawa_workload_domain(const dawa_workload* w);
DAWA_API dawa_status dawa_workload_get(const dawa_workload* w, size_t i, int64_t* lo, int64_t* hi);
DAWA_API void dawa_workload_free(dawa_workload* w);

/* ---- partitions ---- */
/* mode: "pow2" or "all". With exact != 0 the noise-free least-cost partition
 * is returned (not private; eps1 is then ignored). */
DAWA_API dawa_status dawa_partition_private(const dawa_data* data, double eps1, double eps2,
                                            const char* mode, int exact, uint64_t seed,
                                            dawa_partition** out);
DAWA_API size_t dawa_partition_size(const dawa_partition* p);
DAWA_API dawa_status dawa_partition_get(const dawa_partition* p, size_t i, int64_t* lo, int64_t* hi);
/* Total noise-free cost sum(dev + 1/eps2) of p on data. */
DAWA_API dawa_status dawa_partition_cost(const dawa_partition* p, const dawa_data* data, double eps2,
                                         double* out);
DAWA_API dawa_status dawa_partition_save(const dawa_partition* p, const char* path);
DAWA_API void dawa_partition_free(dawa_partition* p);

/* ---- mechanisms ---- */
/* mechanism: "dawa", "identity", "partition_laplace", "hier_uniform",
 * "hier_geometric" or "greedy_no_partition". The workload may be NULL for
 * mechanisms that do not use it. */
DAWA_API dawa_status dawa_mechanism_run(const char* mechanism, const dawa_data* data,
                                        const dawa_workload* w, double epsilon, double eps1_fraction,
                                        const char* mode, int branching, uint64_t seed,
                                        dawa_estimate** out);
DAWA_API size_t dawa_estimate_size(const dawa_estimate* e);
DAWA_API double dawa_estimate_get(const dawa_estimate* e, size_t j);
DAWA_API dawa_status dawa_estimate_save(const dawa_estimate* e, const char* path);
/* Average absolute error of the estimate over the workload. */
DAWA_API dawa_status dawa_workload_error(const dawa_workload* w, const dawa_data* data,
                                         const dawa_estimate* e, double* out);
DAWA_API void dawa_estimate_free(dawa_estimate* e);

/* Writes the transformed workload (CSV, one row per query) and the scaled
 * query tree ("lo,hi,depth,c_q") chosen for (w, p). Either path may be NULL. */
DAWA_API dawa_status dawa_stage2_dump(const dawa_workload* w, const dawa_partition* p, int branching,
                                      const char* transformed_path, const char* tree_path);

/* ---- experiments ---- */
/* Runs the experiment described by a JSON config and returns the JSON report
 * in *report_json (free with dawa_string_free). */
DAWA_API dawa_status dawa_experiment_run(const char* config_json, char** report_json);

/* ---- spatial ---- */
/* Points (x[i], y[i]) for i < n_points, rectangles as 4 doubles each
 * (xmin, xmax, ymin, ymax). answers must hold n_rects values. bbox may be
 * NULL for the unit square, else 4 doubles in the same layout. */
DAWA_API dawa_status dawa_spatial_run(const double* x, const double* y, size_t n_points,
                                      const double* rects, size_t n_rects, const double* bbox, int g,
                                      double epsilon, uint64_t seed, double* answers);

/* Same, reading points ("x,y") and rectangles ("xlo,xhi,ylo,yhi") from CSV
 * files. *answers_csv receives "answer" plus one line per rectangle (free with
 * dawa_string_free). */
DAWA_API dawa_status dawa_spatial_run_files(const char* points_path, const char* rects_path,
                                            const double* bbox, int g, double epsilon, uint64_t seed,
                                            char** answers_csv);

#ifdef __cplusplus
}
#endif

#endif /* DAWA_DAWA_H_ */
