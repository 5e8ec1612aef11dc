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

// Command-line front end. Uses only the C interface.
#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "dawa/dawa.h"

namespace {

// Thrown on a failing C call; main() turns it into an exit code.
struct CallFailed {
  dawa_status status;
};

void check(dawa_status status) {
  if (status != DAWA_OK) {
    std::cerr << "dawa: " << dawa_status_string(status) << ": " << dawa_last_error() << '\n';
    throw CallFailed{status};
  }
}

template <typename T, void (*Free)(T*)>
struct Handle {
  T* ptr = nullptr;
  Handle() = default;
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  ~Handle() { Free(ptr); }
  T** out() { return &ptr; }
  T* get() const { return ptr; }
};

using Data = Handle<dawa_data, dawa_data_free>;
using Workload = Handle<dawa_workload, dawa_workload_free>;
using PartitionH = Handle<dawa_partition, dawa_partition_free>;
using Estimate = Handle<dawa_estimate, dawa_estimate_free>;

struct OwnedString {
  char* ptr = nullptr;
  ~OwnedString() { dawa_string_free(ptr); }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    std::cerr << "dawa: cannot open '" << path << "'\n";
    throw CallFailed{DAWA_ERR_IO};
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  out << text;
  if (!out) {
    std::cerr << "dawa: cannot write '" << path << "'\n";
    throw CallFailed{DAWA_ERR_IO};
  }
}

std::string intervals_csv(std::size_t count, dawa_status (*get)(const void*, std::size_t, int64_t*, int64_t*),
                          const void* handle) {
  std::ostringstream out;
  out << "lo,hi\n";
  for (std::size_t i = 0; i < count; ++i) {
    int64_t lo = 0;
    int64_t hi = 0;
    check(get(handle, i, &lo, &hi));
    out << lo << ',' << hi << '\n';
  }
  return out.str();
}

dawa_status workload_get(const void* h, std::size_t i, int64_t* lo, int64_t* hi) {
  return dawa_workload_get(static_cast<const dawa_workload*>(h), i, lo, hi);
}

dawa_status partition_get(const void* h, std::size_t i, int64_t* lo, int64_t* hi) {
  return dawa_partition_get(static_cast<const dawa_partition*>(h), i, lo, hi);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Data- and workload-aware differentially private range queries"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(dawa_version()));

  // run
  std::string config_path;
  std::string report_path;
  auto* run = app.add_subcommand("run", "Run an experiment grid from a JSON config and write a JSON report");
  run->add_option("--config", config_path, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  run->add_option("--out", report_path, "Report path; '-' or omitted for stdout");

  // workload
  std::string wl_kind = "uniform";
  int64_t wl_n = 4096;
  std::size_t wl_count = 2000;
  std::size_t wl_clusters = 5;
  std::size_t wl_per_cluster = 400;
  double wl_sigma = 0.0;
  uint64_t wl_seed = 0;
  std::string wl_out;
  auto* workload = app.add_subcommand("workload", "Generate a range-query workload as CSV lo,hi");
  workload->add_option("--kind", wl_kind, "identity | uniform | clustered | large-clustered")
      ->capture_default_str()
      ->check(CLI::IsMember({"identity", "uniform", "clustered", "large-clustered"}));
  workload->add_option("--n", wl_n, "Domain size")->capture_default_str();
  workload->add_option("--count", wl_count, "Number of uniform queries")->capture_default_str();
  workload->add_option("--clusters", wl_clusters, "Cluster centers (clustered kinds)")->capture_default_str();
  workload->add_option("--per-cluster", wl_per_cluster, "Queries per cluster")->capture_default_str();
  workload->add_option("--sigma", wl_sigma, "Endpoint spread; 0 = 256 (clustered) or 1024 (large-clustered)")
      ->capture_default_str();
  workload->add_option("--seed", wl_seed, "Random seed")->capture_default_str();
  workload->add_option("--out", wl_out, "Output path; stdout if omitted");

  // datagen
  std::string dg_kind = "piecewise_constant";
  int64_t dg_n = 1024;
  int64_t dg_segments = 8;
  double dg_scale = 100000.0;
  int64_t dg_value = 5;
  double dg_tail = 1.5;
  uint64_t dg_seed = 0;
  std::string dg_out;
  auto* datagen = app.add_subcommand("datagen", "Generate a synthetic count vector, one count per line");
  datagen->add_option("--kind", dg_kind, "piecewise_constant | heavy_tail | constant")
      ->capture_default_str()
      ->check(CLI::IsMember({"piecewise_constant", "heavy_tail", "constant"}));
  datagen->add_option("--n", dg_n, "Domain size")->capture_default_str();
  datagen->add_option("--segments", dg_segments, "Uniform runs (piecewise_constant)")->capture_default_str();
  datagen->add_option("--scale", dg_scale, "Target total count")->capture_default_str();
  datagen->add_option("--value", dg_value, "Per-position count (constant)")->capture_default_str();
  datagen->add_option("--tail-index", dg_tail, "Pareto shape (heavy_tail)")->capture_default_str();
  datagen->add_option("--seed", dg_seed, "Random seed")->capture_default_str();
  datagen->add_option("--out", dg_out, "Output path; stdout if omitted");

  // partition
  std::string pt_data;
  double pt_eps1 = 0.25;
  double pt_eps2 = 0.75;
  std::string pt_mode = "pow2";
  uint64_t pt_seed = 0;
  bool pt_exact = false;
  std::string pt_out;
  auto* partition = app.add_subcommand("partition", "Choose a private partition and print it as CSV lo,hi");
  partition->add_option("--data", pt_data, "Data file")->required()->check(CLI::ExistingFile);
  partition->add_option("--eps1", pt_eps1, "Budget for partition selection")->capture_default_str();
  partition->add_option("--eps2", pt_eps2, "Budget assumed for bucket estimation")->capture_default_str();
  partition->add_option("--mode", pt_mode, "all | pow2 candidate intervals")
      ->capture_default_str()
      ->check(CLI::IsMember({"all", "pow2"}));
  partition->add_option("--seed", pt_seed, "Random seed")->capture_default_str();
  partition->add_flag("--exact", pt_exact, "Skip the noise (NOT private; debugging only)");
  partition->add_option("--out", pt_out, "Output path; stdout if omitted");

  // mechanism
  std::string mc_name = "dawa";
  std::string mc_data;
  std::string mc_workload;
  double mc_eps = 1.0;
  double mc_fraction = 0.25;
  std::string mc_mode = "pow2";
  int mc_branching = 2;
  uint64_t mc_seed = 0;
  std::string mc_out;
  std::string mc_dump_what;
  std::string mc_dump_tree;
  auto* mechanism = app.add_subcommand("mechanism", "Run one mechanism and write the estimate, one value per line");
  mechanism->add_option("--name", mc_name,
                        "dawa | identity | partition_laplace | hier_uniform | hier_geometric | greedy_no_partition")
      ->capture_default_str()
      ->check(CLI::IsMember({"dawa", "identity", "partition_laplace", "hier_uniform", "hier_geometric",
                             "greedy_no_partition"}));
  mechanism->add_option("--data", mc_data, "Data file")->required()->check(CLI::ExistingFile);
  mechanism->add_option("--workload", mc_workload, "Workload CSV (required by dawa and greedy_no_partition)")
      ->check(CLI::ExistingFile);
  mechanism->add_option("--eps", mc_eps, "Total privacy budget")->capture_default_str();
  mechanism->add_option("--eps1-fraction", mc_fraction, "Share of eps spent on the partition")->capture_default_str();
  mechanism->add_option("--mode", mc_mode, "all | pow2")->capture_default_str()->check(CLI::IsMember({"all", "pow2"}));
  mechanism->add_option("--branching", mc_branching, "Query tree branching factor")->capture_default_str();
  mechanism->add_option("--seed", mc_seed, "Random seed")->capture_default_str();
  mechanism->add_option("--out", mc_out, "Estimate path; stdout if omitted");
  mechanism->add_option("--dump-transformed", mc_dump_what,
                        "dawa only: write the bucket-level workload matrix as CSV");
  mechanism->add_option("--dump-tree", mc_dump_tree, "dawa only: write the scaled query tree as CSV lo,hi,depth,c_q");

  // spatial
  std::string sp_points;
  std::string sp_rects;
  double sp_eps = 1.0;
  int sp_g = 10;
  uint64_t sp_seed = 0;
  std::vector<double> sp_bbox;
  std::string sp_out;
  auto* spatial = app.add_subcommand("spatial", "Answer rectangle queries over 2D points");
  spatial->add_option("--points", sp_points, "Points CSV x,y")->required()->check(CLI::ExistingFile);
  spatial->add_option("--rects", sp_rects, "Rectangles CSV xlo,xhi,ylo,yhi")->required()->check(CLI::ExistingFile);
  spatial->add_option("--eps", sp_eps, "Total privacy budget")->capture_default_str();
  spatial->add_option("--g", sp_g, "Grid has 2^g cells per axis")->capture_default_str()->check(CLI::Range(1, 15));
  spatial->add_option("--seed", sp_seed, "Random seed")->capture_default_str();
  spatial->add_option("--bbox", sp_bbox, "Bounding box xmin xmax ymin ymax (default unit square)")->expected(4);
  spatial->add_option("--out", sp_out, "Output path; stdout if omitted");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      const std::string config = slurp(config_path);
      OwnedString report;
      check(dawa_experiment_run(config.c_str(), &report.ptr));
      emit(report.ptr, report_path);
    } else if (*workload) {
      Workload w;
      check(dawa_workload_generate(wl_kind.c_str(), wl_n, wl_count, wl_clusters, wl_per_cluster, wl_sigma, wl_seed,
                                   w.out()));
      emit(intervals_csv(dawa_workload_size(w.get()), workload_get, w.get()), wl_out);
    } else if (*datagen) {
      Data d;
      check(dawa_data_generate(dg_kind.c_str(), dg_n, dg_segments, dg_scale, dg_value, dg_tail, dg_seed, d.out()));
      std::ostringstream out;
      for (std::size_t j = 1; j <= dawa_data_size(d.get()); ++j) out << dawa_data_get(d.get(), j) << '\n';
      emit(out.str(), dg_out);
    } else if (*partition) {
      Data d;
      check(dawa_data_load(pt_data.c_str(), d.out()));
      PartitionH p;
      check(dawa_partition_private(d.get(), pt_eps1, pt_eps2, pt_mode.c_str(), pt_exact ? 1 : 0, pt_seed, p.out()));
      if (pt_exact) std::cerr << "dawa: warning: --exact output is not differentially private\n";
      emit(intervals_csv(dawa_partition_size(p.get()), partition_get, p.get()), pt_out);
    } else if (*mechanism) {
      Data d;
      check(dawa_data_load(mc_data.c_str(), d.out()));
      Workload w;
      if (!mc_workload.empty()) check(dawa_workload_load(mc_workload.c_str(), static_cast<int64_t>(dawa_data_size(d.get())), w.out()));
      Estimate e;
      check(dawa_mechanism_run(mc_name.c_str(), d.get(), w.get(), mc_eps, mc_fraction, mc_mode.c_str(), mc_branching,
                               mc_seed, e.out()));
      std::ostringstream out;
      out.precision(17);
      for (std::size_t j = 1; j <= dawa_estimate_size(e.get()); ++j) out << dawa_estimate_get(e.get(), j) << '\n';
      emit(out.str(), mc_out);
      if (!mc_dump_what.empty() || !mc_dump_tree.empty()) {
        if (mc_name != "dawa" || !w.get()) {
          std::cerr << "dawa: --dump-* needs --name dawa and a workload\n";
          return 2;
        }
        // The first stage draws first from the same seed, so this is the
        // partition the run above used.
        PartitionH p;
        const double eps1 = mc_fraction * mc_eps;
        check(dawa_partition_private(d.get(), eps1, mc_eps - eps1, mc_mode.c_str(), 0, mc_seed, p.out()));
        check(dawa_stage2_dump(w.get(), p.get(), mc_branching, mc_dump_what.empty() ? nullptr : mc_dump_what.c_str(),
                               mc_dump_tree.empty() ? nullptr : mc_dump_tree.c_str()));
      }
    } else if (*spatial) {
      OwnedString answers;
      check(dawa_spatial_run_files(sp_points.c_str(), sp_rects.c_str(), sp_bbox.empty() ? nullptr : sp_bbox.data(),
                                   sp_g, sp_eps, sp_seed, &answers.ptr));
      emit(answers.ptr, sp_out);
    }
  } catch (const CallFailed& f) {
    return static_cast<int>(f.status);
  }
  return 0;
}
