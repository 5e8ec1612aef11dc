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

#ifndef DAWA_SPATIAL_HPP_
#define DAWA_SPATIAL_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "dawa/core.hpp"
#include "dawa/partition.hpp"
#include "dawa/rng.hpp"

// Two-dimensional data through the 1D pipeline: grid discretization, Hilbert
// linearization and rectangle answering with uniformity inside partially
// covered cells.
namespace dawa {

struct Point2 {
  double x;
  double y;
};

// Axis-aligned box in real coordinates.
struct Box {
  double xmin;
  double xmax;
  double ymin;
  double ymax;
};

struct GridSpec {
  int g = 10;  // 2^g bins per axis
  Box bounds{0.0, 1.0, 0.0, 1.0};

  std::int64_t side() const { return std::int64_t{1} << g; }
  void validate() const;
};

// Hilbert curve over the 2^g x 2^g grid, starting at cell (0,0). Indices are
// 0-based here; the 1D domain position of index d is d + 1.
class HilbertMap {
 public:
  explicit HilbertMap(int g);

  int order() const { return g_; }
  std::int64_t side() const { return std::int64_t{1} << g_; }
  std::int64_t cell_count() const { return side() * side(); }

  std::int64_t index(std::int64_t cx, std::int64_t cy) const;
  std::pair<std::int64_t, std::int64_t> cell(std::int64_t d) const;

 private:
  int g_;
};

// Counts per cell, row-major: counts[cy * side + cx].
struct Grid2D {
  std::int64_t side;
  std::vector<std::int64_t> counts;

  std::int64_t at(std::int64_t cx, std::int64_t cy) const { return counts[cy * side + cx]; }
  std::int64_t total() const;
};

// Inclusive cell ranges.
struct CellRect {
  std::int64_t x_lo;
  std::int64_t x_hi;
  std::int64_t y_lo;
  std::int64_t y_hi;

  std::int64_t area() const { return (x_hi - x_lo + 1) * (y_hi - y_lo + 1); }
};

struct RectangleQuery {
  CellRect cells;
  Box box;  // real coordinates; cells is the set of cells it touches
};

// Cell coordinate of a real coordinate along one axis. Points on a boundary
// between two cells go to the lower cell; values outside are clamped.
std::int64_t axis_cell(double v, double lo, double hi, std::int64_t side);

Grid2D grid_discretize(std::span<const Point2> points, const GridSpec& spec);

DataVector linearize(const Grid2D& grid, const HilbertMap& map);

// Cells with positive-area overlap with the box.
RectangleQuery make_rectangle_query(const Box& box, const GridSpec& spec);

// Maximal runs of consecutive Hilbert positions (1-based) covering the cells,
// sorted.
std::vector<Interval> rectangle_to_ranges(const CellRect& rect, const HilbertMap& map);

// Sum of xhat over the box, weighting partially covered cells by their covered
// area fraction.
double answer_rectangle(const EstimateVector& xhat, const Box& box, const HilbertMap& map,
                        const GridSpec& spec);

// Workload formed by the union of the runs of every rectangle.
Workload rectangles_to_workload(std::span<const RectangleQuery> rects, const HilbertMap& map);

struct SpatialOptions {
  GridSpec grid;
  double epsilon = 1.0;
  double eps1_fraction = 0.25;
  CostMode mode = CostMode::kPow2;
  int branching = 2;
};

// Discretize, linearize, run DAWA with the rectangle workload, answer each
// rectangle.
std::vector<double> run_spatial(std::span<const Point2> points, std::span<const Box> rects,
                                const SpatialOptions& options, RngStream& rng);

}  // namespace dawa

#endif  // DAWA_SPATIAL_HPP_
