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

#include "dawa/spatial.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dawa/mechanisms.hpp"

namespace dawa {
namespace {

void rotate_quadrant(std::int64_t n, std::int64_t& x, std::int64_t& y, std::int64_t rx, std::int64_t ry) {
  if (ry == 0) {
    if (rx == 1) {
      x = n - 1 - x;
      y = n - 1 - y;
    }
    std::swap(x, y);
  }
}

double axis_position(double v, double lo, double hi, std::int64_t side) {
  return (v - lo) / (hi - lo) * static_cast<double>(side);
}

void collect_runs(const CellRect& rect, const HilbertMap& map, std::int64_t bx, std::int64_t by,
                  std::int64_t size, std::vector<Interval>& out) {
  const std::int64_t bx_hi = bx + size - 1;
  const std::int64_t by_hi = by + size - 1;
  if (bx_hi < rect.x_lo || bx > rect.x_hi || by_hi < rect.y_lo || by > rect.y_hi) return;
  if (rect.x_lo <= bx && bx_hi <= rect.x_hi && rect.y_lo <= by && by_hi <= rect.y_hi) {
    // An aligned block is a contiguous stretch of the curve.
    const std::int64_t block = size * size;
    const std::int64_t base = map.index(bx, by) / block * block;
    out.push_back({base + 1, base + block});
    return;
  }
  const std::int64_t half = size / 2;
  collect_runs(rect, map, bx, by, half, out);
  collect_runs(rect, map, bx + half, by, half, out);
  collect_runs(rect, map, bx, by + half, half, out);
  collect_runs(rect, map, bx + half, by + half, half, out);
}

}  // namespace

void GridSpec::validate() const {
  require(g >= 1 && g <= 15, ErrorCode::kInvalidArgument, "grid exponent must lie in [1,15]");
  require(bounds.xmin < bounds.xmax && bounds.ymin < bounds.ymax, ErrorCode::kInvalidArgument,
          "grid bounding box is degenerate");
}

HilbertMap::HilbertMap(int g) : g_(g) {
  require(g >= 1 && g <= 31, ErrorCode::kInvalidArgument, "Hilbert order must lie in [1,31]");
}

std::int64_t HilbertMap::index(std::int64_t cx, std::int64_t cy) const {
  const std::int64_t n = side();
  require(0 <= cx && cx < n && 0 <= cy && cy < n, ErrorCode::kInvalidArgument, "cell outside grid");
  std::int64_t d = 0;
  for (std::int64_t s = n / 2; s > 0; s /= 2) {
    const std::int64_t rx = (cx & s) > 0 ? 1 : 0;
    const std::int64_t ry = (cy & s) > 0 ? 1 : 0;
    d += s * s * ((3 * rx) ^ ry);
    rotate_quadrant(n, cx, cy, rx, ry);
  }
  return d;
}

std::pair<std::int64_t, std::int64_t> HilbertMap::cell(std::int64_t d) const {
  const std::int64_t n = side();
  require(0 <= d && d < n * n, ErrorCode::kInvalidArgument, "Hilbert index outside grid");
  std::int64_t x = 0;
  std::int64_t y = 0;
  for (std::int64_t s = 1; s < n; s *= 2) {
    const std::int64_t rx = 1 & (d / 2);
    const std::int64_t ry = 1 & (d ^ rx);
    rotate_quadrant(s, x, y, rx, ry);
    x += s * rx;
    y += s * ry;
    d /= 4;
  }
  return {x, y};
}

std::int64_t Grid2D::total() const {
  return std::accumulate(counts.begin(), counts.end(), std::int64_t{0});
}

std::int64_t axis_cell(double v, double lo, double hi, std::int64_t side) {
  const double pos = axis_position(v, lo, hi, side);
  const auto cell = static_cast<std::int64_t>(std::ceil(pos)) - 1;
  return std::clamp<std::int64_t>(cell, 0, side - 1);
}

Grid2D grid_discretize(std::span<const Point2> points, const GridSpec& spec) {
  spec.validate();
  const std::int64_t side = spec.side();
  Grid2D grid{side, std::vector<std::int64_t>(static_cast<std::size_t>(side * side), 0)};
  for (const Point2& p : points) {
    require(std::isfinite(p.x) && std::isfinite(p.y), ErrorCode::kInvalidArgument,
            "point coordinates must be finite");
    const std::int64_t cx = axis_cell(p.x, spec.bounds.xmin, spec.bounds.xmax, side);
    const std::int64_t cy = axis_cell(p.y, spec.bounds.ymin, spec.bounds.ymax, side);
    ++grid.counts[static_cast<std::size_t>(cy * side + cx)];
  }
  return grid;
}

DataVector linearize(const Grid2D& grid, const HilbertMap& map) {
  require(grid.side == map.side(), ErrorCode::kDimensionMismatch, "grid side does not match curve order");
  std::vector<std::int64_t> x(static_cast<std::size_t>(map.cell_count()));
  for (std::int64_t d = 0; d < map.cell_count(); ++d) {
    const auto [cx, cy] = map.cell(d);
    x[static_cast<std::size_t>(d)] = grid.at(cx, cy);
  }
  return DataVector(std::move(x));
}

RectangleQuery make_rectangle_query(const Box& box, const GridSpec& spec) {
  spec.validate();
  const std::int64_t side = spec.side();
  const Box& b = spec.bounds;
  const double px_lo = std::max(axis_position(box.xmin, b.xmin, b.xmax, side), 0.0);
  const double px_hi = std::min(axis_position(box.xmax, b.xmin, b.xmax, side), static_cast<double>(side));
  const double py_lo = std::max(axis_position(box.ymin, b.ymin, b.ymax, side), 0.0);
  const double py_hi = std::min(axis_position(box.ymax, b.ymin, b.ymax, side), static_cast<double>(side));
  require(px_lo < px_hi && py_lo < py_hi, ErrorCode::kInvalidArgument,
          "rectangle does not overlap the grid with positive area");
  CellRect cells{static_cast<std::int64_t>(std::floor(px_lo)),
                 static_cast<std::int64_t>(std::ceil(px_hi)) - 1,
                 static_cast<std::int64_t>(std::floor(py_lo)),
                 static_cast<std::int64_t>(std::ceil(py_hi)) - 1};
  return {cells, box};
}

std::vector<Interval> rectangle_to_ranges(const CellRect& rect, const HilbertMap& map) {
  require(0 <= rect.x_lo && rect.x_lo <= rect.x_hi && rect.x_hi < map.side() && 0 <= rect.y_lo &&
              rect.y_lo <= rect.y_hi && rect.y_hi < map.side(),
          ErrorCode::kInvalidArgument, "rectangle outside grid");
  std::vector<Interval> pieces;
  collect_runs(rect, map, 0, 0, map.side(), pieces);
  std::sort(pieces.begin(), pieces.end());
  std::vector<Interval> runs;
  for (const Interval& p : pieces) {
    if (!runs.empty() && runs.back().hi + 1 == p.lo) {
      runs.back().hi = p.hi;
    } else {
      runs.push_back(p);
    }
  }
  return runs;
}

double answer_rectangle(const EstimateVector& xhat, const Box& box, const HilbertMap& map,
                        const GridSpec& spec) {
  require(xhat.size() == map.cell_count(), ErrorCode::kDimensionMismatch,
          "estimate length does not match the grid");
  require(spec.side() == map.side(), ErrorCode::kDimensionMismatch, "grid side does not match curve order");
  const RectangleQuery q = make_rectangle_query(box, spec);
  const std::int64_t side = spec.side();
  const Box& b = spec.bounds;
  const double px_lo = std::max(axis_position(box.xmin, b.xmin, b.xmax, side), 0.0);
  const double px_hi = std::min(axis_position(box.xmax, b.xmin, b.xmax, side), static_cast<double>(side));
  const double py_lo = std::max(axis_position(box.ymin, b.ymin, b.ymax, side), 0.0);
  const double py_hi = std::min(axis_position(box.ymax, b.ymin, b.ymax, side), static_cast<double>(side));
  double total = 0.0;
  for (std::int64_t cy = q.cells.y_lo; cy <= q.cells.y_hi; ++cy) {
    const double fy = std::min<double>(cy + 1, py_hi) - std::max<double>(cy, py_lo);
    for (std::int64_t cx = q.cells.x_lo; cx <= q.cells.x_hi; ++cx) {
      const double fx = std::min<double>(cx + 1, px_hi) - std::max<double>(cx, px_lo);
      total += fx * fy * xhat[map.index(cx, cy) + 1];
    }
  }
  return total;
}

Workload rectangles_to_workload(std::span<const RectangleQuery> rects, const HilbertMap& map) {
  std::vector<Interval> queries;
  for (const RectangleQuery& r : rects) {
    const auto runs = rectangle_to_ranges(r.cells, map);
    queries.insert(queries.end(), runs.begin(), runs.end());
  }
  return Workload(std::move(queries), map.cell_count());
}

std::vector<double> run_spatial(std::span<const Point2> points, std::span<const Box> rects,
                                const SpatialOptions& options, RngStream& rng) {
  options.grid.validate();
  require(!rects.empty(), ErrorCode::kInvalidArgument, "at least one rectangle query is required");
  const HilbertMap map(options.grid.g);
  const DataVector x = linearize(grid_discretize(points, options.grid), map);
  std::vector<RectangleQuery> queries;
  queries.reserve(rects.size());
  for (const Box& b : rects) queries.push_back(make_rectangle_query(b, options.grid));
  const Workload w = rectangles_to_workload(queries, map);
  const EstimateVector xhat = run_dawa(x, w, PrivacyBudget::split(options.epsilon, options.eps1_fraction),
                                       options.mode, options.branching, rng);
  std::vector<double> answers;
  answers.reserve(rects.size());
  for (const Box& b : rects) answers.push_back(answer_rectangle(xhat, b, map, options.grid));
  return answers;
}

}  // namespace dawa
