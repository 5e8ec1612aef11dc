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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <set>

#include "dawa/error.hpp"
#include "dawa/spatial.hpp"
#include "oracles.hpp"

namespace dawa {
namespace {

// Area-weighted sum over every cell, computed cell by cell.
double integrate_cells(const EstimateVector& xhat, const Box& box, const HilbertMap& map,
                       const GridSpec& spec) {
  const double side = static_cast<double>(map.side());
  const double w = (spec.bounds.xmax - spec.bounds.xmin) / side;
  const double h = (spec.bounds.ymax - spec.bounds.ymin) / side;
  double total = 0.0;
  for (std::int64_t cy = 0; cy < map.side(); ++cy) {
    for (std::int64_t cx = 0; cx < map.side(); ++cx) {
      const double x0 = spec.bounds.xmin + static_cast<double>(cx) * w;
      const double y0 = spec.bounds.ymin + static_cast<double>(cy) * h;
      const double ox = std::max(0.0, std::min(box.xmax, x0 + w) - std::max(box.xmin, x0));
      const double oy = std::max(0.0, std::min(box.ymax, y0 + h) - std::max(box.ymin, y0));
      total += ox * oy / (w * h) * xhat[map.index(cx, cy) + 1];
    }
  }
  return total;
}

Box random_box(RngStream& rng, const Box& bounds) {
  double a = bounds.xmin + (bounds.xmax - bounds.xmin) * rng.uniform();
  double b = bounds.xmin + (bounds.xmax - bounds.xmin) * rng.uniform();
  double c = bounds.ymin + (bounds.ymax - bounds.ymin) * rng.uniform();
  double d = bounds.ymin + (bounds.ymax - bounds.ymin) * rng.uniform();
  if (a > b) std::swap(a, b);
  if (c > d) std::swap(c, d);
  return {a, b + 1e-6, c, d + 1e-6};
}

TEST(HilbertMap, BijectionAndAdjacency) {
  for (int g = 1; g <= 6; ++g) {
    const HilbertMap map(g);
    std::set<std::pair<std::int64_t, std::int64_t>> seen;
    std::pair<std::int64_t, std::int64_t> prev{-1, -1};
    for (std::int64_t d = 0; d < map.cell_count(); ++d) {
      const auto c = map.cell(d);
      ASSERT_EQ(map.index(c.first, c.second), d);
      ASSERT_TRUE(seen.insert(c).second);
      if (d > 0) ASSERT_EQ(std::abs(c.first - prev.first) + std::abs(c.second - prev.second), 1);
      prev = c;
    }
    EXPECT_EQ(static_cast<std::int64_t>(seen.size()), map.cell_count());
    EXPECT_EQ(map.cell(0), std::make_pair(std::int64_t{0}, std::int64_t{0}));
  }
  EXPECT_THROW(HilbertMap(0), Error);
}

TEST(HilbertMap, OrderOneLayout) {
  const HilbertMap map(1);
  EXPECT_EQ(map.index(0, 0), 0);
  EXPECT_EQ(map.index(0, 1), 1);
  EXPECT_EQ(map.index(1, 1), 2);
  EXPECT_EQ(map.index(1, 0), 3);
}

TEST(AxisCell, BoundariesGoToLowerCell) {
  EXPECT_EQ(axis_cell(0.0, 0.0, 1.0, 4), 0);
  EXPECT_EQ(axis_cell(0.25, 0.0, 1.0, 4), 0);
  EXPECT_EQ(axis_cell(0.2500001, 0.0, 1.0, 4), 1);
  EXPECT_EQ(axis_cell(0.5, 0.0, 1.0, 4), 1);
  EXPECT_EQ(axis_cell(1.0, 0.0, 1.0, 4), 3);
  EXPECT_EQ(axis_cell(-3.0, 0.0, 1.0, 4), 0);
  EXPECT_EQ(axis_cell(7.0, 0.0, 1.0, 4), 3);
}

TEST(GridDiscretize, SingleCellAndMassConservation) {
  GridSpec spec;
  spec.g = 0;
  const std::vector<Point2> pts{{0.1, 0.2}, {0.9, 0.9}, {0.5, 0.5}};
  EXPECT_THROW(grid_discretize(pts, spec), Error);

  spec.g = 1;
  const Grid2D two = grid_discretize(pts, spec);
  EXPECT_EQ(two.at(0, 0), 2);  // (0.5, 0.5) sits on the corner
  EXPECT_EQ(two.at(1, 1), 1);

  RngStream rng(101);
  std::vector<Point2> many(5000);
  for (Point2& p : many) p = {rng.uniform(), rng.uniform()};
  spec.g = 5;
  const Grid2D grid = grid_discretize(many, spec);
  EXPECT_EQ(grid.total(), 5000);
  const DataVector x = linearize(grid, HilbertMap(5));
  EXPECT_EQ(x.size(), 1024);
  EXPECT_EQ(x.total(), 5000);
}

TEST(Linearize, UniformAndDeltaGrids) {
  const HilbertMap map(3);
  Grid2D uniform{8, std::vector<std::int64_t>(64, 5)};
  const DataVector x = linearize(uniform, map);
  for (std::int64_t j = 1; j <= 64; ++j) EXPECT_EQ(x[j], 5);

  Grid2D delta{8, std::vector<std::int64_t>(64, 0)};
  delta.counts[6 * 8 + 3] = 1;
  const DataVector y = linearize(delta, map);
  const std::int64_t pos = map.index(3, 6) + 1;
  for (std::int64_t j = 1; j <= 64; ++j) EXPECT_EQ(y[j], j == pos ? 1 : 0);

  EXPECT_THROW(linearize(delta, HilbertMap(2)), Error);
}

TEST(RectangleRanges, FullGridAndSingleCell) {
  const HilbertMap map(4);
  const auto full = rectangle_to_ranges({0, 15, 0, 15}, map);
  ASSERT_EQ(full.size(), 1u);
  EXPECT_EQ(full[0], (Interval{1, 256}));
  const auto one = rectangle_to_ranges({5, 5, 9, 9}, map);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one[0].lo, map.index(5, 9) + 1);
  EXPECT_EQ(one[0].hi, one[0].lo);
}

TEST(RectangleRanges, MatchBruteForce) {
  RngStream rng(102);
  for (int trial = 0; trial < 300; ++trial) {
    const int g = static_cast<int>(rng.uniform_int(1, 6));
    const HilbertMap map(g);
    std::int64_t x0 = rng.uniform_int(0, map.side() - 1);
    std::int64_t x1 = rng.uniform_int(0, map.side() - 1);
    std::int64_t y0 = rng.uniform_int(0, map.side() - 1);
    std::int64_t y1 = rng.uniform_int(0, map.side() - 1);
    const CellRect r{std::min(x0, x1), std::max(x0, x1), std::min(y0, y1), std::max(y0, y1)};
    const auto runs = rectangle_to_ranges(r, map);
    ASSERT_EQ(runs, oracle::brute_ranges(r, map));
    std::int64_t covered = 0;
    for (const Interval& iv : runs) covered += iv.length();
    ASSERT_EQ(covered, r.area());
  }
}

TEST(MakeRectangleQuery, TouchedCells) {
  GridSpec spec;
  spec.g = 2;
  const RectangleQuery q = make_rectangle_query({0.25, 0.5, 0.1, 0.9}, spec);
  EXPECT_EQ(q.cells.x_lo, 1);
  EXPECT_EQ(q.cells.x_hi, 1);
  EXPECT_EQ(q.cells.y_lo, 0);
  EXPECT_EQ(q.cells.y_hi, 3);
  EXPECT_THROW(make_rectangle_query({0.5, 0.4, 0.0, 1.0}, spec), Error);
}

TEST(AnswerRectangle, AlignedAndHalfCells) {
  GridSpec spec;
  spec.g = 2;
  const HilbertMap map(2);
  std::vector<double> v(16);
  for (std::size_t i = 0; i < 16; ++i) v[i] = static_cast<double>(i * i) + 0.5;
  const EstimateVector xhat(v);

  // Aligned: exact sum over the covered cells.
  double expected = 0.0;
  for (std::int64_t cy = 1; cy <= 2; ++cy) {
    for (std::int64_t cx = 0; cx <= 2; ++cx) expected += xhat[map.index(cx, cy) + 1];
  }
  EXPECT_NEAR(answer_rectangle(xhat, {0.0, 0.75, 0.25, 0.75}, map, spec), expected, 1e-9);

  // Half of one cell.
  const double cell = xhat[map.index(2, 3) + 1];
  EXPECT_NEAR(answer_rectangle(xhat, {0.5, 0.625, 0.75, 1.0}, map, spec), 0.5 * cell, 1e-9);
}

TEST(AnswerRectangle, MatchesCellIntegration) {
  RngStream rng(103);
  for (int trial = 0; trial < 200; ++trial) {
    GridSpec spec;
    spec.g = static_cast<int>(rng.uniform_int(1, 5));
    spec.bounds = {-2.0, 3.0, 10.0, 12.0};
    const HilbertMap map(spec.g);
    std::vector<double> v(static_cast<std::size_t>(map.cell_count()));
    for (double& e : v) e = 100.0 * rng.uniform() - 20.0;
    const EstimateVector xhat(v);
    const Box box = random_box(rng, spec.bounds);
    ASSERT_NEAR(answer_rectangle(xhat, box, map, spec), integrate_cells(xhat, box, map, spec), 1e-9);
  }
}

TEST(RectanglesToWorkload, RangesSumToCellSums) {
  GridSpec spec;
  spec.g = 4;
  const HilbertMap map(4);
  RngStream rng(104);
  std::vector<RectangleQuery> rects;
  for (int i = 0; i < 20; ++i) rects.push_back(make_rectangle_query(random_box(rng, spec.bounds), spec));
  const Workload w = rectangles_to_workload(rects, map);
  std::vector<std::int64_t> raw(256);
  for (auto& c : raw) c = rng.uniform_int(0, 9);
  const Grid2D grid{16, raw};
  const DataVector x = linearize(grid, map);

  // Each rectangle's cell sum is the sum of its own runs.
  std::size_t next = 0;
  for (const RectangleQuery& q : rects) {
    std::int64_t cells = 0;
    for (std::int64_t cy = q.cells.y_lo; cy <= q.cells.y_hi; ++cy) {
      for (std::int64_t cx = q.cells.x_lo; cx <= q.cells.x_hi; ++cx) cells += grid.at(cx, cy);
    }
    std::int64_t runs = 0;
    for (const Interval& iv : rectangle_to_ranges(q.cells, map)) {
      ASSERT_LT(next, w.size());
      ASSERT_EQ(w[next++], iv);
      for (std::int64_t j = iv.lo; j <= iv.hi; ++j) runs += x[j];
    }
    EXPECT_EQ(runs, cells);
  }
  EXPECT_EQ(next, w.size());
}

TEST(RunSpatial, HugeBudgetAnswersAlignedRectanglesExactly) {
  RngStream data(105);
  std::vector<Point2> pts(2000);
  for (Point2& p : pts) p = {0.999 * data.uniform(), 0.999 * data.uniform()};
  SpatialOptions opt;
  opt.grid.g = 3;
  opt.epsilon = 1e9;
  const std::vector<Box> rects{{0.0, 0.5, 0.0, 0.5}, {0.0, 1.0, 0.0, 1.0}, {0.125, 0.375, 0.625, 1.0}};
  RngStream rng(106);
  const auto answers = run_spatial(pts, rects, opt, rng);
  ASSERT_EQ(answers.size(), 3u);
  // Cells are half-open at the top except on the upper edge, so count that way.
  for (std::size_t i = 0; i < rects.size(); ++i) {
    const Box& b = rects[i];
    int count = 0;
    for (const Point2& p : pts) {
      const bool in_x = (p.x > b.xmin || b.xmin == 0.0) && p.x <= b.xmax;
      const bool in_y = (p.y > b.ymin || b.ymin == 0.0) && p.y <= b.ymax;
      count += in_x && in_y ? 1 : 0;
    }
    EXPECT_NEAR(answers[i], count, 0.05) << i;
  }
}

TEST(RunSpatial, Deterministic) {
  std::vector<Point2> pts{{0.1, 0.1}, {0.7, 0.2}, {0.3, 0.9}};
  const std::vector<Box> rects{{0.0, 0.6, 0.0, 0.6}};
  SpatialOptions opt;
  opt.grid.g = 2;
  RngStream a(107);
  RngStream b(107);
  EXPECT_EQ(run_spatial(pts, rects, opt, a), run_spatial(pts, rects, opt, b));
}

}  // namespace
}  // namespace dawa
