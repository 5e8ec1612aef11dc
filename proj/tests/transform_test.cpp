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

#include <cmath>
#include <sstream>

#include "dawa/error.hpp"
#include "dawa/transform.hpp"
#include "oracles.hpp"

namespace dawa {
namespace {

TEST(TransformQuery, ExampleQuery) {
  const auto q = transform_query({2, 6}, oracle::example_partition());
  EXPECT_EQ(q, (std::vector<double>{0.5, 1.0, 0.75, 0.0}));
}

TEST(TransformQuery, BucketQueryIsUnitVector) {
  const Partition p = oracle::example_partition();
  for (std::size_t j = 0; j < p.size(); ++j) {
    const auto q = transform_query(p[j], p);
    for (std::size_t i = 0; i < p.size(); ++i) EXPECT_EQ(q[i], i == j ? 1.0 : 0.0);
  }
}

TEST(TransformQuery, MatchesPositionOracle) {
  RngStream rng(51);
  for (int trial = 0; trial < 100; ++trial) {
    const Partition p = oracle::random_partition(rng, 32);
    const Workload w = oracle::random_workload(rng, 32, 1);
    const auto q = transform_query(w[0], p);
    const Eigen::MatrixXd ref = oracle::transformed_matrix(w, p);
    for (std::size_t j = 0; j < p.size(); ++j) EXPECT_NEAR(q[j], ref(0, static_cast<Eigen::Index>(j)), 1e-15);
  }
}

TEST(TransformQuery, DomainMismatch) {
  EXPECT_THROW(transform_query({1, 12}, oracle::example_partition()), Error);
  EXPECT_THROW(transform_workload(Workload({{1, 2}}, 11), oracle::example_partition()), Error);
}

TEST(TransformWorkload, IdentityOnUnitBuckets) {
  std::vector<Interval> unit;
  for (std::int64_t j = 1; j <= 6; ++j) unit.push_back({j, j});
  const TransformedWorkload what = transform_workload(Workload(unit, 6), Partition::unit_buckets(6));
  ASSERT_EQ(what.rows(), 6u);
  ASSERT_EQ(what.cols(), 6u);
  for (std::size_t i = 0; i < 6; ++i) {
    for (std::size_t j = 0; j < 6; ++j) EXPECT_EQ(what(i, j), i == j ? 1.0 : 0.0);
  }
}

TEST(TransformWorkload, FullRangeRowIsAllOnes) {
  RngStream rng(52);
  const Partition p = oracle::random_partition(rng, 40);
  const TransformedWorkload what = transform_workload(Workload({{1, 40}}, 40), p);
  for (double v : what.row(0)) EXPECT_EQ(v, 1.0);
}

TEST(TransformWorkload, UnitBucketsGiveIncidenceMatrix) {
  RngStream rng(53);
  const Workload w = oracle::random_workload(rng, 20, 30);
  const TransformedWorkload what = transform_workload(w, Partition::unit_buckets(20));
  for (std::size_t i = 0; i < w.size(); ++i) {
    for (std::size_t j = 0; j < 20; ++j) {
      EXPECT_EQ(what(i, j), w[i].contains(static_cast<std::int64_t>(j) + 1) ? 1.0 : 0.0);
    }
  }
}

TEST(TransformWorkload, EquivalenceWithExpandedEvaluation) {
  RngStream rng(54);
  for (int trial = 0; trial < 200; ++trial) {
    const std::int64_t n = rng.uniform_int(1, 64);
    const Partition p = oracle::random_partition(rng, n, rng.uniform());
    const Workload w = oracle::random_workload(rng, n, static_cast<std::size_t>(rng.uniform_int(1, 20)));
    std::vector<double> s(p.size());
    for (double& v : s) v = 200.0 * rng.uniform() - 50.0;
    const TransformedWorkload what = transform_workload(w, p);
    const auto fast = what.apply(s);
    const auto slow = evaluate_workload(w, uniform_expand(Histogram(p, s), n));
    for (std::size_t i = 0; i < w.size(); ++i) ASSERT_NEAR(fast[i], slow[i], 1e-9);
  }
}

TEST(TransformWorkload, SupportIsContiguousAndTight) {
  RngStream rng(55);
  for (int trial = 0; trial < 50; ++trial) {
    const Partition p = oracle::random_partition(rng, 50);
    const Workload w = oracle::random_workload(rng, 50, 10);
    const TransformedWorkload what = transform_workload(w, p);
    for (std::size_t i = 0; i < what.rows(); ++i) {
      const auto [first, last] = what.support(i);
      for (std::size_t j = 0; j < what.cols(); ++j) {
        const bool inside = first <= j && j <= last;
        EXPECT_EQ(what(i, j) > 0.0, inside);
        EXPECT_GE(what(i, j), 0.0);
        EXPECT_LE(what(i, j), 1.0);
      }
    }
  }
}

TEST(TransformWorkload, CsvDump) {
  const TransformedWorkload what = transform_workload(Workload({{2, 6}}, 10), oracle::example_partition());
  std::ostringstream out;
  what.write_csv(out);
  EXPECT_EQ(out.str(), "0.5,1,0.75,0\n");
}

}  // namespace
}  // namespace dawa
