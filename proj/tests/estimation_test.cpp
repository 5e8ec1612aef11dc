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

#include <chrono>
#include <cmath>
#include <sstream>

#include "dawa/error.hpp"
#include "dawa/estimation.hpp"
#include "dawa/mechanisms.hpp"
#include "oracles.hpp"

namespace dawa {
namespace {

TransformedWorkload identity_what(std::size_t k) {
  std::vector<Interval> q;
  for (std::int64_t j = 1; j <= static_cast<std::int64_t>(k); ++j) q.push_back({j, j});
  return transform_workload(Workload(q, static_cast<std::int64_t>(k)), Partition::unit_buckets(static_cast<std::int64_t>(k)));
}

TransformedWorkload random_what(RngStream& rng, std::int64_t n, std::size_t m) {
  const Partition p = oracle::random_partition(rng, n, 0.5);
  return transform_workload(oracle::random_workload(rng, n, m), p);
}

// Random scalings that keep every leaf positive.
void randomize_scales(QueryTree& tree, RngStream& rng) {
  for (std::size_t i = 0; i < tree.size(); ++i) {
    tree.set_scale(i, tree.is_leaf(i) ? 0.2 + rng.uniform() : (rng.uniform() < 0.3 ? 0.0 : rng.uniform()));
  }
}

TEST(QueryTree, SingleBucket) {
  const QueryTree t = build_query_tree(1, 2);
  EXPECT_EQ(t.size(), 1u);
  EXPECT_EQ(t.root(), 0u);
  EXPECT_TRUE(t.is_leaf(t.root()));
  EXPECT_EQ(t.node(0).depth, 0);
}

TEST(QueryTree, CompleteBinary) {
  const QueryTree t = build_query_tree(4, 2);
  EXPECT_EQ(t.size(), 7u);
  EXPECT_EQ(t.node(t.root()).span, (Interval{1, 4}));
  EXPECT_EQ(t.node(4).span, (Interval{1, 2}));
  EXPECT_EQ(t.node(5).span, (Interval{3, 4}));
  EXPECT_EQ(t.node(0).depth, 2);
}

TEST(QueryTree, RaggedFive) {
  const QueryTree t = build_query_tree(5, 2);
  std::vector<std::size_t> sizes;
  for (const auto& level : t.levels()) sizes.push_back(level.size());
  EXPECT_EQ(sizes, (std::vector<std::size_t>{5, 3, 2, 1}));
  const TreeNode& upper = t.node(t.levels()[2][1]);
  EXPECT_EQ(upper.span, (Interval{5, 5}));
  ASSERT_EQ(upper.children.size(), 1u);
  EXPECT_EQ(t.node(upper.children[0]).span, (Interval{5, 5}));
}

TEST(QueryTree, StructuralInvariants) {
  for (std::size_t k = 1; k <= 40; ++k) {
    for (int branching : {2, 3, 5}) {
      const QueryTree t = build_query_tree(k, branching);
      EXPECT_EQ(t.node(t.root()).span, (Interval{1, static_cast<std::int64_t>(k)}));
      for (std::size_t i = 0; i < t.size(); ++i) {
        const TreeNode& n = t.node(i);
        if (i < k) {
          EXPECT_EQ(n.span, (Interval{static_cast<std::int64_t>(i) + 1, static_cast<std::int64_t>(i) + 1}));
          continue;
        }
        ASSERT_FALSE(n.children.empty());
        EXPECT_LE(n.children.size(), static_cast<std::size_t>(branching));
        EXPECT_EQ(t.node(n.children.front()).span.lo, n.span.lo);
        EXPECT_EQ(t.node(n.children.back()).span.hi, n.span.hi);
        for (std::size_t c = 1; c < n.children.size(); ++c) {
          EXPECT_EQ(t.node(n.children[c - 1]).span.hi + 1, t.node(n.children[c]).span.lo);
        }
        for (std::size_t c : n.children) EXPECT_EQ(t.node(c).depth, n.depth + 1);
      }
    }
  }
  EXPECT_THROW(build_query_tree(0, 2), Error);
  EXPECT_THROW(build_query_tree(4, 1), Error);
}

TEST(QueryTree, CsvDump) {
  QueryTree t = build_query_tree(2, 2);
  t.set_scale(2, 0.5);
  std::ostringstream out;
  t.write_csv(out);
  EXPECT_EQ(out.str(), "lo,hi,depth,c_q\n1,1,1,1\n2,2,1,1\n1,2,0,0.5\n");
}

TEST(StrategyError, IdentityIsTwiceK) {
  QueryTree t = build_query_tree(3, 2);
  t.reset_scales();
  EXPECT_NEAR(strategy_error(identity_what(3), t, 1.0), 6.0, 1e-12);
}

TEST(StrategyError, HomogeneousOfDegreeMinusTwo) {
  RngStream rng(61);
  const TransformedWorkload what = random_what(rng, 30, 20);
  QueryTree t = build_query_tree(what.cols(), 2);
  randomize_scales(t, rng);
  const double base = strategy_error(what, t, 0.7);
  QueryTree scaled = t;
  for (std::size_t i = 0; i < t.size(); ++i) scaled.set_scale(i, 0.25 * t.node(i).scale);
  EXPECT_NEAR(strategy_error(what, scaled, 0.7), 16.0 * base, 1e-9 * 16.0 * base);
}

TEST(StrategyError, MatchesPerQueryOracle) {
  RngStream rng(62);
  for (int trial = 0; trial < 20; ++trial) {
    const Workload w = oracle::random_workload(rng, 8, 10);
    const Partition p = Partition::unit_buckets(8);
    const TransformedWorkload what = transform_workload(w, p);
    QueryTree t = build_query_tree(8, 2);
    randomize_scales(t, rng);
    const double expected = oracle::per_query_error(oracle::transformed_matrix(w, p), t, 1.3);
    EXPECT_NEAR(strategy_error(what, t, 1.3), expected, 1e-9 * expected);
  }
}

TEST(StrategyError, SingularWithoutLeaves) {
  QueryTree t = build_query_tree(4, 2);
  for (std::size_t i = 0; i < t.size(); ++i) t.set_scale(i, t.is_leaf(i) ? 0.0 : 1.0);
  try {
    strategy_error(identity_what(4), t, 1.0);
    FAIL() << "expected an Error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSingular);
  }
}

TEST(ObjectiveAtLambda, ZeroLambdaIsChildrenTrace) {
  const MergeSummary s{3.5, 2.0, 7.0, 4.0};
  EXPECT_EQ(objective_at_lambda(s, 0.0, 1.0), 3.5);
  EXPECT_EQ(objective_at_lambda(s, 0.0, 0.0), 3.5);
  EXPECT_THROW(objective_at_lambda(s, -0.1, 1.0), Error);
  EXPECT_THROW(objective_at_lambda(s, 1.0, 1.0), Error);
}

TEST(ObjectiveAtLambda, FastPathMatchesDenseEvaluation) {
  RngStream rng(63);
  for (int trial = 0; trial < 60; ++trial) {
    const TransformedWorkload what = random_what(rng, rng.uniform_int(2, 64), 12);
    const int branching = static_cast<int>(rng.uniform_int(2, 4));
    QueryTree t = build_query_tree(what.cols(), branching);
    randomize_scales(t, rng);
    // Any internal node with at least two children.
    std::vector<std::size_t> candidates;
    for (std::size_t i = t.bucket_count(); i < t.size(); ++i) {
      if (t.node(i).children.size() >= 2) candidates.push_back(i);
    }
    if (candidates.empty()) continue;
    const std::size_t node = candidates[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(candidates.size()) - 1))];
    std::vector<NodeCache> kids;
    for (std::size_t c : t.node(node).children) kids.push_back(dense_node_cache(what, t, c));
    std::vector<const NodeCache*> ptrs;
    for (const NodeCache& c : kids) ptrs.push_back(&c);
    const MergeSummary summary = summarize_children(ptrs);
    const double mu = decay_weight(branching, t.node(node).depth);
    for (double lambda : {0.0, 0.05, 0.3, 0.5, 0.77, 0.99}) {
      const double fast = objective_at_lambda(summary, lambda, mu);
      const double dense = dense_node_objective(what, t, node, lambda, mu);
      ASSERT_NEAR(fast, dense, 1e-6 * std::max(1.0, std::abs(dense))) << "lambda " << lambda;
    }
  }
}

TEST(DecayWeight, RootIsOneAndDecays) {
  EXPECT_EQ(decay_weight(2, 0), 1.0);
  EXPECT_DOUBLE_EQ(decay_weight(2, 2), 0.5);
  EXPECT_DOUBLE_EQ(decay_weight(4, 1), 0.5);
}

TEST(OptimizeLambda, IdentityWorkloadKeepsZero) {
  const TransformedWorkload what = identity_what(16);
  GreedyTrace trace;
  greedy_scale(what, build_query_tree(16, 2), {}, &trace);
  for (double l : trace.lambda) EXPECT_EQ(l, 0.0);
}

TEST(OptimizeLambda, TotalQueryOnTwoBucketsUsesRoot) {
  const TransformedWorkload what = transform_workload(Workload({{1, 2}}, 2), Partition::unit_buckets(2));
  GreedyTrace trace;
  const QueryTree t = greedy_scale(what, build_query_tree(2, 2), {}, &trace);
  EXPECT_GT(trace.lambda[t.root()], 0.0);
  // Grid scan oracle over the true error.
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 100; ++i) {
    const double l = i / 100.0;
    QueryTree probe = build_query_tree(2, 2);
    probe.set_scales(std::vector<double>{1 - l, 1 - l, l});
    best = std::min(best, strategy_error(what, probe, 1.0));
  }
  EXPECT_LE(strategy_error(what, t, 1.0), best + 1e-6);
}

TEST(OptimizeLambda, BeatsFineGrid) {
  RngStream rng(64);
  for (int trial = 0; trial < 40; ++trial) {
    MergeSummary s;
    s.trace_sum = 0.1 + 10 * rng.uniform();
    s.mass_sum = 0.1 + 5 * rng.uniform();
    s.split_norm_sq = 10 * rng.uniform();
    s.joint_norm_sq = s.split_norm_sq * (1.0 + 3 * rng.uniform());
    const double mu = rng.uniform();
    const double l = optimize_lambda(s, mu);
    ASSERT_GE(l, 0.0);
    ASSERT_LE(l, 1.0 - kLambdaCap);
    const double fl = objective_at_lambda(s, l, mu);
    for (int i = 0; i <= 999; ++i) {
      ASSERT_LE(fl, objective_at_lambda(s, i / 1000.0, mu) + 1e-6);
    }
  }
}

TEST(GoldenSection, FindsParabolaMinimum) {
  const double x = golden_section_minimize([](double v) { return (v - 0.3) * (v - 0.3); }, 0.0, 1.0, 1e-9);
  EXPECT_NEAR(x, 0.3, 1e-8);
}

TEST(GreedyScale, IdentityWorkloadIsFixedPoint) {
  for (std::size_t k = 1; k <= 20; ++k) {
    const QueryTree t = greedy_scale(identity_what(k), build_query_tree(k, 2));
    for (std::size_t i = 0; i < t.size(); ++i) EXPECT_EQ(t.node(i).scale, t.is_leaf(i) ? 1.0 : 0.0);
  }
}

TEST(GreedyScale, SingleBucketKeepsUnitScale) {
  const TransformedWorkload what = transform_workload(Workload({{1, 3}}, 3), Partition::single_bucket(3));
  const QueryTree t = greedy_scale(what, build_query_tree(1, 2));
  EXPECT_EQ(t.scales(), std::vector<double>{1.0});
}

TEST(GreedyScale, ColumnSumsAtMostOne) {
  RngStream rng(65);
  for (int trial = 0; trial < 50; ++trial) {
    const TransformedWorkload what = random_what(rng, rng.uniform_int(1, 120), 30);
    const QueryTree t = greedy_scale(what, build_query_tree(what.cols(), static_cast<int>(rng.uniform_int(2, 4))));
    for (double c : t.column_sums()) ASSERT_LE(c, 1.0 + 1e-9);
    for (std::size_t j = 0; j < t.bucket_count(); ++j) ASSERT_GT(t.node(j).scale, 0.0);
  }
}

TEST(GreedyScale, NoWorseThanLeavesOnlyOnSmallInstances) {
  RngStream rng(66);
  int beats_uniform = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const TransformedWorkload what = random_what(rng, rng.uniform_int(2, 8), 6);
    const QueryTree greedy = greedy_scale(what, build_query_tree(what.cols(), 2));
    QueryTree leaves = build_query_tree(what.cols(), 2);
    leaves.reset_scales();
    QueryTree uniform = leaves;
    apply_uniform_scaling(uniform);
    const double g = strategy_error(what, greedy, 1.0);
    const double l = strategy_error(what, leaves, 1.0);
    const double u = strategy_error(what, uniform, 1.0);
    EXPECT_LE(g, l + 1e-9 * l);
    if (g <= u + 1e-9 * u) ++beats_uniform;
  }
  EXPECT_GE(beats_uniform, 30);
}

TEST(GreedyScale, RootTraceMatchesDenseError) {
  RngStream rng(67);
  for (int trial = 0; trial < 30; ++trial) {
    const TransformedWorkload what = random_what(rng, rng.uniform_int(1, 64), 15);
    GreedyTrace trace;
    const QueryTree t = greedy_scale(what, build_query_tree(what.cols(), 2), {}, &trace);
    const double dense = strategy_error(what, t, std::sqrt(2.0));
    EXPECT_NEAR(trace.root_trace, dense, 1e-6 * std::max(1.0, dense));
  }
}

TEST(GreedyScale, WoodburyInverseMatchesDirectInversion) {
  RngStream rng(68);
  for (int trial = 0; trial < 30; ++trial) {
    const TransformedWorkload what = random_what(rng, rng.uniform_int(1, 64), 15);
    GreedyTrace trace;
    const QueryTree t = greedy_scale(what, build_query_tree(what.cols(), static_cast<int>(rng.uniform_int(2, 3))),
                                     GreedyOptions{true}, &trace);
    ASSERT_TRUE(trace.root_inverse.has_value());
    const Eigen::MatrixXd a = oracle::scaled_strategy(t);
    const Eigen::MatrixXd direct = (a.transpose() * a).inverse();
    const double rel = (*trace.root_inverse - direct).norm() / direct.norm();
    EXPECT_LT(rel, 1e-6);
  }
}

TEST(WoodburyMerge, ZeroLambdaIsBlockDiagonal) {
  const Eigen::MatrixXd a = Eigen::MatrixXd::Identity(2, 2) * 3.0;
  const Eigen::MatrixXd b = Eigen::MatrixXd::Constant(1, 1, 2.0);
  const std::vector<const Eigen::MatrixXd*> parts{&a, &b};
  const Eigen::MatrixXd m = woodbury_merge(parts, 0.0);
  EXPECT_EQ(m(0, 0), 3.0);
  EXPECT_EQ(m(2, 2), 2.0);
  EXPECT_EQ(m(0, 2), 0.0);
}

TEST(Measure, VanishingNoise) {
  QueryTree t = build_query_tree(4, 2);
  t.reset_scales();
  t.set_scale(t.root(), 0.5);
  RngStream rng(69);
  const std::vector<double> counts{5, 8, 3, 10};
  const MeasurementSet y = measure(counts, t, 1e9, rng);
  ASSERT_EQ(y.items.size(), 5u);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(y.items[i].answer, counts[i], 1e-3);
  EXPECT_NEAR(y.items[4].answer, 0.5 * 26, 1e-3);
}

TEST(Measure, SkipsZeroScaleNodesAndIsReproducible) {
  QueryTree t = build_query_tree(4, 2);
  t.reset_scales();
  const std::vector<double> counts{5, 8, 3, 10};
  RngStream a(70);
  RngStream b(70);
  const MeasurementSet ya = measure(counts, t, 1.0, a);
  const MeasurementSet yb = measure(counts, t, 1.0, b);
  ASSERT_EQ(ya.items.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(ya.items[i].answer, yb.items[i].answer);
}

TEST(OlsInfer, LeavesOnlyReturnsMeasurements) {
  QueryTree t = build_query_tree(4, 2);
  t.reset_scales();
  MeasurementSet y;
  for (std::size_t i = 0; i < 4; ++i) y.items.push_back({i, t.node(i).span, 1.0, 1.5 * static_cast<double>(i) - 2.0});
  const auto s = ols_infer(t, y);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_DOUBLE_EQ(s[i], 1.5 * static_cast<double>(i) - 2.0);
}

TEST(OlsInfer, RootAndLeavesMatchDenseSolve) {
  QueryTree t = build_query_tree(4, 2);
  t.set_scales(std::vector<double>{0.6, 0.6, 0.6, 0.6, 0, 0, 0.4});
  RngStream rng(71);
  const std::vector<double> counts{5, 8, 3, 10};
  const MeasurementSet y = measure(counts, t, 0.8, rng);
  Eigen::VectorXd yv(static_cast<Eigen::Index>(y.items.size()));
  for (std::size_t i = 0; i < y.items.size(); ++i) yv(static_cast<Eigen::Index>(i)) = y.items[i].answer;
  const Eigen::VectorXd ref = oracle::dense_ols(t, yv);
  const auto s = ols_infer(t, y);
  for (std::size_t j = 0; j < 4; ++j) EXPECT_NEAR(s[j], ref(static_cast<Eigen::Index>(j)), 1e-9);
}

TEST(OlsInfer, RandomTreesMatchDenseSolve) {
  RngStream rng(72);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t k = static_cast<std::size_t>(rng.uniform_int(1, 50));
    QueryTree t = build_query_tree(k, static_cast<int>(rng.uniform_int(2, 4)));
    randomize_scales(t, rng);
    std::vector<double> counts(k);
    for (double& c : counts) c = 100 * rng.uniform();
    const MeasurementSet y = measure(counts, t, 0.5, rng);
    Eigen::VectorXd yv(static_cast<Eigen::Index>(y.items.size()));
    for (std::size_t i = 0; i < y.items.size(); ++i) yv(static_cast<Eigen::Index>(i)) = y.items[i].answer;
    const Eigen::VectorXd ref = oracle::dense_ols(t, yv);
    const auto s = ols_infer(t, y);
    for (std::size_t j = 0; j < k; ++j) {
      ASSERT_NEAR(s[j], ref(static_cast<Eigen::Index>(j)), 1e-8 * std::max(1.0, std::abs(ref(static_cast<Eigen::Index>(j)))));
    }
  }
}

TEST(OlsInfer, ZeroNoiseRecoversCounts) {
  RngStream rng(73);
  for (int trial = 0; trial < 20; ++trial) {
    const TransformedWorkload what = random_what(rng, 60, 25);
    const QueryTree t = greedy_scale(what, build_query_tree(what.cols(), 2));
    std::vector<double> counts(what.cols());
    for (double& c : counts) c = static_cast<double>(rng.uniform_int(0, 1000));
    const auto s = ols_infer(t, measure(counts, t, 1e12, rng));
    for (std::size_t j = 0; j < counts.size(); ++j) ASSERT_NEAR(s[j], counts[j], 1e-6);
  }
}

TEST(OlsInfer, UnmeasuredLeafIsSingular) {
  QueryTree t = build_query_tree(2, 2);
  t.set_scales(std::vector<double>{1.0, 0.0, 1.0});
  try {
    ols_infer(t, MeasurementSet{});
    FAIL() << "expected an Error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSingular);
  }
}

TEST(EstimateBuckets, HugeBudgetRecoversExampleCounts) {
  RngStream rng(74);
  const Histogram h = estimate_buckets(oracle::example_partition(), Workload({{2, 6}, {1, 10}, {4, 9}}, 10),
                                       DataVector(oracle::kExampleCounts), 1e9, 2, rng);
  const std::vector<double> expected{5, 8, 3, 10};
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(h.stats[i], expected[i], 1e-6);
}

TEST(EstimateBuckets, SingleBucketIsNoisyTotal) {
  RngStream a(75);
  RngStream b(75);
  const DataVector x(oracle::kExampleCounts);
  const Histogram h = estimate_buckets(Partition::single_bucket(10), Workload({{1, 4}}, 10), x, 0.5, 2, a);
  ASSERT_EQ(h.stats.size(), 1u);
  EXPECT_DOUBLE_EQ(h.stats[0], 26.0 + laplace_sample(2.0, b));
}

TEST(EstimateBuckets, Unbiased) {
  const DataVector x(oracle::kExampleCounts);
  const Partition p = oracle::example_partition();
  const Workload w({{2, 6}, {1, 10}, {4, 9}, {3, 3}}, 10);
  const std::vector<double> truth{5, 8, 3, 10};
  std::vector<double> sum(4, 0.0);
  std::vector<double> sq(4, 0.0);
  const int trials = 2000;
  for (int i = 0; i < trials; ++i) {
    RngStream rng(static_cast<std::uint64_t>(5000 + i));
    const Histogram h = estimate_buckets(p, w, x, 1.0, 2, rng);
    for (std::size_t j = 0; j < 4; ++j) {
      sum[j] += h.stats[j];
      sq[j] += h.stats[j] * h.stats[j];
    }
  }
  for (std::size_t j = 0; j < 4; ++j) {
    const double mean = sum[j] / trials;
    const double se = std::sqrt((sq[j] / trials - mean * mean) / trials);
    EXPECT_LE(std::abs(mean - truth[j]), 3 * se);
  }
}

TEST(GreedyScale, RoughlyLinearInBucketCount) {
  RngStream rng(76);
  auto time_for = [&](std::size_t k) {
    const Workload w = oracle::random_workload(rng, static_cast<std::int64_t>(k), 200);
    const TransformedWorkload what = transform_workload(w, Partition::unit_buckets(static_cast<std::int64_t>(k)));
    double best = std::numeric_limits<double>::infinity();
    for (int rep = 0; rep < 3; ++rep) {
      const auto start = std::chrono::steady_clock::now();
      const QueryTree t = greedy_scale(what, build_query_tree(k, 2));
      const auto stop = std::chrono::steady_clock::now();
      EXPECT_GT(t.node(0).scale, 0.0);
      best = std::min(best, std::chrono::duration<double>(stop - start).count());
    }
    return best;
  };
  const double small = time_for(1024);
  const double large = time_for(2048);
  EXPECT_LE(large / small, 4.5);
}

}  // namespace
}  // namespace dawa
