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

#ifndef DAWA_ESTIMATION_HPP_
#define DAWA_ESTIMATION_HPP_

#include <cstddef>
#include <functional>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "dawa/core.hpp"
#include "dawa/rng.hpp"
#include "dawa/transform.hpp"

// Stage 2: hierarchical measurement strategy over bucket statistics, greedy
// budget scaling, noisy measurement and least-squares inference.
namespace dawa {

// Upper end of the per-node reallocation search is 1 - kLambdaCap. At 1 the
// descendants lose all weight and the Gram matrix becomes singular.
inline constexpr double kLambdaCap = 1e-6;
inline constexpr double kLambdaTolerance = 1e-6;

struct TreeNode {
  Interval span;  // over bucket indices 1..k
  std::vector<std::size_t> children;
  std::size_t parent;
  int depth = 0;  // root is 0
  double scale = 0.0;
};

// Template strategy: leaves are the unit intervals [1,1]..[k,k] (nodes 0..k-1
// in order); each higher level groups up to t consecutive nodes of the level
// below until one node remains.
class QueryTree {
 public:
  static constexpr std::size_t kNoParent = static_cast<std::size_t>(-1);

  QueryTree(std::size_t k, int branching);

  std::size_t bucket_count() const { return k_; }
  int branching() const { return branching_; }
  std::size_t size() const { return nodes_.size(); }
  std::size_t root() const { return nodes_.size() - 1; }
  const TreeNode& node(std::size_t i) const { return nodes_[i]; }
  const std::vector<TreeNode>& nodes() const { return nodes_; }
  bool is_leaf(std::size_t i) const { return i < k_; }
  // Node indices per level, leaves first.
  const std::vector<std::vector<std::size_t>>& levels() const { return levels_; }

  void set_scale(std::size_t i, double c) { nodes_[i].scale = c; }
  std::vector<double> scales() const;
  void set_scales(std::span<const double> scales);

  // Leaves 1, everything else 0.
  void reset_scales();

  // For every bucket position, the total scaling of the nodes covering it.
  std::vector<double> column_sums() const;

  // CSV "lo,hi,depth,c_q", one row per node, leaves first.
  void write_csv(std::ostream& out) const;

 private:
  std::size_t k_;
  int branching_;
  std::vector<TreeNode> nodes_;
  std::vector<std::vector<std::size_t>> levels_;
};

QueryTree build_query_tree(std::size_t k, int branching);

// Everything the greedy pass keeps about a processed subtree q with its
// current scalings. M_q is the inverse Gram (Y_q^T D_q^2 Y_q)^-1.
struct NodeCache {
  double trace = 0.0;               // tr(What_q^T What_q M_q)
  double mass = 0.0;                // 1^T M_q 1
  std::vector<double> image;        // What_q M_q 1, one entry per workload query
  std::optional<Eigen::MatrixXd> inverse;  // M_q, only when materialized
};

// Child statistics that make the reallocation objective O(1) per lambda.
struct MergeSummary {
  double trace_sum = 0.0;       // sum of children traces
  double mass_sum = 0.0;        // sum of children masses
  double joint_norm_sq = 0.0;   // ||sum of children images||^2
  double split_norm_sq = 0.0;   // sum of ||child image||^2
};

MergeSummary summarize_children(std::span<const NodeCache* const> children);

// Decay weight for a node at the given depth: t^(-depth/2).
double decay_weight(int branching, int depth);

// Reallocation objective of a node when it takes share lambda and its
// descendants keep (1 - lambda) of their current scalings, with the workload
// Gram blended between the full node block (weight mu) and the block-diagonal
// of its children (weight 1 - mu). Closed form via the Woodbury identity.
double objective_at_lambda(const MergeSummary& children, double lambda, double mu);

// argmin of objective_at_lambda on [0, 1 - kLambdaCap].
double optimize_lambda(const MergeSummary& children, double mu);

// Minimizes f on [lo, hi] by golden-section search to the given tolerance.
double golden_section_minimize(const std::function<double(double)>& f, double lo, double hi,
                               double tolerance);

struct GreedyOptions {
  // Carry dense inverse Gram matrices through the pass (Woodbury updates).
  // O(k^2) memory; for verification.
  bool materialize_inverse = false;
};

struct GreedyTrace {
  std::vector<double> lambda;  // chosen share per node (leaves 0)
  std::optional<Eigen::MatrixXd> root_inverse;
  double root_trace = 0.0;
};

// Bottom-up greedy scaling. The returned tree satisfies column_sums() <= 1.
QueryTree greedy_scale(const TransformedWorkload& what, QueryTree tree,
                       const GreedyOptions& options = {}, GreedyTrace* trace = nullptr);

// Inverse Gram of a node with share lambda given its children's inverse Grams.
Eigen::MatrixXd woodbury_merge(std::span<const Eigen::MatrixXd* const> child_inverses, double lambda);

// Dense reference implementations.
Eigen::MatrixXd strategy_matrix(const QueryTree& tree);
Eigen::MatrixXd workload_matrix(const TransformedWorkload& what);
// Y^T D^2 Y restricted to the subtree of node and its span.
Eigen::MatrixXd subtree_gram(const QueryTree& tree, std::size_t node);
// (2 / eps2^2) tr(What^T What (Y^T D^2 Y)^-1). Throws kSingular.
double strategy_error(const TransformedWorkload& what, const QueryTree& tree, double eps2);
// Reallocation objective evaluated on explicit matrices.
double dense_node_objective(const TransformedWorkload& what, const QueryTree& tree,
                            std::size_t node, double lambda, double mu);
// Cache of a processed subtree computed from its explicit Gram matrix.
NodeCache dense_node_cache(const TransformedWorkload& what, const QueryTree& tree, std::size_t node);

struct Measurement {
  std::size_t node;
  Interval span;
  double scale;
  double answer;
};

struct MeasurementSet {
  std::vector<Measurement> items;
};

// One noisy answer c_q * q(s) + Laplace(1/eps2) per node with c_q > 0.
MeasurementSet measure(std::span<const double> bucket_counts, const QueryTree& tree, double eps2,
                       RngStream& rng);

// Ordinary least squares over the measured nodes, exploiting the hierarchy.
// Requires every leaf scaling to be positive (kSingular otherwise).
std::vector<double> ols_infer(const QueryTree& tree, const MeasurementSet& y);

Histogram estimate_buckets(const Partition& buckets, const Workload& w, const DataVector& x,
                           double eps2, int branching, RngStream& rng);

}  // namespace dawa

#endif  // DAWA_ESTIMATION_HPP_
