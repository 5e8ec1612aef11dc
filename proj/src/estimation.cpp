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

#include "dawa/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dawa {
namespace {

std::vector<std::size_t> subtree_nodes(const QueryTree& tree, std::size_t root) {
  std::vector<std::size_t> out{root};
  for (std::size_t i = 0; i < out.size(); ++i) {
    for (std::size_t c : tree.node(out[i]).children) out.push_back(c);
  }
  return out;
}

double squared_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return s;
}

NodeCache leaf_cache(const TransformedWorkload& what, std::size_t column, double scale,
                     bool materialize) {
  NodeCache cache;
  const double inv = 1.0 / (scale * scale);
  cache.mass = inv;
  cache.image.resize(what.rows());
  double column_norm_sq = 0.0;
  for (std::size_t i = 0; i < what.rows(); ++i) {
    const double w = what(i, column);
    cache.image[i] = w * inv;
    column_norm_sq += w * w;
  }
  cache.trace = column_norm_sq * inv;
  if (materialize) cache.inverse = Eigen::MatrixXd::Constant(1, 1, inv);
  return cache;
}

// Symmetric positive definite inverse; throws kSingular when not invertible.
Eigen::MatrixXd spd_inverse(const Eigen::MatrixXd& g) {
  Eigen::LLT<Eigen::MatrixXd> llt(g);
  if (llt.info() != Eigen::Success) {
    fail(ErrorCode::kSingular, "strategy Gram matrix is singular");
  }
  return llt.solve(Eigen::MatrixXd::Identity(g.rows(), g.cols()));
}

}  // namespace

// ---------------------------------------------------------------------------
// QueryTree

QueryTree::QueryTree(std::size_t k, int branching) : k_(k), branching_(branching) {
  require(k >= 1, ErrorCode::kInvalidArgument, "query tree needs at least one bucket");
  require(branching >= 2, ErrorCode::kInvalidArgument, "branching factor must be at least 2");
  std::vector<std::size_t> level;
  for (std::size_t j = 0; j < k; ++j) {
    const auto pos = static_cast<std::int64_t>(j + 1);
    nodes_.push_back({{pos, pos}, {}, kNoParent, 0, 1.0});
    level.push_back(j);
  }
  levels_.push_back(level);
  const auto t = static_cast<std::size_t>(branching);
  while (level.size() > 1) {
    std::vector<std::size_t> next;
    for (std::size_t first = 0; first < level.size(); first += t) {
      const std::size_t last = std::min(first + t, level.size()) - 1;
      TreeNode parent{{nodes_[level[first]].span.lo, nodes_[level[last]].span.hi}, {}, kNoParent, 0, 0.0};
      const std::size_t id = nodes_.size();
      for (std::size_t c = first; c <= last; ++c) {
        parent.children.push_back(level[c]);
        nodes_[level[c]].parent = id;
      }
      nodes_.push_back(std::move(parent));
      next.push_back(id);
    }
    levels_.push_back(next);
    level = std::move(next);
  }
  const int height = static_cast<int>(levels_.size()) - 1;
  for (std::size_t h = 0; h < levels_.size(); ++h) {
    for (std::size_t id : levels_[h]) nodes_[id].depth = height - static_cast<int>(h);
  }
}

std::vector<double> QueryTree::scales() const {
  std::vector<double> out;
  out.reserve(nodes_.size());
  for (const TreeNode& n : nodes_) out.push_back(n.scale);
  return out;
}

void QueryTree::set_scales(std::span<const double> scales) {
  require(scales.size() == nodes_.size(), ErrorCode::kDimensionMismatch,
          "one scaling per tree node required");
  for (std::size_t i = 0; i < nodes_.size(); ++i) nodes_[i].scale = scales[i];
}

void QueryTree::reset_scales() {
  for (std::size_t i = 0; i < nodes_.size(); ++i) nodes_[i].scale = is_leaf(i) ? 1.0 : 0.0;
}

std::vector<double> QueryTree::column_sums() const {
  // Accumulate root-to-leaf path sums top-down.
  std::vector<double> path(nodes_.size(), 0.0);
  for (std::size_t i = nodes_.size(); i-- > 0;) {
    const TreeNode& n = nodes_[i];
    path[i] = n.scale + (n.parent == kNoParent ? 0.0 : path[n.parent]);
  }
  return std::vector<double>(path.begin(), path.begin() + static_cast<std::ptrdiff_t>(k_));
}

void QueryTree::write_csv(std::ostream& out) const {
  out.precision(17);
  out << "lo,hi,depth,c_q\n";
  for (const TreeNode& n : nodes_) {
    out << n.span.lo << ',' << n.span.hi << ',' << n.depth << ',' << n.scale << '\n';
  }
}

QueryTree build_query_tree(std::size_t k, int branching) { return QueryTree(k, branching); }

// ---------------------------------------------------------------------------
// Greedy scaling

MergeSummary summarize_children(std::span<const NodeCache* const> children) {
  MergeSummary s;
  require(!children.empty(), ErrorCode::kInvalidArgument, "node has no children");
  std::vector<double> joint(children.front()->image.size(), 0.0);
  for (const NodeCache* c : children) {
    s.trace_sum += c->trace;
    s.mass_sum += c->mass;
    s.split_norm_sq += squared_norm(c->image);
    for (std::size_t i = 0; i < joint.size(); ++i) joint[i] += c->image[i];
  }
  s.joint_norm_sq = squared_norm(joint);
  return s;
}

double decay_weight(int branching, int depth) {
  return std::pow(static_cast<double>(branching), -0.5 * depth);
}

double objective_at_lambda(const MergeSummary& children, double lambda, double mu) {
  require(lambda >= 0.0 && lambda <= 1.0 - kLambdaCap, ErrorCode::kInvalidArgument,
          "lambda must lie in [0, 1 - 1e-6]");
  if (lambda == 0.0) return children.trace_sum;
  // Node inverse: (1-l)^-2 [M_c - v v^T / ((1-l)^2/l^2 + m)], v = M_c 1.
  const double keep = 1.0 - lambda;
  const double denom = (keep * keep) / (lambda * lambda) + children.mass_sum;
  const double weighted = mu * children.joint_norm_sq + (1.0 - mu) * children.split_norm_sq;
  return (children.trace_sum - weighted / denom) / (keep * keep);
}

double golden_section_minimize(const std::function<double(double)>& f, double lo, double hi,
                               double tolerance) {
  static const double kInvPhi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo;
  double b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tolerance) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
    }
  }
  return fc <= fd ? c : d;
}

double optimize_lambda(const MergeSummary& children, double mu) {
  constexpr int kGrid = 256;
  const double upper = 1.0 - kLambdaCap;
  auto f = [&](double l) { return objective_at_lambda(children, l, mu); };
  // The objective need not be unimodal: bracket the best grid cell first, then
  // refine inside it by golden section.
  int best_i = 0;
  double best_f = f(0.0);
  for (int i = 1; i <= kGrid; ++i) {
    const double fi = f(upper * i / kGrid);
    if (fi < best_f) {
      best_f = fi;
      best_i = i;
    }
  }
  const double lo = upper * std::max(best_i - 1, 0) / kGrid;
  const double hi = upper * std::min(best_i + 1, kGrid) / kGrid;
  const double refined = golden_section_minimize(f, lo, hi, kLambdaTolerance);
  double best_lambda = upper * best_i / kGrid;
  if (f(refined) < best_f) {
    best_lambda = refined;
    best_f = f(refined);
  }
  // Endpoints win ties so an unhelpful node keeps exactly zero weight.
  if (f(0.0) <= best_f) return 0.0;
  return best_lambda;
}

Eigen::MatrixXd woodbury_merge(std::span<const Eigen::MatrixXd* const> child_inverses, double lambda) {
  Eigen::Index size = 0;
  for (const auto* m : child_inverses) size += m->rows();
  Eigen::MatrixXd merged = Eigen::MatrixXd::Zero(size, size);
  Eigen::Index offset = 0;
  for (const auto* m : child_inverses) {
    merged.block(offset, offset, m->rows(), m->cols()) = *m;
    offset += m->rows();
  }
  if (lambda == 0.0) return merged;
  const double keep = 1.0 - lambda;
  const Eigen::VectorXd v = merged.rowwise().sum();
  const double mass = v.sum();
  const double denom = (keep * keep) / (lambda * lambda) + mass;
  merged -= (v * v.transpose()) / denom;
  merged /= keep * keep;
  return merged;
}

QueryTree greedy_scale(const TransformedWorkload& what, QueryTree tree, const GreedyOptions& options,
                       GreedyTrace* trace) {
  require(what.cols() == tree.bucket_count(), ErrorCode::kDimensionMismatch,
          "transformed workload width must equal the number of buckets");
  tree.reset_scales();
  const std::size_t node_count = tree.size();
  std::vector<double> lambda(node_count, 0.0);
  std::vector<std::optional<NodeCache>> caches(node_count);

  for (std::size_t j = 0; j < tree.bucket_count(); ++j) {
    caches[j] = leaf_cache(what, j, 1.0, options.materialize_inverse);
  }
  const auto& levels = tree.levels();
  for (std::size_t h = 1; h < levels.size(); ++h) {
    for (std::size_t id : levels[h]) {
      const TreeNode& node = tree.node(id);
      if (node.children.size() == 1) {
        // Same interval as the only child: measuring it again adds nothing.
        caches[id] = std::move(caches[node.children.front()]);
        caches[node.children.front()].reset();
        continue;
      }
      std::vector<const NodeCache*> kids;
      for (std::size_t c : node.children) kids.push_back(&*caches[c]);
      const MergeSummary summary = summarize_children(kids);
      const double l = optimize_lambda(summary, decay_weight(tree.branching(), node.depth));
      lambda[id] = l;

      NodeCache merged;
      const double keep = 1.0 - l;
      double factor = 1.0;  // v_q = factor * [v_children]
      merged.trace = summary.trace_sum;
      if (l > 0.0) {
        const double r2 = (l * l) / (keep * keep);
        factor = 1.0 / (keep * keep * (1.0 + r2 * summary.mass_sum));
        const double denom = 1.0 / r2 + summary.mass_sum;
        merged.trace = (summary.trace_sum - summary.joint_norm_sq / denom) / (keep * keep);
      }
      merged.mass = factor * summary.mass_sum;
      merged.image.assign(what.rows(), 0.0);
      for (const NodeCache* c : kids) {
        for (std::size_t i = 0; i < what.rows(); ++i) merged.image[i] += c->image[i];
      }
      for (double& u : merged.image) u *= factor;
      if (options.materialize_inverse) {
        std::vector<const Eigen::MatrixXd*> inverses;
        for (const NodeCache* c : kids) inverses.push_back(&*c->inverse);
        merged.inverse = woodbury_merge(inverses, l);
      }
      for (std::size_t c : node.children) caches[c].reset();
      caches[id] = std::move(merged);
    }
  }

  // Final scalings: own share times (1 - lambda) of every strict ancestor.
  std::vector<double> carry(node_count, 1.0);
  for (std::size_t i = node_count; i-- > 0;) {
    const TreeNode& n = tree.node(i);
    if (n.parent != QueryTree::kNoParent) carry[i] = carry[n.parent] * (1.0 - lambda[n.parent]);
    const double own = tree.is_leaf(i) ? 1.0 : lambda[i];
    tree.set_scale(i, own * carry[i]);
  }

  if (trace != nullptr) {
    trace->lambda = lambda;
    trace->root_trace = caches[tree.root()]->trace;
    trace->root_inverse = caches[tree.root()]->inverse;
  }
  return tree;
}

// ---------------------------------------------------------------------------
// Dense reference paths

Eigen::MatrixXd strategy_matrix(const QueryTree& tree) {
  Eigen::MatrixXd y = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(tree.size()),
                                            static_cast<Eigen::Index>(tree.bucket_count()));
  for (std::size_t i = 0; i < tree.size(); ++i) {
    const Interval& s = tree.node(i).span;
    for (std::int64_t j = s.lo; j <= s.hi; ++j) y(static_cast<Eigen::Index>(i), j - 1) = 1.0;
  }
  return y;
}

Eigen::MatrixXd workload_matrix(const TransformedWorkload& what) {
  Eigen::MatrixXd w(static_cast<Eigen::Index>(what.rows()), static_cast<Eigen::Index>(what.cols()));
  for (std::size_t i = 0; i < what.rows(); ++i) {
    for (std::size_t j = 0; j < what.cols(); ++j) {
      w(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = what(i, j);
    }
  }
  return w;
}

Eigen::MatrixXd subtree_gram(const QueryTree& tree, std::size_t node) {
  const Interval span = tree.node(node).span;
  const auto size = static_cast<Eigen::Index>(span.length());
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(size, size);
  for (std::size_t q : subtree_nodes(tree, node)) {
    const TreeNode& n = tree.node(q);
    const double c2 = n.scale * n.scale;
    const auto a = static_cast<Eigen::Index>(n.span.lo - span.lo);
    const auto len = static_cast<Eigen::Index>(n.span.length());
    g.block(a, a, len, len).array() += c2;
  }
  return g;
}

double strategy_error(const TransformedWorkload& what, const QueryTree& tree, double eps2) {
  require(eps2 > 0, ErrorCode::kInvalidArgument, "eps2 must be positive");
  const Eigen::MatrixXd w = workload_matrix(what);
  const Eigen::MatrixXd inv = spd_inverse(subtree_gram(tree, tree.root()));
  return 2.0 / (eps2 * eps2) * (w.transpose() * w * inv).trace();
}

double dense_node_objective(const TransformedWorkload& what, const QueryTree& tree,
                            std::size_t node, double lambda, double mu) {
  QueryTree local = tree;
  for (std::size_t q : subtree_nodes(tree, node)) {
    local.set_scale(q, q == node ? lambda : (1.0 - lambda) * tree.node(q).scale);
  }
  const Eigen::MatrixXd inv = spd_inverse(subtree_gram(local, node));
  const Interval span = tree.node(node).span;
  const Eigen::MatrixXd wq = workload_matrix(what).middleCols(span.lo - 1, span.length());
  Eigen::MatrixXd blend = mu * (wq.transpose() * wq);
  for (std::size_t c : tree.node(node).children) {
    const Interval cs = tree.node(c).span;
    const auto a = static_cast<Eigen::Index>(cs.lo - span.lo);
    const auto len = static_cast<Eigen::Index>(cs.length());
    const Eigen::MatrixXd wc = wq.middleCols(a, len);
    blend.block(a, a, len, len) += (1.0 - mu) * (wc.transpose() * wc);
  }
  return (blend * inv).trace();
}

NodeCache dense_node_cache(const TransformedWorkload& what, const QueryTree& tree, std::size_t node) {
  const Interval span = tree.node(node).span;
  const Eigen::MatrixXd inv = spd_inverse(subtree_gram(tree, node));
  const Eigen::MatrixXd wq = workload_matrix(what).middleCols(span.lo - 1, span.length());
  const Eigen::VectorXd v = inv.rowwise().sum();
  const Eigen::VectorXd image = wq * v;
  NodeCache cache;
  cache.trace = (wq.transpose() * wq * inv).trace();
  cache.mass = v.sum();
  cache.image.assign(image.data(), image.data() + image.size());
  cache.inverse = inv;
  return cache;
}

// ---------------------------------------------------------------------------
// Measurement and inference

MeasurementSet measure(std::span<const double> bucket_counts, const QueryTree& tree, double eps2,
                       RngStream& rng) {
  require(eps2 > 0 && std::isfinite(eps2), ErrorCode::kInvalidArgument, "eps2 must be positive");
  require(bucket_counts.size() == tree.bucket_count(), ErrorCode::kDimensionMismatch,
          "one count per bucket required");
  std::vector<double> prefix(bucket_counts.size() + 1, 0.0);
  for (std::size_t j = 0; j < bucket_counts.size(); ++j) prefix[j + 1] = prefix[j] + bucket_counts[j];
  MeasurementSet out;
  for (std::size_t i = 0; i < tree.size(); ++i) {
    const TreeNode& n = tree.node(i);
    if (n.scale <= 0.0) continue;
    const double truth = prefix[n.span.hi] - prefix[n.span.lo - 1];
    out.items.push_back({i, n.span, n.scale, n.scale * truth + laplace_sample(1.0 / eps2, rng)});
  }
  return out;
}

std::vector<double> ols_infer(const QueryTree& tree, const MeasurementSet& y) {
  const std::size_t k = tree.bucket_count();
  for (std::size_t j = 0; j < k; ++j) {
    require(tree.node(j).scale > 0.0, ErrorCode::kSingular,
            "least squares needs every leaf measured with positive scaling");
  }
  // Right-hand side (D Y)^T y.
  std::vector<double> rhs(k, 0.0);
  {
    std::vector<double> diff(k + 1, 0.0);
    for (const Measurement& m : y.items) {
      require(m.node < tree.size(), ErrorCode::kInvalidArgument, "measurement refers to unknown node");
      const double contribution = m.scale * m.answer;
      diff[static_cast<std::size_t>(m.span.lo - 1)] += contribution;
      diff[static_cast<std::size_t>(m.span.hi)] -= contribution;
    }
    double running = 0.0;
    for (std::size_t j = 0; j < k; ++j) rhs[j] = (running += diff[j]);
  }

  // Bottom-up: for node q with children inverse M_c (block diagonal) and
  // v_c = M_c 1, the subtree inverse is M_c - c^2 v_c v_c^T / (1 + c^2 1^T v_c).
  // Applying it to rhs needs only v_c per node, so keep v per subtree and the
  // partial solution in place.
  std::vector<double> solution(k);
  std::vector<double> v(k);
  for (std::size_t j = 0; j < k; ++j) {
    const double c = tree.node(j).scale;
    v[j] = 1.0 / (c * c);
    solution[j] = rhs[j] * v[j];
  }
  const auto& levels = tree.levels();
  for (std::size_t h = 1; h < levels.size(); ++h) {
    for (std::size_t id : levels[h]) {
      const TreeNode& n = tree.node(id);
      const double c2 = n.scale * n.scale;
      if (c2 == 0.0) continue;
      const auto lo = static_cast<std::size_t>(n.span.lo - 1);
      const auto hi = static_cast<std::size_t>(n.span.hi);
      double mass = 0.0;
      double projection = 0.0;
      for (std::size_t j = lo; j < hi; ++j) {
        mass += v[j];
        projection += v[j] * rhs[j];
      }
      const double shrink = 1.0 / (1.0 + c2 * mass);
      const double correction = c2 * projection * shrink;
      for (std::size_t j = lo; j < hi; ++j) {
        solution[j] -= correction * v[j];
        v[j] *= shrink;
      }
    }
  }
  return solution;
}

Histogram estimate_buckets(const Partition& buckets, const Workload& w, const DataVector& x,
                           double eps2, int branching, RngStream& rng) {
  const TransformedWorkload what = transform_workload(w, buckets);
  const QueryTree tree = greedy_scale(what, build_query_tree(buckets.size(), branching));
  const MeasurementSet y = measure(bucket_totals(buckets, x), tree, eps2, rng);
  return Histogram(buckets, ols_infer(tree, y));
}

}  // namespace dawa
