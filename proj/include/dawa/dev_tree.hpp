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

#ifndef DAWA_DEV_TREE_HPP_
#define DAWA_DEV_TREE_HPP_

#include <cstdint>
#include <memory>
#include <utility>
#include <vector>

namespace dawa {

// Height-balanced (AVL) multiset of integer counts. Each node holds one
// distinct value with a multiplicity; every node is augmented with the sum
// and the element count of its subtree so that the one-sided deviation
// sum_{v >= a} (v - a) is answered in O(height).
//
// Sums are kept in int64, so callers must keep (number of elements) * (max
// value) below 2^63.
class DeviationTree {
 public:
  DeviationTree() = default;
  DeviationTree(const DeviationTree&) = delete;
  DeviationTree& operator=(const DeviationTree&) = delete;
  DeviationTree(DeviationTree&&) noexcept = default;
  DeviationTree& operator=(DeviationTree&&) noexcept = default;
  ~DeviationTree();

  void insert(std::int64_t v);
  // Throws Error(kLogic) when v is not present.
  void remove(std::int64_t v);

  std::int64_t size() const;
  std::int64_t sum() const;
  int height() const;
  bool empty() const { return root_ == nullptr; }

  // sum over stored v with v >= a of (v - a).
  double above(double a) const;

  // (count, sum) of stored v with v * den >= num, exactly. den > 0.
  std::pair<std::int64_t, std::int64_t> at_least_ratio(__int128 num, std::int64_t den) const;

  // Sorted contents with duplicates expanded.
  std::vector<std::int64_t> contents() const;

  // Recomputes every augmentation, the AVL balance and the BST order.
  bool check_invariants() const;

 private:
  struct Node {
    std::int64_t value;
    std::int64_t multiplicity = 1;
    std::int64_t subtree_count = 1;
    std::int64_t subtree_sum;
    int height = 1;
    std::unique_ptr<Node> left;
    std::unique_ptr<Node> right;

    explicit Node(std::int64_t v) : value(v), subtree_sum(v) {}
  };
  using Link = std::unique_ptr<Node>;

  static int height_of(const Link& t) { return t ? t->height : 0; }
  static std::int64_t count_of(const Link& t) { return t ? t->subtree_count : 0; }
  static std::int64_t sum_of(const Link& t) { return t ? t->subtree_sum : 0; }
  static void update(Node& t);
  static void rotate_right(Link& t);
  static void rotate_left(Link& t);
  static void rebalance(Link& t);
  static void insert_at(Link& t, std::int64_t v);
  static bool remove_at(Link& t, std::int64_t v);
  static Link detach_min(Link& t);

  Link root_;
};

}  // namespace dawa

#endif  // DAWA_DEV_TREE_HPP_
