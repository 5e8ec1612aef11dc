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

#include "dawa/dev_tree.hpp"

#include <algorithm>
#include <cstdlib>
#include <functional>

#include "dawa/error.hpp"

namespace dawa {

DeviationTree::~DeviationTree() = default;

void DeviationTree::update(Node& t) {
  t.height = 1 + std::max(height_of(t.left), height_of(t.right));
  t.subtree_count = t.multiplicity + count_of(t.left) + count_of(t.right);
  t.subtree_sum = t.multiplicity * t.value + sum_of(t.left) + sum_of(t.right);
}

void DeviationTree::rotate_right(Link& t) {
  Link l = std::move(t->left);
  t->left = std::move(l->right);
  update(*t);
  l->right = std::move(t);
  update(*l);
  t = std::move(l);
}

void DeviationTree::rotate_left(Link& t) {
  Link r = std::move(t->right);
  t->right = std::move(r->left);
  update(*t);
  r->left = std::move(t);
  update(*r);
  t = std::move(r);
}

void DeviationTree::rebalance(Link& t) {
  update(*t);
  const int balance = height_of(t->left) - height_of(t->right);
  if (balance > 1) {
    if (height_of(t->left->left) < height_of(t->left->right)) rotate_left(t->left);
    rotate_right(t);
  } else if (balance < -1) {
    if (height_of(t->right->right) < height_of(t->right->left)) rotate_right(t->right);
    rotate_left(t);
  }
}

void DeviationTree::insert_at(Link& t, std::int64_t v) {
  if (!t) {
    t = std::make_unique<Node>(v);
    return;
  }
  if (v == t->value) {
    ++t->multiplicity;
    update(*t);
    return;
  }
  insert_at(v < t->value ? t->left : t->right, v);
  rebalance(t);
}

DeviationTree::Link DeviationTree::detach_min(Link& t) {
  if (!t->left) {
    Link min = std::move(t);
    t = std::move(min->right);
    return min;
  }
  Link min = detach_min(t->left);
  rebalance(t);
  return min;
}

bool DeviationTree::remove_at(Link& t, std::int64_t v) {
  if (!t) return false;
  if (v != t->value) {
    if (!remove_at(v < t->value ? t->left : t->right, v)) return false;
    rebalance(t);
    return true;
  }
  if (t->multiplicity > 1) {
    --t->multiplicity;
    update(*t);
    return true;
  }
  if (!t->left) {
    t = std::move(t->right);
  } else if (!t->right) {
    t = std::move(t->left);
  } else {
    Link successor = detach_min(t->right);
    successor->left = std::move(t->left);
    successor->right = std::move(t->right);
    t = std::move(successor);
    rebalance(t);
  }
  return true;
}

void DeviationTree::insert(std::int64_t v) { insert_at(root_, v); }

void DeviationTree::remove(std::int64_t v) {
  if (!remove_at(root_, v)) {
    fail(ErrorCode::kLogic, "DeviationTree::remove: value " + std::to_string(v) + " not present");
  }
}

std::int64_t DeviationTree::size() const { return count_of(root_); }
std::int64_t DeviationTree::sum() const { return sum_of(root_); }
int DeviationTree::height() const { return height_of(root_); }

double DeviationTree::above(double a) const {
  // Descend once: at a node >= a the node and its right subtree all count and
  // the left subtree still needs inspecting; otherwise only the right side can.
  double total = 0.0;
  const Node* t = root_.get();
  while (t != nullptr) {
    if (static_cast<double>(t->value) >= a) {
      total += static_cast<double>(t->multiplicity) * (static_cast<double>(t->value) - a);
      total += static_cast<double>(sum_of(t->right)) - static_cast<double>(count_of(t->right)) * a;
      t = t->left.get();
    } else {
      t = t->right.get();
    }
  }
  return total;
}

std::pair<std::int64_t, std::int64_t> DeviationTree::at_least_ratio(__int128 num,
                                                                    std::int64_t den) const {
  std::int64_t count = 0;
  std::int64_t sum = 0;
  const Node* t = root_.get();
  while (t != nullptr) {
    if (static_cast<__int128>(t->value) * den >= num) {
      count += t->multiplicity + count_of(t->right);
      sum += t->multiplicity * t->value + sum_of(t->right);
      t = t->left.get();
    } else {
      t = t->right.get();
    }
  }
  return {count, sum};
}

std::vector<std::int64_t> DeviationTree::contents() const {
  std::vector<std::int64_t> out;
  out.reserve(static_cast<std::size_t>(size()));
  std::function<void(const Node*)> walk = [&](const Node* t) {
    if (!t) return;
    walk(t->left.get());
    out.insert(out.end(), static_cast<std::size_t>(t->multiplicity), t->value);
    walk(t->right.get());
  };
  walk(root_.get());
  return out;
}

bool DeviationTree::check_invariants() const {
  struct Summary {
    bool ok;
    int height;
    std::int64_t count;
    std::int64_t sum;
  };
  std::function<Summary(const Node*, const std::int64_t*, const std::int64_t*)> check =
      [&](const Node* t, const std::int64_t* lo, const std::int64_t* hi) -> Summary {
    if (!t) return {true, 0, 0, 0};
    if ((lo && t->value <= *lo) || (hi && t->value >= *hi) || t->multiplicity < 1) {
      return {false, 0, 0, 0};
    }
    const Summary l = check(t->left.get(), lo, &t->value);
    const Summary r = check(t->right.get(), &t->value, hi);
    const int h = 1 + std::max(l.height, r.height);
    const std::int64_t c = t->multiplicity + l.count + r.count;
    const std::int64_t s = t->multiplicity * t->value + l.sum + r.sum;
    const bool ok = l.ok && r.ok && std::abs(l.height - r.height) <= 1 && h == t->height &&
                    c == t->subtree_count && s == t->subtree_sum;
    return {ok, h, c, s};
  };
  return check(root_.get(), nullptr, nullptr).ok;
}

}  // namespace dawa
