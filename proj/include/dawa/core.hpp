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

#ifndef DAWA_CORE_HPP_
#define DAWA_CORE_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dawa/error.hpp"
#include "dawa/rng.hpp"

// Domain model shared by every stage. All positions visible through this API
// are 1-based and intervals are inclusive on both ends.
namespace dawa {

struct Interval {
  std::int64_t lo = 1;
  std::int64_t hi = 1;

  std::int64_t length() const { return hi - lo + 1; }
  bool contains(std::int64_t j) const { return lo <= j && j <= hi; }
  bool valid_for(std::int64_t n) const { return 1 <= lo && lo <= hi && hi <= n; }

  friend bool operator==(const Interval&, const Interval&) = default;
  friend auto operator<=>(const Interval&, const Interval&) = default;
};

std::string to_string(const Interval& b);

// Vector of nonnegative integral counts x_1..x_n.
class DataVector {
 public:
  explicit DataVector(std::vector<std::int64_t> counts);

  std::int64_t size() const { return static_cast<std::int64_t>(counts_.size()); }
  // 1-based.
  std::int64_t operator[](std::int64_t j) const { return counts_[j - 1]; }
  std::span<const std::int64_t> values() const { return counts_; }
  std::int64_t total() const;

  friend bool operator==(const DataVector&, const DataVector&) = default;

 private:
  std::vector<std::int64_t> counts_;
};

// Real-valued estimate of a DataVector. Never rounded or clamped.
class EstimateVector {
 public:
  EstimateVector() = default;
  explicit EstimateVector(std::vector<double> values);

  std::int64_t size() const { return static_cast<std::int64_t>(values_.size()); }
  double operator[](std::int64_t j) const { return values_[j - 1]; }
  std::span<const double> values() const { return values_; }

  friend bool operator==(const EstimateVector&, const EstimateVector&) = default;

 private:
  std::vector<double> values_;
};

// A batch of range queries over a domain of size n.
class Workload {
 public:
  Workload(std::vector<Interval> queries, std::int64_t n);

  std::int64_t domain_size() const { return n_; }
  std::size_t size() const { return queries_.size(); }
  const Interval& operator[](std::size_t i) const { return queries_[i]; }
  const std::vector<Interval>& queries() const { return queries_; }

  auto begin() const { return queries_.begin(); }
  auto end() const { return queries_.end(); }

 private:
  std::vector<Interval> queries_;
  std::int64_t n_;
};

// Sorted, adjacent, disjoint buckets covering [1, n].
class Partition {
 public:
  // Throws kInvalidPartition unless validate_partition(buckets, n) holds.
  Partition(std::vector<Interval> buckets, std::int64_t n);

  static Partition single_bucket(std::int64_t n);
  static Partition unit_buckets(std::int64_t n);

  std::int64_t domain_size() const { return n_; }
  std::size_t size() const { return buckets_.size(); }
  const Interval& operator[](std::size_t i) const { return buckets_[i]; }
  const std::vector<Interval>& buckets() const { return buckets_; }

  // 0-based index of the bucket containing position j, by binary search.
  std::size_t bucket_of(std::int64_t j) const;

  auto begin() const { return buckets_.begin(); }
  auto end() const { return buckets_.end(); }

  friend bool operator==(const Partition&, const Partition&) = default;

 private:
  std::vector<Interval> buckets_;
  std::int64_t n_;
};

struct Histogram {
  Partition partition;
  std::vector<double> stats;

  Histogram(Partition p, std::vector<double> s);
};

struct PrivacyBudget {
  double epsilon;
  double eps1;
  double eps2;

  // eps1 = fraction * epsilon, eps2 = epsilon - eps1.
  static PrivacyBudget split(double epsilon, double eps1_fraction = 0.25);
  // Checks positivity and eps1 + eps2 == epsilon to 1e-12.
  void validate() const;
};

bool validate_partition(std::span<const Interval> buckets, std::int64_t n);

double evaluate_query(const Interval& q, const DataVector& x);
double evaluate_query(const Interval& q, const EstimateVector& x);

// W(x) for every query, using prefix sums.
std::vector<double> evaluate_workload(const Workload& w, const DataVector& x);
std::vector<double> evaluate_workload(const Workload& w, const EstimateVector& x);

EstimateVector uniform_expand(const Histogram& h, std::int64_t n);

// (1/m) * sum_i |w_i(x) - w_i(xhat)|
double average_workload_error(const Workload& w, const DataVector& x,
                              const EstimateVector& xhat);

// True bucket totals b_i(x).
std::vector<double> bucket_totals(const Partition& p, const DataVector& x);

}  // namespace dawa

#endif  // DAWA_CORE_HPP_
