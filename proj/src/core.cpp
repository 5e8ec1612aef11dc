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

#include "dawa/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace dawa {
namespace {

template <typename T>
std::vector<double> prefix_sums(std::span<const T> values) {
  std::vector<double> prefix(values.size() + 1, 0.0);
  for (std::size_t i = 0; i < values.size(); ++i) {
    prefix[i + 1] = prefix[i] + static_cast<double>(values[i]);
  }
  return prefix;
}

void check_query(const Interval& q, std::int64_t n) {
  require(q.valid_for(n), ErrorCode::kInvalidInterval,
          "query " + to_string(q) + " is outside [1," + std::to_string(n) + "]");
}

template <typename Vec>
double evaluate_query_impl(const Interval& q, const Vec& x) {
  check_query(q, x.size());
  double total = 0.0;
  for (std::int64_t j = q.lo; j <= q.hi; ++j) total += static_cast<double>(x[j]);
  return total;
}

template <typename Vec>
std::vector<double> evaluate_workload_impl(const Workload& w, const Vec& x) {
  require(w.domain_size() == x.size(), ErrorCode::kDimensionMismatch,
          "workload domain " + std::to_string(w.domain_size()) +
              " does not match vector length " + std::to_string(x.size()));
  const auto prefix = prefix_sums(x.values());
  std::vector<double> answers;
  answers.reserve(w.size());
  for (const Interval& q : w) answers.push_back(prefix[q.hi] - prefix[q.lo - 1]);
  return answers;
}

}  // namespace

std::string to_string(const Interval& b) {
  return "[" + std::to_string(b.lo) + "," + std::to_string(b.hi) + "]";
}

DataVector::DataVector(std::vector<std::int64_t> counts) : counts_(std::move(counts)) {
  require(!counts_.empty(), ErrorCode::kInvalidArgument, "data vector must be non-empty");
  for (std::size_t i = 0; i < counts_.size(); ++i) {
    require(counts_[i] >= 0, ErrorCode::kInvalidArgument,
            "count at position " + std::to_string(i + 1) + " is negative");
  }
}

std::int64_t DataVector::total() const {
  return std::accumulate(counts_.begin(), counts_.end(), std::int64_t{0});
}

EstimateVector::EstimateVector(std::vector<double> values) : values_(std::move(values)) {}

Workload::Workload(std::vector<Interval> queries, std::int64_t n)
    : queries_(std::move(queries)), n_(n) {
  require(n_ >= 1, ErrorCode::kInvalidArgument, "domain size must be positive");
  require(!queries_.empty(), ErrorCode::kInvalidArgument, "workload must be non-empty");
  for (const Interval& q : queries_) check_query(q, n_);
}

bool validate_partition(std::span<const Interval> buckets, std::int64_t n) {
  if (n < 1 || buckets.empty()) return false;
  std::int64_t next = 1;
  for (const Interval& b : buckets) {
    if (b.lo != next || b.hi < b.lo) return false;
    next = b.hi + 1;
  }
  return next == n + 1;
}

Partition::Partition(std::vector<Interval> buckets, std::int64_t n)
    : buckets_(std::move(buckets)), n_(n) {
  require(validate_partition(buckets_, n_), ErrorCode::kInvalidPartition,
          "buckets do not form a partition of [1," + std::to_string(n) + "]");
}

Partition Partition::single_bucket(std::int64_t n) { return Partition({{1, n}}, n); }

Partition Partition::unit_buckets(std::int64_t n) {
  std::vector<Interval> buckets;
  buckets.reserve(static_cast<std::size_t>(n));
  for (std::int64_t j = 1; j <= n; ++j) buckets.push_back({j, j});
  return Partition(std::move(buckets), n);
}

std::size_t Partition::bucket_of(std::int64_t j) const {
  require(1 <= j && j <= n_, ErrorCode::kInvalidInterval,
          "position " + std::to_string(j) + " outside domain");
  auto it = std::upper_bound(buckets_.begin(), buckets_.end(), j,
                             [](std::int64_t pos, const Interval& b) { return pos < b.lo; });
  return static_cast<std::size_t>(std::distance(buckets_.begin(), it) - 1);
}

Histogram::Histogram(Partition p, std::vector<double> s)
    : partition(std::move(p)), stats(std::move(s)) {
  require(stats.size() == partition.size(), ErrorCode::kDimensionMismatch,
          "histogram needs one statistic per bucket");
}

PrivacyBudget PrivacyBudget::split(double epsilon, double eps1_fraction) {
  require(epsilon > 0 && std::isfinite(epsilon), ErrorCode::kInvalidArgument,
          "epsilon must be positive and finite");
  require(eps1_fraction > 0 && eps1_fraction < 1, ErrorCode::kInvalidArgument,
          "eps1 fraction must lie in (0,1)");
  const double eps1 = eps1_fraction * epsilon;
  PrivacyBudget b{epsilon, eps1, epsilon - eps1};
  b.validate();
  return b;
}

void PrivacyBudget::validate() const {
  require(epsilon > 0 && eps1 > 0 && eps2 > 0, ErrorCode::kInvalidArgument,
          "privacy budgets must be positive");
  require(std::abs(eps1 + eps2 - epsilon) <= 1e-12, ErrorCode::kInvalidArgument,
          "eps1 + eps2 must equal epsilon");
}

double evaluate_query(const Interval& q, const DataVector& x) { return evaluate_query_impl(q, x); }
double evaluate_query(const Interval& q, const EstimateVector& x) { return evaluate_query_impl(q, x); }

std::vector<double> evaluate_workload(const Workload& w, const DataVector& x) {
  return evaluate_workload_impl(w, x);
}
std::vector<double> evaluate_workload(const Workload& w, const EstimateVector& x) {
  return evaluate_workload_impl(w, x);
}

EstimateVector uniform_expand(const Histogram& h, std::int64_t n) {
  require(h.partition.domain_size() == n, ErrorCode::kInvalidPartition,
          "histogram partition does not cover [1," + std::to_string(n) + "]");
  std::vector<double> y(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < h.partition.size(); ++i) {
    const Interval& b = h.partition[i];
    const double value = h.stats[i] / static_cast<double>(b.length());
    std::fill(y.begin() + (b.lo - 1), y.begin() + b.hi, value);
  }
  return EstimateVector(std::move(y));
}

double average_workload_error(const Workload& w, const DataVector& x,
                              const EstimateVector& xhat) {
  require(x.size() == xhat.size(), ErrorCode::kDimensionMismatch,
          "estimate length does not match data length");
  const auto truth = evaluate_workload(w, x);
  const auto est = evaluate_workload(w, xhat);
  double total = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) total += std::abs(truth[i] - est[i]);
  return total / static_cast<double>(truth.size());
}

std::vector<double> bucket_totals(const Partition& p, const DataVector& x) {
  require(p.domain_size() == x.size(), ErrorCode::kDimensionMismatch,
          "partition domain does not match data length");
  std::vector<double> totals;
  totals.reserve(p.size());
  for (const Interval& b : p) {
    std::int64_t s = 0;
    for (std::int64_t j = b.lo; j <= b.hi; ++j) s += x[j];
    totals.push_back(static_cast<double>(s));
  }
  return totals;
}

}  // namespace dawa
