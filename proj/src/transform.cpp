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

#include "dawa/transform.hpp"

#include <algorithm>

namespace dawa {
namespace {

// Writes the nonzero entries of q's transformation into row and returns the
// covered bucket range.
std::pair<std::size_t, std::size_t> fill_row(const Interval& q, const Partition& p,
                                             std::span<double> row) {
  const std::size_t first = p.bucket_of(q.lo);
  const std::size_t last = p.bucket_of(q.hi);
  for (std::size_t j = first; j <= last; ++j) {
    const Interval& b = p[j];
    const std::int64_t overlap = std::min(b.hi, q.hi) - std::max(b.lo, q.lo) + 1;
    row[j] = overlap == b.length() ? 1.0
                                   : static_cast<double>(overlap) / static_cast<double>(b.length());
  }
  return {first, last};
}

void check_domain(const Interval& q, const Partition& p) {
  require(q.valid_for(p.domain_size()), ErrorCode::kDimensionMismatch,
          "query " + to_string(q) + " does not fit the partition domain");
}

}  // namespace

TransformedWorkload::TransformedWorkload(Workload source, Partition partition)
    : source_(std::move(source)),
      partition_(std::move(partition)),
      rows_(source_.size()),
      cols_(partition_.size()),
      data_(rows_ * cols_, 0.0) {
  require(source_.domain_size() == partition_.domain_size(), ErrorCode::kDimensionMismatch,
          "workload and partition have different domain sizes");
  support_.reserve(rows_);
  for (std::size_t i = 0; i < rows_; ++i) {
    check_domain(source_[i], partition_);
    support_.push_back(fill_row(source_[i], partition_, std::span<double>(data_).subspan(i * cols_, cols_)));
  }
}

std::vector<double> TransformedWorkload::apply(std::span<const double> s) const {
  require(s.size() == cols_, ErrorCode::kDimensionMismatch, "statistics length must equal k");
  std::vector<double> out(rows_, 0.0);
  for (std::size_t i = 0; i < rows_; ++i) {
    const auto [first, last] = support_[i];
    double acc = 0.0;
    for (std::size_t j = first; j <= last; ++j) acc += data_[i * cols_ + j] * s[j];
    out[i] = acc;
  }
  return out;
}

void TransformedWorkload::write_csv(std::ostream& out) const {
  out.precision(17);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = 0; j < cols_; ++j) {
      if (j) out << ',';
      out << data_[i * cols_ + j];
    }
    out << '\n';
  }
}

std::vector<double> transform_query(const Interval& q, const Partition& p) {
  check_domain(q, p);
  std::vector<double> row(p.size(), 0.0);
  fill_row(q, p, row);
  return row;
}

TransformedWorkload transform_workload(const Workload& w, const Partition& p) {
  return TransformedWorkload(w, p);
}

}  // namespace dawa
