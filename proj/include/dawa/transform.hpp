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

#ifndef DAWA_TRANSFORM_HPP_
#define DAWA_TRANSFORM_HPP_

#include <cstddef>
#include <ostream>
#include <vector>

#include "dawa/core.hpp"

namespace dawa {

// Workload re-expressed over bucket statistics: entry (i, j) is the fraction
// of bucket j covered by query i. Stored dense, row-major, m x k.
class TransformedWorkload {
 public:
  TransformedWorkload(Workload source, Partition partition);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(data_).subspan(i * cols_, cols_);
  }
  // Nonzero columns of row i are [support(i).first, support(i).second].
  std::pair<std::size_t, std::size_t> support(std::size_t i) const { return support_[i]; }

  const Workload& source() const { return source_; }
  const Partition& partition() const { return partition_; }

  // What * s.
  std::vector<double> apply(std::span<const double> s) const;

  // CSV dump, one row per query.
  void write_csv(std::ostream& out) const;

 private:
  Workload source_;
  Partition partition_;
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> data_;
  std::vector<std::pair<std::size_t, std::size_t>> support_;
};

// Fraction of each bucket covered by q.
std::vector<double> transform_query(const Interval& q, const Partition& p);

TransformedWorkload transform_workload(const Workload& w, const Partition& p);

}  // namespace dawa

#endif  // DAWA_TRANSFORM_HPP_
