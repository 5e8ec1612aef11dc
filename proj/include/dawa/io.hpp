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

#ifndef DAWA_IO_HPP_
#define DAWA_IO_HPP_

#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "dawa/core.hpp"
#include "dawa/spatial.hpp"

// Plain-text formats:
//   data      one nonnegative integer per line, line i holds x_i
//   workload  CSV with header "lo,hi", 1-based inclusive
//   partition CSV with header "lo,hi"
//   estimate  one real per line
//   points    CSV with header "x,y"
//   rects     CSV with header "xlo,xhi,ylo,yhi"
// Blank lines are ignored everywhere.
namespace dawa::io {

DataVector read_data(std::istream& in);
DataVector read_data_file(const std::string& path);
void write_data(std::ostream& out, const DataVector& x);

Workload read_workload(std::istream& in, std::int64_t n);
Workload read_workload_file(const std::string& path, std::int64_t n);
void write_intervals(std::ostream& out, std::span<const Interval> intervals);

void write_estimate(std::ostream& out, const EstimateVector& xhat);

std::vector<Point2> read_points(std::istream& in);
std::vector<Box> read_rects(std::istream& in);

// Opens for reading/writing or throws Error(kIo).
std::ifstream open_in(const std::string& path);
std::ofstream open_out(const std::string& path);

}  // namespace dawa::io

#endif  // DAWA_IO_HPP_
