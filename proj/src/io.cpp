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

#include "dawa/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <string_view>

namespace dawa::io {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string where(std::size_t line) { return "line " + std::to_string(line) + ": "; }

std::int64_t parse_int(std::string_view s, std::size_t line) {
  s = trim(s);
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  require(ec == std::errc() && ptr == s.data() + s.size() && !s.empty(), ErrorCode::kParse,
          where(line) + "expected an integer, got '" + std::string(s) + "'");
  return v;
}

double parse_real(std::string_view s, std::size_t line) {
  s = trim(s);
  std::string tmp(s);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(tmp, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  require(!tmp.empty() && used == tmp.size(), ErrorCode::kParse,
          where(line) + "expected a number, got '" + tmp + "'");
  return v;
}

std::vector<std::string_view> split_csv(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = s.find(',', start);
    out.push_back(trim(s.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

// Reads a CSV with the given header; returns the rows' fields with line numbers.
template <typename Fn>
void read_csv(std::istream& in, std::initializer_list<std::string_view> header, Fn&& on_row) {
  std::string line;
  std::size_t number = 0;
  bool seen_header = false;
  while (std::getline(in, line)) {
    ++number;
    const std::string_view t = trim(line);
    if (t.empty()) continue;
    const auto fields = split_csv(t);
    if (!seen_header) {
      seen_header = true;
      bool matches = fields.size() == header.size();
      std::size_t i = 0;
      for (std::string_view h : header) matches = matches && fields[i++] == h;
      std::string expected;
      for (std::string_view h : header) expected += (expected.empty() ? "" : ",") + std::string(h);
      require(matches, ErrorCode::kParse, where(number) + "expected header '" + expected + "'");
      continue;
    }
    require(fields.size() == header.size(), ErrorCode::kParse,
            where(number) + "expected " + std::to_string(header.size()) + " fields");
    on_row(fields, number);
  }
  require(seen_header, ErrorCode::kParse, "missing CSV header");
}

}  // namespace

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), ErrorCode::kIo, "cannot open '" + path + "' for reading");
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  require(out.good(), ErrorCode::kIo, "cannot open '" + path + "' for writing");
  return out;
}

DataVector read_data(std::istream& in) {
  std::vector<std::int64_t> counts;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (trim(line).empty()) continue;
    const std::int64_t v = parse_int(line, number);
    require(v >= 0, ErrorCode::kParse, where(number) + "counts must be nonnegative");
    counts.push_back(v);
  }
  require(!counts.empty(), ErrorCode::kParse, "data file holds no counts");
  return DataVector(std::move(counts));
}

DataVector read_data_file(const std::string& path) {
  auto in = open_in(path);
  return read_data(in);
}

void write_data(std::ostream& out, const DataVector& x) {
  for (std::int64_t v : x.values()) out << v << '\n';
}

Workload read_workload(std::istream& in, std::int64_t n) {
  std::vector<Interval> queries;
  read_csv(in, {"lo", "hi"}, [&](const auto& f, std::size_t line) {
    queries.push_back({parse_int(f[0], line), parse_int(f[1], line)});
  });
  return Workload(std::move(queries), n);
}

Workload read_workload_file(const std::string& path, std::int64_t n) {
  auto in = open_in(path);
  return read_workload(in, n);
}

void write_intervals(std::ostream& out, std::span<const Interval> intervals) {
  out << "lo,hi\n";
  for (const Interval& b : intervals) out << b.lo << ',' << b.hi << '\n';
}

void write_estimate(std::ostream& out, const EstimateVector& xhat) {
  std::ostringstream buf;
  buf.precision(17);
  for (double v : xhat.values()) buf << v << '\n';
  out << buf.str();
}

std::vector<Point2> read_points(std::istream& in) {
  std::vector<Point2> points;
  read_csv(in, {"x", "y"}, [&](const auto& f, std::size_t line) {
    points.push_back({parse_real(f[0], line), parse_real(f[1], line)});
  });
  return points;
}

std::vector<Box> read_rects(std::istream& in) {
  std::vector<Box> rects;
  read_csv(in, {"xlo", "xhi", "ylo", "yhi"}, [&](const auto& f, std::size_t line) {
    rects.push_back({parse_real(f[0], line), parse_real(f[1], line), parse_real(f[2], line),
                     parse_real(f[3], line)});
  });
  return rects;
}

}  // namespace dawa::io
