// Copyright 2026 The ppmc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PPMC_IO_HPP_
#define PPMC_IO_HPP_

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "ppmc/matrix.hpp"

namespace ppmc {

/// CSV serialization: one matrix row per line, '.' decimal point regardless
/// of locale, 17 significant digits (lossless double round trip).
inline void write_csv(std::ostream& os, const Matrix& m) {
  char buf[64];
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", m(i, j));
      if (j) os << ',';
      os << buf;
    }
    os << '\n';
  }
}

inline void write_csv(const std::string& path, const Matrix& m) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  write_csv(f, m);
  if (!f) throw std::runtime_error("write failed: " + path);
}

inline Matrix read_csv(std::istream& is, const std::string& origin = "<csv>") {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<double> row;
    const char* p = line.data();
    const char* end = line.data() + line.size();
    while (p <= end) {
      double v = 0.0;
      auto [next, ec] = std::from_chars(p, end, v);
      if (ec != std::errc{})
        throw std::runtime_error(origin + ":" + std::to_string(lineno) +
                                 ": malformed number");
      if (!std::isfinite(v))
        throw std::runtime_error(origin + ":" + std::to_string(lineno) +
                                 ": non-finite value");
      row.push_back(v);
      if (next == end) break;
      if (*next != ',')
        throw std::runtime_error(origin + ":" + std::to_string(lineno) +
                                 ": expected ','");
      p = next + 1;
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw std::runtime_error(origin + ":" + std::to_string(lineno) +
                               ": ragged row");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error(origin + ": empty matrix file");
  Matrix m(static_cast<Index>(rows.size()),
           static_cast<Index>(rows.front().size()));
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j)
      m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  return m;
}

inline Matrix read_csv_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open: " + path);
  return read_csv(f, path);
}

inline void write_mask_csv(const std::string& path,
                           const ObservationMask& mask) {
  write_csv(path, mask.bits());
}

inline ObservationMask read_mask_csv(const std::string& path) {
  return ObservationMask(read_csv_file(path));
}

}  // namespace ppmc

#endif  // PPMC_IO_HPP_
