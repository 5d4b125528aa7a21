// Copyright 2026 The qstrength Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Plain-text matrix files.
//
//   # optional comment lines start with '#'
//   2
//   1,0 0,0 0,0 0,0
//   ...
//
// The first non-comment line is the qubit count n; it is followed by 2^n
// rows of 2^n whitespace-separated entries written as `re,im`.

#pragma once

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "qstrength/unitary.hpp"

namespace qstrength {

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// `%.17g` rendering of a double; round-trips exactly.
inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace detail {

inline bool next_content_line(std::istream& in, std::string& line,
                              int& line_no) {
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    return true;
  }
  return false;
}

inline double parse_real(const std::string& s, int line_no) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) {
    throw ParseError("line " + std::to_string(line_no) +
                     ": bad number '" + s + "'");
  }
  return v;
}

inline Complex parse_entry(const std::string& tok, int line_no) {
  const auto comma = tok.find(',');
  if (comma == std::string::npos || tok.find(',', comma + 1) != std::string::npos) {
    throw ParseError("line " + std::to_string(line_no) +
                     ": entry '" + tok + "' is not of the form re,im");
  }
  return {parse_real(tok.substr(0, comma), line_no),
          parse_real(tok.substr(comma + 1), line_no)};
}

}  // namespace detail

/// Reads one matrix block. No unitarity check.
inline ComplexMatrix read_matrix(std::istream& in) {
  std::string line;
  int line_no = 0;
  if (!detail::next_content_line(in, line, line_no)) {
    throw ParseError("empty matrix file");
  }
  std::istringstream head(line);
  int n = 0;
  std::string extra;
  if (!(head >> n) || (head >> extra) || n < 1 || n > 12) {
    throw ParseError("line " + std::to_string(line_no) +
                     ": expected a qubit count between 1 and 12");
  }
  const Eigen::Index dim = Eigen::Index{1} << n;
  ComplexMatrix m(dim, dim);
  for (Eigen::Index r = 0; r < dim; ++r) {
    if (!detail::next_content_line(in, line, line_no)) {
      throw ParseError("expected " + std::to_string(dim) + " rows, found " +
                       std::to_string(r));
    }
    std::istringstream row(line);
    std::string tok;
    Eigen::Index c = 0;
    while (row >> tok) {
      if (c >= dim) {
        throw ParseError("line " + std::to_string(line_no) + ": too many entries");
      }
      m(r, c++) = detail::parse_entry(tok, line_no);
    }
    if (c != dim) {
      throw ParseError("line " + std::to_string(line_no) + ": expected " +
                       std::to_string(dim) + " entries, found " +
                       std::to_string(c));
    }
  }
  return m;
}

/// Reads a matrix and validates it as a unitary (throws NotUnitary).
inline UnitaryOperator read_unitary(std::istream& in,
                                    double tol = kUnitarityTol) {
  return UnitaryOperator(read_matrix(in), tol);
}

inline void write_matrix(std::ostream& out, const ComplexMatrix& m,
                         const std::string& comment = {}) {
  const auto n = qubits_for_dimension(m.rows());
  if (!n || m.rows() != m.cols()) {
    throw DimensionMismatch("write_matrix: matrix must be 2^n x 2^n");
  }
  if (!comment.empty()) out << "# " << comment << '\n';
  out << *n << '\n';
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c) out << ' ';
      out << format_double(m(r, c).real()) << ',' << format_double(m(r, c).imag());
    }
    out << '\n';
  }
}

inline void write_matrix(std::ostream& out, const UnitaryOperator& u,
                         const std::string& comment = {}) {
  write_matrix(out, u.matrix(), comment);
}

}  // namespace qstrength
