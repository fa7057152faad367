// Copyright 2026 The topickg Authors
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

#include "topickg/sparse_matrix.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "topickg/error.hpp"

namespace topickg {

SparseMatrix::SparseMatrix(Index rows, Index cols) : rows_(rows), cols_(cols) {
  if (rows < 0 || cols < 0) throw ArgumentError("negative matrix dimension");
  col_ptr_.assign(static_cast<std::size_t>(cols) + 1, 0);
}

SparseMatrix SparseMatrix::from_triplets(Index rows, Index cols, std::vector<Triplet> triplets) {
  SparseMatrix m(rows, cols);
  for (const auto& t : triplets) {
    if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols)
      throw ArgumentError("triplet index (" + std::to_string(t.row) + ", " +
                          std::to_string(t.col) + ") out of range for " + std::to_string(rows) +
                          "x" + std::to_string(cols) + " matrix");
    if (!std::isfinite(t.value) || t.value < 0.0)
      throw ArgumentError("sparse matrix values must be finite and nonnegative");
  }
  std::sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
    return a.col != b.col ? a.col < b.col : a.row < b.row;
  });
  m.row_idx_.reserve(triplets.size());
  m.values_.reserve(triplets.size());
  std::size_t i = 0;
  while (i < triplets.size()) {
    std::size_t j = i;
    double v = 0.0;
    while (j < triplets.size() && triplets[j].col == triplets[i].col &&
           triplets[j].row == triplets[i].row)
      v += triplets[j++].value;
    if (v > 0.0) {
      m.row_idx_.push_back(triplets[i].row);
      m.values_.push_back(v);
      ++m.col_ptr_[static_cast<std::size_t>(triplets[i].col) + 1];
    }
    i = j;
  }
  for (std::size_t c = 0; c < static_cast<std::size_t>(cols); ++c) m.col_ptr_[c + 1] += m.col_ptr_[c];
  return m;
}

SparseMatrix SparseMatrix::from_dense(const Eigen::MatrixXd& dense) {
  std::vector<Triplet> t;
  for (Index c = 0; c < dense.cols(); ++c)
    for (Index r = 0; r < dense.rows(); ++r)
      if (dense(r, c) != 0.0) t.push_back({r, c, dense(r, c)});
  return from_triplets(dense.rows(), dense.cols(), std::move(t));
}

SparseMatrix SparseMatrix::hcat(std::span<const SparseMatrix> blocks) {
  if (blocks.empty()) return {};
  Index rows = blocks.front().rows();
  Index cols = 0;
  for (const auto& b : blocks) {
    if (b.rows() != rows) throw ArgumentError("hcat: row counts differ");
    cols += b.cols();
  }
  SparseMatrix m(rows, cols);
  m.col_ptr_.clear();
  m.col_ptr_.push_back(0);
  for (const auto& b : blocks) {
    std::size_t base = m.values_.size();
    m.row_idx_.insert(m.row_idx_.end(), b.row_idx_.begin(), b.row_idx_.end());
    m.values_.insert(m.values_.end(), b.values_.begin(), b.values_.end());
    for (Index c = 0; c < b.cols(); ++c) m.col_ptr_.push_back(base + b.col_ptr_[c + 1]);
  }
  return m;
}

std::span<const Index> SparseMatrix::col_rows(Index c) const {
  auto b = col_ptr_[c], e = col_ptr_[c + 1];
  return {row_idx_.data() + b, e - b};
}

std::span<const double> SparseMatrix::col_values(Index c) const {
  auto b = col_ptr_[c], e = col_ptr_[c + 1];
  return {values_.data() + b, e - b};
}

double SparseMatrix::coeff(Index r, Index c) const {
  auto rows = col_rows(c);
  auto it = std::lower_bound(rows.begin(), rows.end(), r);
  if (it == rows.end() || *it != r) return 0.0;
  return col_values(c)[static_cast<std::size_t>(it - rows.begin())];
}

std::vector<Triplet> SparseMatrix::triplets() const {
  std::vector<Triplet> t;
  t.reserve(nnz());
  for (Index c = 0; c < cols_; ++c)
    for (std::size_t p = col_ptr_[c]; p < col_ptr_[c + 1]; ++p)
      t.push_back({row_idx_[p], c, values_[p]});
  return t;
}

Eigen::MatrixXd SparseMatrix::to_dense() const {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(rows_, cols_);
  for (Index c = 0; c < cols_; ++c)
    for (std::size_t p = col_ptr_[c]; p < col_ptr_[c + 1]; ++p) d(row_idx_[p], c) = values_[p];
  return d;
}

SparseMatrix SparseMatrix::col_slice(Index begin, Index end) const {
  if (begin < 0 || end > cols_ || begin > end) throw ArgumentError("col_slice: bad column range");
  SparseMatrix m(rows_, end - begin);
  auto b = col_ptr_[begin], e = col_ptr_[end];
  m.row_idx_.assign(row_idx_.begin() + static_cast<std::ptrdiff_t>(b),
                    row_idx_.begin() + static_cast<std::ptrdiff_t>(e));
  m.values_.assign(values_.begin() + static_cast<std::ptrdiff_t>(b),
                   values_.begin() + static_cast<std::ptrdiff_t>(e));
  for (Index c = begin; c <= end; ++c) m.col_ptr_[c - begin] = col_ptr_[c] - b;
  return m;
}

SparseMatrix SparseMatrix::transpose() const {
  std::vector<Triplet> t;
  t.reserve(nnz());
  for (Index c = 0; c < cols_; ++c)
    for (std::size_t p = col_ptr_[c]; p < col_ptr_[c + 1]; ++p)
      t.push_back({c, row_idx_[p], values_[p]});
  return from_triplets(cols_, rows_, std::move(t));
}

double SparseMatrix::sum() const {
  double s = 0.0;
  for (double v : values_) s += v;
  return s;
}

double SparseMatrix::squared_norm() const {
  double s = 0.0;
  for (double v : values_) s += v * v;
  return s;
}

bool SparseMatrix::is_symmetric() const {
  if (rows_ != cols_) return false;
  return transpose() == *this;
}

namespace {

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& s) {
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw InputError("triplet file: bad value '" + s + "'");
  return v;
}

struct RawTriplets {
  Index rows = 0, cols = 0;
  std::vector<Triplet> entries;
};

RawTriplets read_raw(std::istream& in) {
  RawTriplets raw;
  std::size_t nnz = 0;
  std::string line;
  if (!std::getline(in, line)) throw InputError("triplet file: missing header");
  {
    std::istringstream hs(line);
    if (!(hs >> raw.rows >> raw.cols >> nnz) || raw.rows < 0 || raw.cols < 0)
      throw InputError("triplet file: bad header '" + line + "'");
  }
  raw.entries.reserve(nnz);
  while (raw.entries.size() < nnz && std::getline(in, line)) {
    std::istringstream ls(line);
    Index r = 0, c = 0;
    std::string value;
    if (!(ls >> r >> c >> value)) throw InputError("triplet file: bad entry '" + line + "'");
    if (r < 0 || r >= raw.rows || c < 0 || c >= raw.cols)
      throw InputError("triplet file: entry out of range '" + line + "'");
    raw.entries.push_back({r, c, parse_double(value)});
  }
  if (raw.entries.size() != nnz)
    throw InputError("triplet file: expected " + std::to_string(nnz) + " entries, found " +
                     std::to_string(raw.entries.size()));
  return raw;
}

void write_raw(std::ostream& out, Index rows, Index cols, const std::vector<Triplet>& t) {
  out << rows << ' ' << cols << ' ' << t.size() << '\n';
  for (const auto& e : t) out << e.row << ' ' << e.col << ' ' << format_double(e.value) << '\n';
}

}  // namespace

void write_triplets(std::ostream& out, const SparseMatrix& m) {
  write_raw(out, m.rows(), m.cols(), m.triplets());
}

SparseMatrix read_triplets(std::istream& in) {
  auto raw = read_raw(in);
  return SparseMatrix::from_triplets(raw.rows, raw.cols, std::move(raw.entries));
}

void write_triplets(const std::filesystem::path& path, const SparseMatrix& m) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  write_triplets(out, m);
  if (!out) throw InputError("write failed: " + path.string());
}

SparseMatrix read_triplets(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read " + path.string());
  return read_triplets(in);
}

void write_dense(const std::filesystem::path& path, const Eigen::MatrixXd& m) {
  std::vector<Triplet> t;
  for (Index c = 0; c < m.cols(); ++c)
    for (Index r = 0; r < m.rows(); ++r)
      if (m(r, c) != 0.0) t.push_back({r, c, m(r, c)});
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  write_raw(out, m.rows(), m.cols(), t);
  if (!out) throw InputError("write failed: " + path.string());
}

Eigen::MatrixXd read_dense(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read " + path.string());
  auto raw = read_raw(in);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(raw.rows, raw.cols);
  for (const auto& e : raw.entries) m(e.row, e.col) = e.value;
  return m;
}

}  // namespace topickg
