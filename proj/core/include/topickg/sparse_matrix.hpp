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

#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

namespace topickg {

using Index = Eigen::Index;

struct Triplet {
  Index row = 0;
  Index col = 0;
  double value = 0.0;

  bool operator==(const Triplet&) const = default;
};

// Nonnegative sparse matrix in compressed-column form. Every stored value is
// strictly positive and finite; row indices within a column are increasing.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  SparseMatrix(Index rows, Index cols);

  // Duplicate (row, col) pairs are summed; entries that end up <= 0 are
  // dropped. Throws ArgumentError on out-of-range indices or non-finite
  // or negative values.
  static SparseMatrix from_triplets(Index rows, Index cols, std::vector<Triplet> triplets);
  // Keeps strictly positive entries. Negative entries are an error.
  static SparseMatrix from_dense(const Eigen::MatrixXd& dense);
  // Concatenates column blocks left to right; row counts must match.
  static SparseMatrix hcat(std::span<const SparseMatrix> blocks);

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  std::size_t nnz() const { return values_.size(); }

  std::span<const Index> col_rows(Index c) const;
  std::span<const double> col_values(Index c) const;
  // Value at (r, c), zero if not stored.
  double coeff(Index r, Index c) const;

  // Sorted by (col, row).
  std::vector<Triplet> triplets() const;
  Eigen::MatrixXd to_dense() const;
  SparseMatrix col_slice(Index begin, Index end) const;
  SparseMatrix transpose() const;

  double sum() const;
  double squared_norm() const;
  bool is_symmetric() const;

  // Replaces each stored value v with f(v). Results that are zero are dropped.
  template <typename F>
  SparseMatrix map_values(F&& f) const {
    std::vector<Triplet> t;
    t.reserve(nnz());
    for (Index c = 0; c < cols_; ++c)
      for (std::size_t p = col_ptr_[c]; p < col_ptr_[c + 1]; ++p)
        t.push_back({row_idx_[p], c, f(values_[p])});
    return from_triplets(rows_, cols_, std::move(t));
  }

  bool operator==(const SparseMatrix&) const = default;

 private:
  Index rows_ = 0;
  Index cols_ = 0;
  std::vector<std::size_t> col_ptr_{0};
  std::vector<Index> row_idx_;
  std::vector<double> values_;
};

// Text triplet format: header "rows cols nnz", then one "row col value" line
// per stored entry sorted by (col, row), values with 17 significant digits.
void write_triplets(std::ostream& out, const SparseMatrix& m);
SparseMatrix read_triplets(std::istream& in);
void write_triplets(const std::filesystem::path& path, const SparseMatrix& m);
SparseMatrix read_triplets(const std::filesystem::path& path);

// Dense factors share the triplet format (zeros omitted).
void write_dense(const std::filesystem::path& path, const Eigen::MatrixXd& m);
Eigen::MatrixXd read_dense(const std::filesystem::path& path);

}  // namespace topickg
