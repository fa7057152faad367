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
#include <cstdint>
#include <filesystem>
#include <functional>
#include <utility>

#include "topickg/sparse_matrix.hpp"

namespace topickg {

struct NmfParams {
  int max_iter = 500;
  // Stop once (f_prev - f) / f_prev drops below tol for one iteration.
  double tol = 1e-8;
  std::uint64_t seed = 0;
  double epsilon_guard = 1e-16;
  // Checks W, H >= 0 after every update and throws if violated.
  bool check_nonnegativity = false;
  // Receives the iteration index, ||A - WH||_F^2 and the current factors
  // before each update, and once more after the last update.
  std::function<void(int, double, const Eigen::MatrixXd& W, const Eigen::MatrixXd& H)> observer;

  void validate() const;
};

struct FactorPair {
  Eigen::MatrixXd W;  // rows x k
  Eigen::MatrixXd H;  // k x cols
  int k = 0;
  double rel_error = 0.0;
  int iterations = 0;
  std::uint64_t seed = 0;
};

// Multiplicative-update NMF for min ||A - WH||_F^2 at fixed rank k.
FactorPair nmf(const SparseMatrix& A, int k, const NmfParams& params = {});

// Fits H >= 0 for a fixed W by multiplicative H updates from a seeded
// random start, using the same stopping rule as nmf().
Eigen::MatrixXd fit_h(const SparseMatrix& A, const Eigen::MatrixXd& W, const NmfParams& params);

// ||A - WH||_F / ||A||_F without forming A densely.
double relative_error(const SparseMatrix& A, const Eigen::MatrixXd& W, const Eigen::MatrixXd& H);

// Scales each W column to unit norm and the matching H row by that norm.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> normalize_factors(const Eigen::MatrixXd& W,
                                                              const Eigen::MatrixXd& H);

// W.tri, H.tri and meta.txt under `dir`.
void write_factor_pair(const std::filesystem::path& dir, const FactorPair& fp);
FactorPair read_factor_pair(const std::filesystem::path& dir);

}  // namespace topickg
