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
#include <map>
#include <vector>

#include "topickg/nmf.hpp"
#include "topickg/sparse_matrix.hpp"

namespace topickg {

struct KRange {
  int lo = 1;
  int hi = 1;

  bool operator==(const KRange&) const = default;
};

struct NmfkParams {
  KRange k_range{2, 10};
  int n_perturbs = 10;
  double perturb_epsilon = 0.015;
  double silhouette_threshold = 0.75;
  NmfParams nmf_params;
  std::uint64_t master_seed = 0;
  // Worker threads for the (k, run) ensemble; results do not depend on it.
  int threads = 1;

  void validate() const;
};

struct ModelSelection {
  int k_star = 0;
  std::map<int, double> per_k_min_silhouette;
  std::map<int, double> per_k_rel_error;  // median over perturbation runs
  FactorPair consensus;                   // medoid W (unit columns), refit H
};

// Multiplies each stored entry by an independent uniform draw on
// [1 - epsilon, 1 + epsilon].
SparseMatrix perturb(const SparseMatrix& A, double epsilon, std::uint64_t seed);

struct ColumnClusters {
  // members[c][r] is the column of run r assigned to cluster c.
  std::vector<std::vector<Index>> members;
  double min_silhouette = 1.0;
};

// Greedy one-to-one matching of each run's columns to clusters seeded by the
// first run, then per-cluster mean cosine-distance silhouettes. With a single
// cluster the silhouette is 1 by convention.
ColumnClusters cluster_columns(const std::vector<Eigen::MatrixXd>& runs);

// Per-run seed used by select_k for the perturbation and the solver.
std::uint64_t run_seed(std::uint64_t master_seed, int k, int run);

// Rank k_star is the largest k whose minimum silhouette reaches the
// threshold; otherwise the k with the best minimum silhouette (smaller k on
// ties).
ModelSelection select_k(const SparseMatrix& A, const NmfkParams& params);

// Restricts `range` to [1, min(rows, cols)].
KRange clamp_range(KRange range, Index rows, Index cols);

void write_model_selection(const std::filesystem::path& dir, const ModelSelection& ms);
ModelSelection read_model_selection(const std::filesystem::path& dir);

}  // namespace topickg
