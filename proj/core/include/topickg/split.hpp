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
#include <filesystem>
#include <optional>
#include <vector>

#include "topickg/nmfk.hpp"
#include "topickg/sparse_matrix.hpp"

namespace topickg {

struct ColumnChunk {
  SparseMatrix matrix;
  Index offset = 0;  // first column in the parent matrix
};

// Contiguous column ranges whose sizes differ by at most one; the first
// N mod m chunks take the extra column.
std::vector<ColumnChunk> chunk_columns(const SparseMatrix& X, int m);

struct ChunkFactors {
  std::vector<ModelSelection> chunks;  // consensus factors per chunk
  std::vector<Index> offsets;          // chunk column offsets, plus N at the end

  Index total_rank() const;  // K = k_1 + ... + k_m
};

// Chunk i is fitted by select_k with master seed derived from (seed, i).
ChunkFactors factorize_chunks(const std::vector<ColumnChunk>& chunks, Index n_cols,
                              const NmfkParams& params);

struct MergeResult {
  Eigen::MatrixXd W_x;     // F x p, unit columns
  Eigen::MatrixXd M;       // p x K mixing matrix, blocks M_i aligned with chunk ranks
  Eigen::MatrixXd H_star;  // p x N
  std::vector<Index> rank_offsets;  // column offset of M_i in M, plus K at the end
  ModelSelection selection;         // select_k on the concatenated chunk bases
  int p() const { return static_cast<int>(W_x.cols()); }
};

// Concatenates the chunk bases with unit columns (norms folded into H_i),
// factorizes the concatenation with select_k and forms H*_i = M_i H_i.
MergeResult merge_chunk_factors(const ChunkFactors& cf, const NmfkParams& params);

struct SideWeights {
  double semantic = 1.0;  // applied to the word-context basis columns
  double category = 1.0;  // applied to the word-category basis columns
};

struct SideMergeResult {
  std::optional<ModelSelection> semantic;  // W_s, H_s from S
  std::optional<ModelSelection> category;  // W_c, H_c from C
  Eigen::MatrixXd W_plus;                  // F x Z = [W_x | w_s W_s | w_c W_c]
  Eigen::MatrixXd W;                       // F x t
  Eigen::MatrixXd Y;                       // t x Z
  Eigen::MatrixXd H;                       // t x N = Y_x H_star
  std::optional<ModelSelection> selection; // select_k on W_plus
  int p = 0, s = 0, c = 0;

  int t() const { return static_cast<int>(W.cols()); }
  int z() const { return p + s + c; }
};

// Fuses the word-context matrix S (F x F) and word-category matrix C (F x L)
// into the merged basis. Side matrices that are absent or have no stored
// entries are skipped; with both skipped the result is (W_x, H_star).
SideMergeResult incorporate_side_info(const MergeResult& mr, const SparseMatrix* S,
                                      const SparseMatrix* C, const SideWeights& weights,
                                      const NmfkParams& params);

struct SplitParams {
  int chunks = 20;
  NmfkParams nmfk;
  SideWeights weights;
};

struct SplitResult {
  ChunkFactors chunk_factors;
  MergeResult merge;
  SideMergeResult side;

  const Eigen::MatrixXd& W() const { return side.W; }
  const Eigen::MatrixXd& H() const { return side.H; }
};

// Chunk, factorize, merge and fuse. The chunk count is capped at N. With a
// checkpoint directory, every select_k result is written there alongside a
// manifest of offsets, ranks, seeds and input fingerprints; steps whose
// manifest entry matches are loaded instead of recomputed.
SplitResult split_factorize(const SparseMatrix& X, const SparseMatrix* S, const SparseMatrix* C,
                            const SplitParams& params,
                            const std::optional<std::filesystem::path>& checkpoint_dir = {});

}  // namespace topickg
