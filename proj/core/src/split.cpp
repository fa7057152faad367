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

#include "topickg/split.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>

#include "topickg/error.hpp"
#include "topickg/hash.hpp"
#include "topickg/random.hpp"

namespace topickg {

namespace {

enum SeedTag : std::uint64_t { kChunk = 1, kMerge = 2, kSemantic = 3, kCategory = 4, kFuse = 5 };

using Solver = std::function<ModelSelection(const SparseMatrix&, const NmfkParams&, const std::string&)>;

ModelSelection plain_select(const SparseMatrix& A, const NmfkParams& p, const std::string&) {
  return select_k(A, p);
}

NmfkParams derived(const NmfkParams& base, const SparseMatrix& A, std::uint64_t tag,
                   std::uint64_t index = 0) {
  NmfkParams p = base;
  p.master_seed = derive_seed({base.master_seed, tag, index});
  p.k_range = clamp_range(base.k_range, A.rows(), A.cols());
  return p;
}

// Unit-norm columns with the norms moved into the matching rows of H.
// Zero columns stay zero and zero their H row.
void fold_norms(Eigen::MatrixXd& W, Eigen::MatrixXd& H) {
  for (Index j = 0; j < W.cols(); ++j) {
    double n = W.col(j).norm();
    if (n > 0.0) {
      W.col(j) /= n;
      H.row(j) *= n;
    } else {
      H.row(j).setZero();
    }
  }
}

Eigen::MatrixXd unit_columns(Eigen::MatrixXd W) {
  for (Index j = 0; j < W.cols(); ++j) {
    double n = W.col(j).norm();
    if (n > 0.0) W.col(j) /= n;
  }
  return W;
}

ChunkFactors factorize_chunks_impl(const std::vector<ColumnChunk>& chunks, Index n_cols,
                                   const NmfkParams& params, const Solver& solve) {
  ChunkFactors cf;
  for (std::size_t i = 0; i < chunks.size(); ++i) {
    const auto& ch = chunks[i];
    if (ch.matrix.nnz() == 0)
      throw ArgumentError("chunk " + std::to_string(i) + " (columns " + std::to_string(ch.offset) +
                          ".." + std::to_string(ch.offset + ch.matrix.cols()) +
                          ") is entirely zero");
    cf.offsets.push_back(ch.offset);
  }
  cf.offsets.push_back(n_cols);
  for (std::size_t i = 0; i < chunks.size(); ++i) {
    const auto& A = chunks[i].matrix;
    cf.chunks.push_back(solve(A, derived(params, A, kChunk, i), "chunk_" + std::to_string(i)));
  }
  return cf;
}

MergeResult merge_impl(const ChunkFactors& cf, const NmfkParams& params, const Solver& solve) {
  if (cf.chunks.empty()) throw ArgumentError("merge_chunk_factors: no chunks");
  const Index F = cf.chunks.front().consensus.W.rows();
  const Index N = cf.offsets.back();

  std::vector<Eigen::MatrixXd> Ws, Hs;
  MergeResult mr;
  mr.rank_offsets.push_back(0);
  for (const auto& ch : cf.chunks) {
    if (ch.consensus.W.rows() != F) throw ArgumentError("merge_chunk_factors: chunk row counts differ");
    Eigen::MatrixXd W = ch.consensus.W;
    Eigen::MatrixXd H = ch.consensus.H;
    fold_norms(W, H);
    mr.rank_offsets.push_back(mr.rank_offsets.back() + W.cols());
    Ws.push_back(std::move(W));
    Hs.push_back(std::move(H));
  }
  const Index K = mr.rank_offsets.back();
  Eigen::MatrixXd W_tilde(F, K);
  for (std::size_t i = 0; i < Ws.size(); ++i)
    W_tilde.middleCols(mr.rank_offsets[i], Ws[i].cols()) = Ws[i];

  SparseMatrix A = SparseMatrix::from_dense(W_tilde);
  mr.selection = solve(A, derived(params, A, kMerge), "merge");
  mr.W_x = mr.selection.consensus.W;
  mr.M = mr.selection.consensus.H;
  fold_norms(mr.W_x, mr.M);

  mr.H_star = Eigen::MatrixXd::Zero(mr.W_x.cols(), N);
  for (std::size_t i = 0; i < Hs.size(); ++i) {
    const Index cols = cf.offsets[i + 1] - cf.offsets[i];
    mr.H_star.middleCols(cf.offsets[i], cols).noalias() =
        mr.M.middleCols(mr.rank_offsets[i], Hs[i].rows()) * Hs[i];
  }
  return mr;
}

SideMergeResult side_impl(const MergeResult& mr, const SparseMatrix* S, const SparseMatrix* C,
                          const SideWeights& weights, const NmfkParams& params,
                          const Solver& solve) {
  const Index F = mr.W_x.rows();
  if (S && (S->rows() != F || S->cols() != F))
    throw ArgumentError("incorporate_side_info: S must be " + std::to_string(F) + "x" +
                        std::to_string(F));
  if (C && C->rows() != F)
    throw ArgumentError("incorporate_side_info: C must have " + std::to_string(F) + " rows");
  if (S && S->nnz() == 0) S = nullptr;
  if (C && C->nnz() == 0) C = nullptr;

  SideMergeResult out;
  out.p = mr.p();
  Eigen::MatrixXd W_x = mr.W_x;
  Eigen::MatrixXd H_star = mr.H_star;
  fold_norms(W_x, H_star);

  if (!S && !C) {
    out.W_plus = W_x;
    out.W = W_x;
    out.Y = Eigen::MatrixXd::Identity(out.p, out.p);
    out.H = H_star;
    return out;
  }

  Eigen::MatrixXd W_s(F, 0), W_c(F, 0);
  if (S) {
    out.semantic = solve(*S, derived(params, *S, kSemantic), "semantic");
    W_s = weights.semantic * unit_columns(out.semantic->consensus.W);
    out.s = static_cast<int>(W_s.cols());
  }
  if (C) {
    out.category = solve(*C, derived(params, *C, kCategory), "category");
    W_c = weights.category * unit_columns(out.category->consensus.W);
    out.c = static_cast<int>(W_c.cols());
  }

  out.W_plus.resize(F, out.z());
  out.W_plus.leftCols(out.p) = W_x;
  out.W_plus.middleCols(out.p, out.s) = W_s;
  out.W_plus.rightCols(out.c) = W_c;
  SparseMatrix A = SparseMatrix::from_dense(out.W_plus);
  out.selection = solve(A, derived(params, A, kFuse), "fuse");
  out.W = out.selection->consensus.W;
  out.Y = out.selection->consensus.H;
  fold_norms(out.W, out.Y);
  out.H = out.Y.leftCols(out.p) * H_star;
  return out;
}

std::string params_key(const NmfkParams& p) {
  std::ostringstream s;
  s.precision(17);
  s << p.k_range.lo << ' ' << p.k_range.hi << ' ' << p.n_perturbs << ' ' << p.perturb_epsilon
    << ' ' << p.silhouette_threshold << ' ' << p.nmf_params.max_iter << ' ' << p.nmf_params.tol
    << ' ' << p.nmf_params.epsilon_guard << ' ' << p.master_seed;
  return s.str();
}

// select_k results cached under a checkpoint directory.
class CheckpointedSolver {
 public:
  explicit CheckpointedSolver(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
    std::ifstream in(dir_ / "manifest.tsv");
    std::string line;
    while (std::getline(in, line)) {
      std::istringstream ls(line);
      std::string kind, step, key;
      if (!(ls >> kind >> step >> key) || kind != "step") continue;
      keys_[step] = key;
    }
  }

  ModelSelection operator()(const SparseMatrix& A, const NmfkParams& p, const std::string& step) {
    const std::string key = sha256_hex(fingerprint(A) + "|" + params_key(p));
    const auto step_dir = dir_ / step;
    if (auto it = keys_.find(step); it != keys_.end() && it->second == key &&
                                    std::filesystem::exists(step_dir / "selection.tsv")) {
      auto ms = read_model_selection(step_dir);
      record(step, key, ms, p);
      return ms;
    }
    auto ms = select_k(A, p);
    write_model_selection(step_dir, ms);
    keys_[step] = key;
    record(step, key, ms, p);
    return ms;
  }

  void set_offsets(const std::vector<Index>& offsets) { offsets_ = offsets; }

  void write_manifest() const {
    std::ofstream out(dir_ / "manifest.tsv");
    out << "offsets";
    for (auto o : offsets_) out << ' ' << o;
    out << '\n';
    for (const auto& e : entries_)
      out << "step\t" << e.step << '\t' << e.key << '\t' << e.k_star << '\t' << e.seed << '\n';
  }

 private:
  struct Entry {
    std::string step, key;
    int k_star;
    std::uint64_t seed;
  };
  void record(const std::string& step, const std::string& key, const ModelSelection& ms,
              const NmfkParams& p) {
    entries_.push_back({step, key, ms.k_star, p.master_seed});
    write_manifest();
  }

  std::filesystem::path dir_;
  std::map<std::string, std::string> keys_;
  std::vector<Entry> entries_;
  std::vector<Index> offsets_;
};

}  // namespace

Index ChunkFactors::total_rank() const {
  Index K = 0;
  for (const auto& c : chunks) K += c.consensus.W.cols();
  return K;
}

std::vector<ColumnChunk> chunk_columns(const SparseMatrix& X, int m) {
  const Index N = X.cols();
  if (m < 1) throw ArgumentError("chunk count must be >= 1");
  if (m > N)
    throw ArgumentError("chunk count " + std::to_string(m) + " exceeds column count " +
                        std::to_string(N));
  std::vector<ColumnChunk> out;
  const Index base = N / m, extra = N % m;
  Index start = 0;
  for (Index i = 0; i < m; ++i) {
    Index size = base + (i < extra ? 1 : 0);
    out.push_back({X.col_slice(start, start + size), start});
    start += size;
  }
  return out;
}

ChunkFactors factorize_chunks(const std::vector<ColumnChunk>& chunks, Index n_cols,
                              const NmfkParams& params) {
  return factorize_chunks_impl(chunks, n_cols, params, plain_select);
}

MergeResult merge_chunk_factors(const ChunkFactors& cf, const NmfkParams& params) {
  return merge_impl(cf, params, plain_select);
}

SideMergeResult incorporate_side_info(const MergeResult& mr, const SparseMatrix* S,
                                      const SparseMatrix* C, const SideWeights& weights,
                                      const NmfkParams& params) {
  return side_impl(mr, S, C, weights, params, plain_select);
}

SplitResult split_factorize(const SparseMatrix& X, const SparseMatrix* S, const SparseMatrix* C,
                            const SplitParams& params,
                            const std::optional<std::filesystem::path>& checkpoint_dir) {
  const int m = static_cast<int>(std::min<Index>(params.chunks, X.cols()));
  auto chunks = chunk_columns(X, m);

  std::optional<CheckpointedSolver> cached;
  Solver solve = plain_select;
  if (checkpoint_dir) {
    cached.emplace(*checkpoint_dir);
    std::vector<Index> offsets;
    for (const auto& ch : chunks) offsets.push_back(ch.offset);
    offsets.push_back(X.cols());
    cached->set_offsets(offsets);
    solve = [&cached](const SparseMatrix& A, const NmfkParams& p, const std::string& step) {
      return (*cached)(A, p, step);
    };
  }

  SplitResult r;
  r.chunk_factors = factorize_chunks_impl(chunks, X.cols(), params.nmfk, solve);
  r.merge = merge_impl(r.chunk_factors, params.nmfk, solve);
  r.side = side_impl(r.merge, S, C, params.weights, params.nmfk, solve);
  return r;
}

}  // namespace topickg
