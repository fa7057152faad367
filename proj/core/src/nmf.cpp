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

#include "topickg/nmf.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "topickg/error.hpp"
#include "topickg/random.hpp"

namespace topickg {

void NmfParams::validate() const {
  if (max_iter < 1) throw ArgumentError("max_iter must be >= 1");
  if (!(tol >= 0.0)) throw ArgumentError("tol must be >= 0");
  if (!(epsilon_guard > 0.0)) throw ArgumentError("epsilon_guard must be > 0");
}

namespace {

// W^T A as a k x cols matrix; Wt is W transposed (k x rows).
Eigen::MatrixXd wt_times_a(const Eigen::MatrixXd& Wt, const SparseMatrix& A) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(Wt.rows(), A.cols());
  for (Index n = 0; n < A.cols(); ++n) {
    auto rows = A.col_rows(n);
    auto vals = A.col_values(n);
    auto dst = out.col(n);
    for (std::size_t p = 0; p < rows.size(); ++p) dst.noalias() += vals[p] * Wt.col(rows[p]);
  }
  return out;
}

// (A H^T)^T as a k x rows matrix.
Eigen::MatrixXd a_times_ht_transposed(const SparseMatrix& A, const Eigen::MatrixXd& H) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(H.rows(), A.rows());
  for (Index n = 0; n < A.cols(); ++n) {
    auto rows = A.col_rows(n);
    auto vals = A.col_values(n);
    auto h = H.col(n);
    for (std::size_t p = 0; p < rows.size(); ++p) out.col(rows[p]).noalias() += vals[p] * h;
  }
  return out;
}

// ||A - WH||^2 given WtA = W^T A and WtW = W^T W.
double objective(double norm_a2, const Eigen::MatrixXd& WtA, const Eigen::MatrixXd& WtW,
                 const Eigen::MatrixXd& H) {
  Eigen::MatrixXd HHt = H * H.transpose();
  return norm_a2 - 2.0 * (H.array() * WtA.array()).sum() + (WtW.array() * HHt.array()).sum();
}

void check_nonnegative(const Eigen::MatrixXd& M, const char* name, int iter) {
  if (!(M.array() >= 0.0).all() || !M.allFinite())
    throw Error(std::string("nmf: ") + name + " lost nonnegativity at iteration " +
                std::to_string(iter));
}

void check_input(const SparseMatrix& A, int k) {
  if (A.nnz() == 0) throw ArgumentError("nmf: zero matrix");
  if (k < 1 || k > std::min(A.rows(), A.cols()))
    throw ArgumentError("nmf: rank " + std::to_string(k) + " outside [1, " +
                        std::to_string(std::min(A.rows(), A.cols())) + "]");
}

Eigen::MatrixXd random_factor(Rng& rng, Index rows, Index cols, double scale) {
  Eigen::MatrixXd M(rows, cols);
  for (Index c = 0; c < cols; ++c)
    for (Index r = 0; r < rows; ++r) M(r, c) = rng.uniform_open_closed() * scale;
  return M;
}

bool converged(double prev, double cur, double tol) {
  if (prev <= 0.0) return true;
  return (prev - cur) / prev < tol;
}

}  // namespace

FactorPair nmf(const SparseMatrix& A, int k, const NmfParams& params) {
  params.validate();
  check_input(A, k);

  const double norm_a2 = A.squared_norm();
  const double mean = A.sum() / (static_cast<double>(A.rows()) * static_cast<double>(A.cols()));
  const double scale = std::sqrt(mean / k);
  const double eps = params.epsilon_guard;

  Rng rng(params.seed);
  Eigen::MatrixXd W = random_factor(rng, A.rows(), k, scale);
  Eigen::MatrixXd H = random_factor(rng, k, A.cols(), scale);

  double prev = 0.0;
  int it = 0;
  for (; it < params.max_iter; ++it) {
    Eigen::MatrixXd Wt = W.transpose();
    Eigen::MatrixXd WtA = wt_times_a(Wt, A);
    Eigen::MatrixXd WtW = Wt * W;
    double obj = objective(norm_a2, WtA, WtW, H);
    if (params.observer) params.observer(it, obj, W, H);
    if (it > 0 && converged(prev, obj, params.tol)) break;
    prev = obj;

    H.array() *= WtA.array() / ((WtW * H).array() + eps);
    Eigen::MatrixXd AHt = a_times_ht_transposed(A, H).transpose();
    Eigen::MatrixXd HHt = H * H.transpose();
    W.array() *= AHt.array() / ((W * HHt).array() + eps);

    if (params.check_nonnegativity) {
      check_nonnegative(H, "H", it);
      check_nonnegative(W, "W", it);
    }
  }
  if (it == params.max_iter && params.observer) {
    Eigen::MatrixXd Wt = W.transpose();
    params.observer(it, objective(norm_a2, wt_times_a(Wt, A), Wt * W, H), W, H);
  }

  FactorPair fp;
  fp.k = k;
  fp.iterations = it;
  fp.seed = params.seed;
  fp.rel_error = relative_error(A, W, H);
  fp.W = std::move(W);
  fp.H = std::move(H);
  return fp;
}

Eigen::MatrixXd fit_h(const SparseMatrix& A, const Eigen::MatrixXd& W, const NmfParams& params) {
  params.validate();
  if (W.rows() != A.rows()) throw ArgumentError("fit_h: W row count does not match A");
  if (A.nnz() == 0) throw ArgumentError("fit_h: zero matrix");
  const auto k = W.cols();
  const double norm_a2 = A.squared_norm();
  const double mean = A.sum() / (static_cast<double>(A.rows()) * static_cast<double>(A.cols()));
  const double scale = std::sqrt(mean / static_cast<double>(k));

  Rng rng(params.seed);
  Eigen::MatrixXd H = random_factor(rng, k, A.cols(), scale);
  const Eigen::MatrixXd Wt = W.transpose();
  const Eigen::MatrixXd WtA = wt_times_a(Wt, A);
  const Eigen::MatrixXd WtW = Wt * W;

  double prev = 0.0;
  for (int it = 0; it < params.max_iter; ++it) {
    double obj = objective(norm_a2, WtA, WtW, H);
    if (params.observer) params.observer(it, obj, W, H);
    if (it > 0 && converged(prev, obj, params.tol)) break;
    prev = obj;
    H.array() *= WtA.array() / ((WtW * H).array() + params.epsilon_guard);
  }
  return H;
}

double relative_error(const SparseMatrix& A, const Eigen::MatrixXd& W, const Eigen::MatrixXd& H) {
  if (W.rows() != A.rows() || H.cols() != A.cols() || W.cols() != H.rows())
    throw ArgumentError("relative_error: inconsistent shapes");
  const double norm_a2 = A.squared_norm();
  if (!(norm_a2 > 0.0)) throw ArgumentError("relative_error: ||A||_F = 0");

  // Residual on stored entries is summed directly; the residual on the
  // structural zeros is ||WH||^2 minus the stored-position part of it.
  const Eigen::MatrixXd Wt = W.transpose();
  double on_pattern = 0.0;
  double wh_on_pattern = 0.0;
  for (Index n = 0; n < A.cols(); ++n) {
    auto rows = A.col_rows(n);
    auto vals = A.col_values(n);
    for (std::size_t p = 0; p < rows.size(); ++p) {
      double wh = Wt.col(rows[p]).dot(H.col(n));
      on_pattern += (vals[p] - wh) * (vals[p] - wh);
      wh_on_pattern += wh * wh;
    }
  }
  Eigen::MatrixXd WtW = Wt * W;
  Eigen::MatrixXd HHt = H * H.transpose();
  double wh_total = (WtW.array() * HHt.array()).sum();
  double off_pattern = std::max(0.0, wh_total - wh_on_pattern);
  return std::sqrt((on_pattern + off_pattern) / norm_a2);
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> normalize_factors(const Eigen::MatrixXd& W,
                                                              const Eigen::MatrixXd& H) {
  if (W.cols() != H.rows()) throw ArgumentError("normalize_factors: inner dimensions differ");
  Eigen::MatrixXd Wn = W;
  Eigen::MatrixXd Hn = H;
  for (Index j = 0; j < W.cols(); ++j) {
    double norm = W.col(j).norm();
    if (!(norm > 0.0))
      throw ArgumentError("normalize_factors: W column " + std::to_string(j) + " is zero");
    Wn.col(j) /= norm;
    Hn.row(j) *= norm;
  }
  return {std::move(Wn), std::move(Hn)};
}

void write_factor_pair(const std::filesystem::path& dir, const FactorPair& fp) {
  std::filesystem::create_directories(dir);
  write_dense(dir / "W.tri", fp.W);
  write_dense(dir / "H.tri", fp.H);
  std::ofstream meta(dir / "meta.txt");
  if (!meta) throw InputError("cannot write " + (dir / "meta.txt").string());
  std::ostringstream rel;
  rel.precision(17);
  rel << fp.rel_error;
  meta << "k " << fp.k << "\nseed " << fp.seed << "\niterations " << fp.iterations
       << "\nrel_error " << rel.str() << "\n";
}

FactorPair read_factor_pair(const std::filesystem::path& dir) {
  FactorPair fp;
  fp.W = read_dense(dir / "W.tri");
  fp.H = read_dense(dir / "H.tri");
  std::ifstream meta(dir / "meta.txt");
  if (!meta) throw InputError("cannot read " + (dir / "meta.txt").string());
  std::string key;
  while (meta >> key) {
    if (key == "k") meta >> fp.k;
    else if (key == "seed") meta >> fp.seed;
    else if (key == "iterations") meta >> fp.iterations;
    else if (key == "rel_error") meta >> fp.rel_error;
    else throw InputError("unknown factor metadata key '" + key + "'");
  }
  if (fp.W.cols() != fp.k || fp.H.rows() != fp.k)
    throw InputError("factor files in " + dir.string() + " disagree with k");
  return fp;
}

}  // namespace topickg
