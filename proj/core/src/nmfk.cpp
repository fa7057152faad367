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

#include "topickg/nmfk.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <tuple>

#include "topickg/error.hpp"
#include "topickg/parallel.hpp"
#include "topickg/random.hpp"

namespace topickg {

void NmfkParams::validate() const {
  if (k_range.lo < 1 || k_range.hi < k_range.lo)
    throw ArgumentError("k_range must be a non-empty interval of positive ranks");
  if (n_perturbs < 2) throw ArgumentError("n_perturbs must be >= 2");
  if (!(perturb_epsilon >= 0.0 && perturb_epsilon < 1.0))
    throw ArgumentError("perturb_epsilon must be in [0, 1)");
  if (!(silhouette_threshold > 0.0 && silhouette_threshold <= 1.0))
    throw ArgumentError("silhouette_threshold must be in (0, 1]");
  nmf_params.validate();
}

SparseMatrix perturb(const SparseMatrix& A, double epsilon, std::uint64_t seed) {
  if (!(epsilon >= 0.0 && epsilon < 1.0)) throw ArgumentError("perturb: epsilon must be in [0, 1)");
  if (epsilon == 0.0) return A;
  Rng rng(seed);
  return A.map_values([&](double v) { return v * rng.uniform(1.0 - epsilon, 1.0 + epsilon); });
}

namespace {

double cosine(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  double na = a.norm(), nb = b.norm();
  if (!(na > 0.0) || !(nb > 0.0)) return 0.0;
  return std::clamp(a.dot(b) / (na * nb), -1.0, 1.0);
}

// Unit-norm columns; all-zero columns are left as zero.
Eigen::MatrixXd unit_columns(const Eigen::MatrixXd& W) {
  Eigen::MatrixXd out = W;
  for (Index j = 0; j < W.cols(); ++j) {
    double n = W.col(j).norm();
    if (n > 0.0) out.col(j) /= n;
  }
  return out;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const auto n = v.size();
  if (n == 0) return std::numeric_limits<double>::quiet_NaN();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

ColumnClusters cluster_columns(const std::vector<Eigen::MatrixXd>& runs) {
  if (runs.empty()) throw ArgumentError("cluster_columns: no runs");
  const Index F = runs.front().rows();
  const Index k = runs.front().cols();
  for (const auto& W : runs)
    if (W.rows() != F || W.cols() != k) throw ArgumentError("cluster_columns: mismatched shapes");
  const auto r = runs.size();
  const auto ku = static_cast<std::size_t>(k);

  ColumnClusters out;
  out.members.assign(ku, {});
  std::vector<Eigen::VectorXd> centroid(ku);
  for (Index c = 0; c < k; ++c) {
    out.members[static_cast<std::size_t>(c)].push_back(c);
    centroid[static_cast<std::size_t>(c)] = runs[0].col(c);
  }

  for (std::size_t run = 1; run < r; ++run) {
    const auto& W = runs[run];
    std::vector<std::tuple<double, Index, Index>> pairs;  // (similarity, column, cluster)
    pairs.reserve(ku * ku);
    for (Index j = 0; j < k; ++j)
      for (Index c = 0; c < k; ++c)
        pairs.emplace_back(cosine(W.col(j), centroid[static_cast<std::size_t>(c)]), j, c);
    std::sort(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) {
      if (std::get<0>(a) != std::get<0>(b)) return std::get<0>(a) > std::get<0>(b);
      if (std::get<1>(a) != std::get<1>(b)) return std::get<1>(a) < std::get<1>(b);
      return std::get<2>(a) < std::get<2>(b);
    });
    std::vector<bool> col_used(ku, false), cluster_used(ku, false);
    std::vector<Index> assigned(ku, -1);
    for (const auto& [sim, j, c] : pairs) {
      auto ju = static_cast<std::size_t>(j), cu = static_cast<std::size_t>(c);
      if (col_used[ju] || cluster_used[cu]) continue;
      col_used[ju] = cluster_used[cu] = true;
      assigned[cu] = j;
    }
    for (std::size_t c = 0; c < ku; ++c) {
      out.members[c].push_back(assigned[c]);
      centroid[c] += W.col(assigned[c]);
    }
  }

  if (k == 1) {
    out.min_silhouette = 1.0;
    return out;
  }

  // Cosine distances between every pair of clustered columns.
  const std::size_t n_points = ku * r;
  auto point = [&](std::size_t c, std::size_t run) {
    return runs[run].col(out.members[c][run]);
  };
  Eigen::MatrixXd dist = Eigen::MatrixXd::Zero(static_cast<Index>(n_points), static_cast<Index>(n_points));
  for (std::size_t p = 0; p < n_points; ++p)
    for (std::size_t q = p + 1; q < n_points; ++q) {
      double d = 1.0 - cosine(point(p / r, p % r), point(q / r, q % r));
      dist(static_cast<Index>(p), static_cast<Index>(q)) = d;
      dist(static_cast<Index>(q), static_cast<Index>(p)) = d;
    }

  double min_sil = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < ku; ++c) {
    double cluster_sum = 0.0;
    for (std::size_t run = 0; run < r; ++run) {
      const auto p = static_cast<Index>(c * r + run);
      double a = 0.0;
      if (r > 1) {
        for (std::size_t o = 0; o < r; ++o)
          if (o != run) a += dist(p, static_cast<Index>(c * r + o));
        a /= static_cast<double>(r - 1);
      }
      double b = std::numeric_limits<double>::infinity();
      for (std::size_t c2 = 0; c2 < ku; ++c2) {
        if (c2 == c) continue;
        double m = 0.0;
        for (std::size_t o = 0; o < r; ++o) m += dist(p, static_cast<Index>(c2 * r + o));
        b = std::min(b, m / static_cast<double>(r));
      }
      double denom = std::max(a, b);
      cluster_sum += denom > 0.0 ? (b - a) / denom : 0.0;
    }
    min_sil = std::min(min_sil, cluster_sum / static_cast<double>(r));
  }
  out.min_silhouette = min_sil;
  return out;
}

std::uint64_t run_seed(std::uint64_t master_seed, int k, int run) {
  return derive_seed({master_seed, static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(run)});
}

KRange clamp_range(KRange range, Index rows, Index cols) {
  const int cap = static_cast<int>(std::min(rows, cols));
  range.hi = std::min(range.hi, cap);
  range.lo = std::max(1, std::min(range.lo, range.hi));
  range.hi = std::max(range.hi, range.lo);
  return range;
}

ModelSelection select_k(const SparseMatrix& A, const NmfkParams& params) {
  params.validate();
  const int cap = static_cast<int>(std::min(A.rows(), A.cols()));
  if (params.k_range.hi > cap)
    throw ArgumentError("select_k: k_range upper bound " + std::to_string(params.k_range.hi) +
                        " exceeds min(rows, cols) = " + std::to_string(cap));
  if (A.nnz() == 0) throw ArgumentError("select_k: zero matrix");

  const int n_k = params.k_range.hi - params.k_range.lo + 1;
  const int r = params.n_perturbs;
  struct RunResult {
    Eigen::MatrixXd W;
    double rel_error = 0.0;
  };
  std::vector<RunResult> results(static_cast<std::size_t>(n_k * r));

  parallel_for(results.size(), params.threads, [&](std::size_t job) {
    const int k = params.k_range.lo + static_cast<int>(job) / r;
    const int run = static_cast<int>(job) % r;
    const auto seed = run_seed(params.master_seed, k, run);
    SparseMatrix Ap = perturb(A, params.perturb_epsilon, derive_seed({seed, 1}));
    if (Ap.nnz() == 0) Ap = A;
    NmfParams np = params.nmf_params;
    np.seed = derive_seed({seed, 2});
    np.observer = nullptr;
    FactorPair fp = nmf(Ap, k, np);
    results[job].rel_error = relative_error(A, fp.W, fp.H);
    results[job].W = unit_columns(fp.W);
  });

  ModelSelection ms;
  std::map<int, ColumnClusters> clusters;
  for (int k = params.k_range.lo; k <= params.k_range.hi; ++k) {
    std::vector<Eigen::MatrixXd> runs;
    std::vector<double> errors;
    for (int run = 0; run < r; ++run) {
      auto& res = results[static_cast<std::size_t>((k - params.k_range.lo) * r + run)];
      runs.push_back(res.W);
      errors.push_back(res.rel_error);
    }
    clusters[k] = cluster_columns(runs);
    ms.per_k_min_silhouette[k] = clusters[k].min_silhouette;
    ms.per_k_rel_error[k] = median(errors);
  }

  int k_star = 0;
  for (int k = params.k_range.hi; k >= params.k_range.lo; --k)
    if (ms.per_k_min_silhouette[k] >= params.silhouette_threshold) {
      k_star = k;
      break;
    }
  if (k_star == 0) {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& [k, s] : ms.per_k_min_silhouette)
      if (s > best) {
        best = s;
        k_star = k;
      }
  }
  ms.k_star = k_star;

  // Medoid of each cluster: the member with the smallest summed distance to
  // the rest of its cluster; ties go to the earliest run.
  const auto& cl = clusters[k_star];
  auto run_w = [&](int run) -> const Eigen::MatrixXd& {
    return results[static_cast<std::size_t>((k_star - params.k_range.lo) * r + run)].W;
  };
  Eigen::MatrixXd W(A.rows(), k_star);
  for (int c = 0; c < k_star; ++c) {
    const auto& members = cl.members[static_cast<std::size_t>(c)];
    double best = std::numeric_limits<double>::infinity();
    int best_run = 0;
    for (int a = 0; a < r; ++a) {
      double total = 0.0;
      for (int b = 0; b < r; ++b)
        if (a != b)
          total += 1.0 - cosine(run_w(a).col(members[static_cast<std::size_t>(a)]),
                                run_w(b).col(members[static_cast<std::size_t>(b)]));
      if (total < best) {
        best = total;
        best_run = a;
      }
    }
    W.col(c) = run_w(best_run).col(members[static_cast<std::size_t>(best_run)]);
  }

  NmfParams np = params.nmf_params;
  np.seed = derive_seed({params.master_seed, static_cast<std::uint64_t>(k_star), 0xC0DEULL});
  np.observer = nullptr;
  ms.consensus.W = std::move(W);
  ms.consensus.H = fit_h(A, ms.consensus.W, np);
  ms.consensus.k = k_star;
  ms.consensus.seed = np.seed;
  ms.consensus.rel_error = relative_error(A, ms.consensus.W, ms.consensus.H);
  return ms;
}

void write_model_selection(const std::filesystem::path& dir, const ModelSelection& ms) {
  std::filesystem::create_directories(dir);
  std::ofstream out(dir / "selection.tsv");
  if (!out) throw InputError("cannot write " + (dir / "selection.tsv").string());
  out.precision(17);
  out << "k_star\t" << ms.k_star << "\n";
  out << "k\tmin_silhouette\tmedian_rel_error\n";
  for (const auto& [k, s] : ms.per_k_min_silhouette)
    out << k << '\t' << s << '\t' << ms.per_k_rel_error.at(k) << '\n';
  write_factor_pair(dir / "consensus", ms.consensus);
}

ModelSelection read_model_selection(const std::filesystem::path& dir) {
  std::ifstream in(dir / "selection.tsv");
  if (!in) throw InputError("cannot read " + (dir / "selection.tsv").string());
  ModelSelection ms;
  std::string key, header;
  in >> key >> ms.k_star;
  std::getline(in, header);
  std::getline(in, header);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    int k = 0;
    double s = 0.0, e = 0.0;
    if (!(ls >> k >> s >> e)) throw InputError("bad selection line '" + line + "'");
    ms.per_k_min_silhouette[k] = s;
    ms.per_k_rel_error[k] = e;
  }
  ms.consensus = read_factor_pair(dir / "consensus");
  return ms;
}

}  // namespace topickg
