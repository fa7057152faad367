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

#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "topickg/matrices.hpp"
#include "topickg/nmf.hpp"
#include "topickg/nmfk.hpp"
#include "topickg/random.hpp"

namespace {

using namespace topickg;

// Synthetic corpus: `n_docs` documents of `len` tokens over a `vocab`-word
// alphabet with a Zipf-like skew.
std::vector<TokenizedDocument> synthetic_docs(int n_docs, int len, int vocab, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<TokenizedDocument> docs(static_cast<std::size_t>(n_docs));
  for (int d = 0; d < n_docs; ++d) {
    auto& doc = docs[static_cast<std::size_t>(d)];
    doc.doc_id = "d" + std::to_string(d);
    for (int i = 0; i < len; ++i) {
      const double u = rng.uniform();
      const int w = static_cast<int>(u * u * vocab);
      doc.tokens.push_back("w" + std::to_string(w));
    }
  }
  return docs;
}

Vocabulary full_vocabulary(const std::vector<TokenizedDocument>& docs) {
  return build_vocabulary(docs, 1, 1.0).vocab;
}

SparseMatrix random_sparse(Index rows, Index cols, double density, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Triplet> t;
  for (Index c = 0; c < cols; ++c)
    for (Index r = 0; r < rows; ++r)
      if (rng.uniform() < density) t.push_back({r, c, rng.uniform_open_closed()});
  return SparseMatrix::from_triplets(rows, cols, t);
}

void BM_Tfidf(benchmark::State& state) {
  auto docs = synthetic_docs(static_cast<int>(state.range(0)), 120, 2000, 1);
  auto vocab = full_vocabulary(docs);
  for (auto _ : state) benchmark::DoNotOptimize(build_tfidf(docs, vocab));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Tfidf)->Arg(200)->Arg(2000);

void BM_Cooccurrence(benchmark::State& state) {
  auto docs = synthetic_docs(200, 120, 2000, 2);
  auto vocab = full_vocabulary(docs);
  const int window = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(build_cooccurrence(docs, vocab, window));
}
BENCHMARK(BM_Cooccurrence)->Arg(10)->Arg(100);

void BM_Sppmi(benchmark::State& state) {
  auto docs = synthetic_docs(200, 120, 2000, 3);
  auto counts = build_cooccurrence(docs, full_vocabulary(docs), 100);
  for (auto _ : state) benchmark::DoNotOptimize(sppmi(counts, 4.0));
}
BENCHMARK(BM_Sppmi);

void BM_Nmf(benchmark::State& state) {
  auto A = random_sparse(500, 1000, 0.05, 4);
  NmfParams p;
  p.max_iter = 50;
  p.tol = 0.0;
  const int k = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(nmf(A, k, p));
}
BENCHMARK(BM_Nmf)->Arg(5)->Arg(20)->Unit(benchmark::kMillisecond);

void BM_SelectK(benchmark::State& state) {
  auto A = random_sparse(100, 200, 0.1, 5);
  NmfkParams p;
  p.k_range = {2, 6};
  p.n_perturbs = 5;
  p.nmf_params.max_iter = 100;
  p.threads = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(select_k(A, p));
}
BENCHMARK(BM_SelectK)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
