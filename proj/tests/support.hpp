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

// Test-only helpers: fixture paths, temporary directories, planted data
// generators and permutation matching.

#include <Eigen/Dense>
#include <algorithm>
#include <filesystem>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include <unistd.h>

#include "topickg/corpus.hpp"
#include "topickg/random.hpp"
#include "topickg/sparse_matrix.hpp"

namespace testing {

inline std::filesystem::path data_path(const std::string& name) {
  return std::filesystem::path(TOPICKG_TEST_DATA) / name;
}

// Fresh directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("topickg-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline topickg::CleaningConfig fixture_cleaning() {
  topickg::CleaningConfig cc;
  cc.stopwords = topickg::load_stopwords(data_path("stopwords.txt"));
  cc.lemma_map = topickg::load_lemma_map(data_path("lemmas.tsv"));
  cc.stop_phrases = {"All rights reserved."};
  return cc;
}

// Block-diagonal matrix: `blocks` disjoint blocks of rows_per x cols_per
// entries drawn uniformly from [0.5, 1.5).
inline topickg::SparseMatrix planted_blocks(int blocks, int rows_per, int cols_per,
                                            std::uint64_t seed) {
  topickg::Rng rng(seed);
  std::vector<topickg::Triplet> t;
  for (int b = 0; b < blocks; ++b)
    for (int r = 0; r < rows_per; ++r)
      for (int c = 0; c < cols_per; ++c)
        t.push_back({b * rows_per + r, b * cols_per + c, rng.uniform(0.5, 1.5)});
  return topickg::SparseMatrix::from_triplets(blocks * rows_per, blocks * cols_per, std::move(t));
}

struct PlantedTopics {
  topickg::SparseMatrix X;
  std::vector<int> label;  // true topic per column
};

// F x N term-document matrix with `topics` disjoint token groups. A document
// of topic z holds each own token with probability 0.6 (value in [0.5, 1.5))
// and each other token with probability 0.03 (value in [0.1, 0.5)).
inline PlantedTopics planted_topics(int topics, int F, int N, std::uint64_t seed) {
  topickg::Rng rng(seed);
  PlantedTopics out;
  out.label.resize(static_cast<std::size_t>(N));
  std::vector<topickg::Triplet> t;
  const int per = F / topics;
  for (int n = 0; n < N; ++n) {
    const int z = static_cast<int>(rng.next() % static_cast<std::uint64_t>(topics));
    out.label[static_cast<std::size_t>(n)] = z;
    for (int f = 0; f < F; ++f) {
      const bool own = f / per == z;
      if (rng.uniform() < (own ? 0.6 : 0.03))
        t.push_back({f, n, own ? rng.uniform(0.5, 1.5) : rng.uniform(0.1, 0.5)});
    }
  }
  out.X = topickg::SparseMatrix::from_triplets(F, N, std::move(t));
  return out;
}

struct PlantedTree {
  std::vector<topickg::TokenizedDocument> docs;
  std::map<std::string, std::string> category;
  std::vector<int> super_label;
  std::vector<int> sub_label;  // 0..3, super * 2 + sub
};

// Two super-topics each split into two sub-topics. Every super token appears
// once in about 95% of its super's documents, every sub token once in about
// 90% of its sub's documents. With a document-fraction floor near 0.3 the root keeps
// only super tokens and each child only its sub tokens.
inline PlantedTree planted_tree(int n_docs, std::uint64_t seed) {
  topickg::Rng rng(seed);
  constexpr int kSuperTokens = 12;
  constexpr int kSubTokens = 12;
  PlantedTree out;
  for (int d = 0; d < n_docs; ++d) {
    const int s = d % 2;
    const int b = (d / 2) % 2;
    topickg::TokenizedDocument doc;
    doc.doc_id = "p" + std::to_string(1000 + d);
    for (int i = 0; i < kSuperTokens; ++i)
      if (rng.uniform() < 0.95) doc.tokens.push_back("super" + std::to_string(s) + "x" + std::to_string(i));
    for (int i = 0; i < kSubTokens; ++i)
      if (rng.uniform() < 0.9)
        doc.tokens.push_back("sub" + std::to_string(s) + std::to_string(b) + "x" + std::to_string(i));
    // Shuffle so co-occurrence windows mix both token groups.
    for (std::size_t i = doc.tokens.size(); i > 1; --i)
      std::swap(doc.tokens[i - 1], doc.tokens[rng.next() % i]);
    out.category[doc.doc_id] = "cat" + std::to_string(s) + std::to_string(b);
    out.super_label.push_back(s);
    out.sub_label.push_back(s * 2 + b);
    out.docs.push_back(std::move(doc));
  }
  return out;
}

// Largest number of positions where perm(a[i]) == b[i] over all injective
// relabelings of a's labels (labels in [0, ka) and [0, kb)).
inline std::size_t best_matching(const std::vector<int>& a, const std::vector<int>& b, int ka,
                                 int kb) {
  const int k = std::max(ka, kb);
  std::vector<std::vector<std::size_t>> confusion(static_cast<std::size_t>(k),
                                                  std::vector<std::size_t>(static_cast<std::size_t>(k)));
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] >= 0 && b[i] >= 0)
      ++confusion[static_cast<std::size_t>(a[i])][static_cast<std::size_t>(b[i])];
  std::vector<int> perm(static_cast<std::size_t>(k));
  std::iota(perm.begin(), perm.end(), 0);
  std::size_t best = 0;
  do {
    std::size_t hits = 0;
    for (int i = 0; i < k; ++i)
      hits += confusion[static_cast<std::size_t>(i)][static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])];
    best = std::max(best, hits);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

inline std::vector<int> column_argmax(const Eigen::MatrixXd& H) {
  std::vector<int> out(static_cast<std::size_t>(H.cols()));
  for (Eigen::Index j = 0; j < H.cols(); ++j) {
    Eigen::Index i = 0;
    H.col(j).maxCoeff(&i);
    out[static_cast<std::size_t>(j)] = static_cast<int>(i);
  }
  return out;
}

}  // namespace testing
