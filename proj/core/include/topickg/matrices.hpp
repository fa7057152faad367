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

#include <map>
#include <span>
#include <string>
#include <vector>

#include "topickg/corpus.hpp"
#include "topickg/sparse_matrix.hpp"

namespace topickg {

struct CooccurrenceConfig {
  int window = 100;
  double shift = 4.0;
};

// F x N term-document matrix, entry tf(f, n) * ln(N / df[f]) with df counted
// over `docs` (the df stored in `vocab` is not consulted). Tokens outside
// `vocab` are ignored; tokens present in every document have an empty row.
SparseMatrix build_tfidf(std::span<const TokenizedDocument> docs, const Vocabulary& vocab);

// F x F symmetric window co-occurrence counts. Every position pair (t, u)
// with 0 < u - t <= window inside one document increments both [x_t][x_u]
// and [x_u][x_t]; a same-token pair therefore adds 2 to the diagonal.
// Out-of-vocabulary tokens keep their position but are not counted.
SparseMatrix build_cooccurrence(std::span<const TokenizedDocument> docs, const Vocabulary& vocab,
                                int window);

// Shifted positive PMI: max(ln(c_ij * total / (row_i * row_j)) - ln(shift), 0).
SparseMatrix sppmi(const SparseMatrix& counts, double shift);

struct CategoryMatrix {
  SparseMatrix matrix;              // F x L
  std::vector<std::string> labels;  // column order, lexicographic
};

// Each category is one super-document made of its documents' tokens; entry
// tf(f, l) * ln(L / cf[f]) where cf counts categories containing f.
CategoryMatrix build_category_matrix(std::span<const TokenizedDocument> docs,
                                     const Vocabulary& vocab,
                                     const std::map<std::string, std::string>& doc_category);

}  // namespace topickg
