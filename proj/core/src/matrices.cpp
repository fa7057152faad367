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

#include "topickg/matrices.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>
#include <unordered_map>

#include "topickg/error.hpp"

namespace topickg {

namespace {

std::vector<Index> to_ids(const TokenizedDocument& doc, const Vocabulary& vocab) {
  std::vector<Index> ids;
  ids.reserve(doc.tokens.size());
  for (const auto& t : doc.tokens) {
    auto it = vocab.index.find(t);
    ids.push_back(it == vocab.index.end() ? -1 : static_cast<Index>(it->second));
  }
  return ids;
}

}  // namespace

SparseMatrix build_tfidf(std::span<const TokenizedDocument> docs, const Vocabulary& vocab) {
  if (vocab.size() == 0) throw ArgumentError("build_tfidf: empty vocabulary");
  if (docs.empty()) throw ArgumentError("build_tfidf: no documents");
  const auto n_docs = static_cast<double>(docs.size());
  const auto F = static_cast<Index>(vocab.size());

  // df is counted over `docs`, so idf stays relative to the matrix's own columns.
  std::vector<std::size_t> df(vocab.size(), 0);
  for (const auto& doc : docs) {
    auto ids = to_ids(doc, vocab);
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    for (Index id : ids)
      if (id >= 0) ++df[static_cast<std::size_t>(id)];
  }
  std::vector<double> idf(vocab.size(), 0.0);
  for (std::size_t f = 0; f < vocab.size(); ++f)
    if (df[f] > 0) idf[f] = std::log(n_docs / static_cast<double>(df[f]));

  std::vector<Triplet> t;
  for (std::size_t n = 0; n < docs.size(); ++n) {
    std::map<Index, int> tf;
    for (Index id : to_ids(docs[n], vocab))
      if (id >= 0) ++tf[id];
    for (auto [f, count] : tf) {
      double v = count * idf[static_cast<std::size_t>(f)];
      if (v > 0.0) t.push_back({f, static_cast<Index>(n), v});
    }
  }
  return SparseMatrix::from_triplets(F, static_cast<Index>(docs.size()), std::move(t));
}

SparseMatrix build_cooccurrence(std::span<const TokenizedDocument> docs, const Vocabulary& vocab,
                                int window) {
  if (window < 1) throw ArgumentError("co-occurrence window must be >= 1");
  const auto F = static_cast<Index>(vocab.size());
  std::unordered_map<std::uint64_t, double> counts;
  auto key = [F](Index a, Index b) {
    return static_cast<std::uint64_t>(a) * static_cast<std::uint64_t>(F) +
           static_cast<std::uint64_t>(b);
  };
  for (const auto& doc : docs) {
    auto ids = to_ids(doc, vocab);
    const auto len = ids.size();
    for (std::size_t t = 0; t < len; ++t) {
      if (ids[t] < 0) continue;
      const std::size_t stop = std::min(len, t + static_cast<std::size_t>(window) + 1);
      for (std::size_t u = t + 1; u < stop; ++u) {
        if (ids[u] < 0) continue;
        counts[key(ids[t], ids[u])] += 1.0;
        counts[key(ids[u], ids[t])] += 1.0;
      }
    }
  }
  std::vector<Triplet> t;
  t.reserve(counts.size());
  for (auto [k, v] : counts)
    t.push_back({static_cast<Index>(k / static_cast<std::uint64_t>(F)),
                 static_cast<Index>(k % static_cast<std::uint64_t>(F)), v});
  return SparseMatrix::from_triplets(F, F, std::move(t));
}

SparseMatrix sppmi(const SparseMatrix& counts, double shift) {
  if (!(shift >= 1.0)) throw ArgumentError("SPPMI shift must be >= 1");
  if (counts.rows() != counts.cols()) throw ArgumentError("SPPMI needs a square count matrix");
  const double total = counts.sum();
  if (!(total > 0.0)) throw ArgumentError("SPPMI of an all-zero count matrix");

  // Row sums equal column sums for symmetric input; use row sums as stated.
  std::vector<double> row(static_cast<std::size_t>(counts.rows()), 0.0);
  for (Index c = 0; c < counts.cols(); ++c) {
    auto rows = counts.col_rows(c);
    auto vals = counts.col_values(c);
    for (std::size_t p = 0; p < rows.size(); ++p) row[static_cast<std::size_t>(rows[p])] += vals[p];
  }
  const double log_shift = std::log(shift);
  std::vector<Triplet> t;
  for (Index c = 0; c < counts.cols(); ++c) {
    auto rows = counts.col_rows(c);
    auto vals = counts.col_values(c);
    for (std::size_t p = 0; p < rows.size(); ++p) {
      auto i = static_cast<std::size_t>(rows[p]);
      double pmi = std::log(vals[p] * total / (row[i] * row[static_cast<std::size_t>(c)]));
      double v = pmi - log_shift;
      if (v > 0.0) t.push_back({rows[p], c, v});
    }
  }
  return SparseMatrix::from_triplets(counts.rows(), counts.cols(), std::move(t));
}

CategoryMatrix build_category_matrix(std::span<const TokenizedDocument> docs,
                                     const Vocabulary& vocab,
                                     const std::map<std::string, std::string>& doc_category) {
  std::set<std::string> label_set;
  for (const auto& d : docs) {
    auto it = doc_category.find(d.doc_id);
    if (it == doc_category.end() || it->second.empty())
      throw ArgumentError("document '" + d.doc_id + "' has no category");
    label_set.insert(it->second);
  }
  CategoryMatrix out;
  out.labels.assign(label_set.begin(), label_set.end());
  const auto F = static_cast<Index>(vocab.size());
  const auto L = static_cast<Index>(out.labels.size());
  if (L == 0) {
    out.matrix = SparseMatrix(F, 0);
    return out;
  }
  std::map<std::string, Index> label_index;
  for (Index l = 0; l < L; ++l) label_index[out.labels[static_cast<std::size_t>(l)]] = l;

  std::vector<std::map<Index, double>> tf(static_cast<std::size_t>(L));
  for (const auto& d : docs) {
    auto l = label_index.at(doc_category.at(d.doc_id));
    for (Index id : to_ids(d, vocab))
      if (id >= 0) tf[static_cast<std::size_t>(l)][id] += 1.0;
  }
  std::vector<double> cf(vocab.size(), 0.0);
  for (const auto& col : tf)
    for (const auto& [f, count] : col) cf[static_cast<std::size_t>(f)] += 1.0;

  std::vector<Triplet> t;
  for (Index l = 0; l < L; ++l) {
    for (const auto& [f, count] : tf[static_cast<std::size_t>(l)]) {
      double v = count * std::log(static_cast<double>(L) / cf[static_cast<std::size_t>(f)]);
      if (v > 0.0) t.push_back({f, l, v});
    }
  }
  out.matrix = SparseMatrix::from_triplets(F, L, std::move(t));
  return out;
}

}  // namespace topickg
