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

#include "topickg/hierarchy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

#include "topickg/error.hpp"
#include "topickg/log.hpp"
#include "topickg/random.hpp"

namespace topickg {

HClustering h_cluster(const Eigen::MatrixXd& H) {
  HClustering out;
  out.assignment.assign(static_cast<std::size_t>(H.cols()), 0);
  if (H.rows() < 1) throw ArgumentError("h_cluster: H has no rows");
  for (Index j = 0; j < H.cols(); ++j) {
    int best = 0;
    double best_v = H(0, j);
    for (Index i = 1; i < H.rows(); ++i)
      if (H(i, j) > best_v) {
        best_v = H(i, j);
        best = static_cast<int>(i);
      }
    if (!(best_v > 0.0)) out.zero_columns.push_back(j);
    out.assignment[static_cast<std::size_t>(j)] = best;
  }
  if (!out.zero_columns.empty())
    log_warning(std::to_string(out.zero_columns.size()) +
                " all-zero H column(s) assigned to topic 0");
  return out;
}

std::vector<std::vector<Keyword>> top_keywords(const Eigen::MatrixXd& W,
                                               std::span<const std::string> tokens, int n) {
  if (n < 1) throw ArgumentError("top_keywords: n must be >= 1");
  if (static_cast<std::size_t>(W.rows()) != tokens.size())
    throw ArgumentError("top_keywords: W row count does not match the vocabulary");
  std::vector<std::vector<Keyword>> out(static_cast<std::size_t>(W.cols()));
  for (Index c = 0; c < W.cols(); ++c) {
    const double l1 = W.col(c).cwiseAbs().sum();
    if (!(l1 > 0.0)) {
      log_warning("top_keywords: column " + std::to_string(c) + " is zero");
      continue;
    }
    std::vector<Index> idx;
    for (Index r = 0; r < W.rows(); ++r)
      if (W(r, c) > 0.0) idx.push_back(r);
    auto cmp = [&](Index a, Index b) {
      if (W(a, c) != W(b, c)) return W(a, c) > W(b, c);
      return tokens[static_cast<std::size_t>(a)] < tokens[static_cast<std::size_t>(b)];
    };
    const auto take = std::min(idx.size(), static_cast<std::size_t>(n));
    std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(take), idx.end(), cmp);
    auto& list = out[static_cast<std::size_t>(c)];
    for (std::size_t i = 0; i < take; ++i)
      list.push_back({tokens[static_cast<std::size_t>(idx[i])], W(idx[i], c), W(idx[i], c) / l1});
  }
  return out;
}

NodeMatrices build_node_matrices(std::span<const TokenizedDocument> docs,
                                 const std::map<std::string, std::string>& doc_category,
                                 const MatrixParams& params) {
  const auto& vp = params.vocab;
  NodeMatrices nm;
  nm.docs.assign(docs.begin(), docs.end());
  const std::size_t min_tokens = std::max<std::size_t>(vp.min_tokens, 1);
  while (true) {
    if (nm.docs.empty()) throw ArgumentError("no documents left after token-count filtering");
    const auto n = static_cast<double>(nm.docs.size());
    const auto min_df = std::max<std::size_t>(
        vp.min_df, static_cast<std::size_t>(std::ceil(vp.min_df_fraction * n - 1e-9)));
    auto vr = build_vocabulary(nm.docs, std::max<std::size_t>(min_df, 1), vp.max_df_fraction,
                               min_tokens);
    if (vr.excluded.empty()) {
      nm.vocab = std::move(vr.vocab);
      break;
    }
    std::unordered_set<std::size_t> drop(vr.excluded.begin(), vr.excluded.end());
    std::vector<TokenizedDocument> kept;
    for (std::size_t i = 0; i < nm.docs.size(); ++i) {
      if (drop.contains(i)) {
        nm.dropped.push_back(nm.docs[i].doc_id);
      } else {
        kept.push_back(std::move(nm.docs[i]));
      }
    }
    nm.docs = std::move(kept);
  }

  nm.X = build_tfidf(nm.docs, nm.vocab);
  if (params.semantic) {
    SparseMatrix counts = build_cooccurrence(nm.docs, nm.vocab, params.cooccurrence.window);
    const auto F = static_cast<Index>(nm.vocab.size());
    nm.S = counts.nnz() > 0 ? sppmi(counts, params.cooccurrence.shift) : SparseMatrix(F, F);
  }
  if (params.category) nm.C = build_category_matrix(nm.docs, nm.vocab, doc_category);
  return nm;
}

bool ExpandPolicy::expands(const std::string& node_id, int topic) const {
  if (all) return true;
  auto it = selected.find(node_id);
  if (it == selected.end()) return false;
  return std::find(it->second.begin(), it->second.end(), topic) != it->second.end();
}

std::size_t TopicNode::topic_size(int t) const {
  return static_cast<std::size_t>(std::count(assignment.begin(), assignment.end(), t));
}

const TopicNode* TopicNode::find(const std::string& id) const {
  if (id == node_id) return this;
  for (const auto& c : children)
    if (id.starts_with(c.node_id))
      if (auto* hit = c.find(id)) return hit;
  return nullptr;
}

std::string child_id(const std::string& parent, int topic) {
  return parent + "/" + std::to_string(topic);
}

namespace {

struct TreeBuilder {
  const std::map<std::string, std::string>& doc_category;
  const HierarchyParams& params;
  const SplitParams& split_params;
  const std::optional<std::filesystem::path>& checkpoint_dir;

  TopicNode build(std::vector<TokenizedDocument> docs, const std::string& id, int depth,
                  int topic) const {
    TopicNode node;
    node.node_id = id;
    node.depth = depth;
    node.topic = topic;

    NodeMatrices nm;
    try {
      nm = build_node_matrices(docs, doc_category, params.matrices);
    } catch (const ArgumentError& e) {
      for (const auto& d : docs) node.doc_ids.push_back(d.doc_id);
      node.leaf_reason = e.what();
      log_warning("node " + id + " left unfactorized: " + node.leaf_reason);
      return node;
    }
    for (const auto& d : nm.docs) node.doc_ids.push_back(d.doc_id);
    node.dropped = nm.dropped;
    node.vocabulary = nm.vocab.tokens;
    if (nm.X.nnz() == 0) {
      node.leaf_reason = "tf-idf matrix has no entries";
      log_warning("node " + id + " left unfactorized: " + node.leaf_reason);
      return node;
    }

    SplitParams sp = split_params;
    sp.nmfk.master_seed = derive_seed({split_params.nmfk.master_seed, seed_from_string(id)});
    std::optional<std::filesystem::path> ckpt;
    if (checkpoint_dir) ckpt = *checkpoint_dir / id;
    const SparseMatrix* S = nm.S ? &*nm.S : nullptr;
    const SparseMatrix* C = nm.C ? &nm.C->matrix : nullptr;
    SplitResult res = split_factorize(nm.X, S, C, sp, ckpt);

    node.W = res.W();
    node.H = res.H();
    node.k = static_cast<int>(node.W.cols());
    node.assignment = h_cluster(node.H).assignment;
    node.keywords = top_keywords(node.W, node.vocabulary, params.keywords);

    if (depth >= params.max_depth) return node;
    for (int t = 0; t < node.k; ++t) {
      if (!params.expand.expands(id, t)) continue;
      if (node.topic_size(t) < params.min_docs) continue;
      std::vector<TokenizedDocument> sub;
      for (std::size_t j = 0; j < nm.docs.size(); ++j)
        if (node.assignment[j] == t) sub.push_back(nm.docs[j]);
      node.children.push_back(build(std::move(sub), child_id(id, t), depth + 1, t));
    }
    return node;
  }
};

}  // namespace

TopicNode build_topic_tree(std::span<const TokenizedDocument> docs,
                           const std::map<std::string, std::string>& doc_category,
                           const HierarchyParams& params, const SplitParams& split_params,
                           const std::optional<std::filesystem::path>& checkpoint_dir) {
  if (docs.empty()) throw ArgumentError("build_topic_tree: empty corpus");
  if (params.max_depth < 0) throw ArgumentError("max_depth must be >= 0");
  if (params.min_docs < 1) throw ArgumentError("min_docs must be >= 1");
  TreeBuilder builder{doc_category, params, split_params, checkpoint_dir};
  return builder.build({docs.begin(), docs.end()}, "root", 0, -1);
}

}  // namespace topickg
