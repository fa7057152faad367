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
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "topickg/corpus.hpp"
#include "topickg/matrices.hpp"
#include "topickg/split.hpp"

namespace topickg {

struct HClustering {
  std::vector<int> assignment;        // one topic per column
  std::vector<Index> zero_columns;    // all-zero columns, assigned topic 0
};

// argmax of every H column; ties go to the smallest topic index.
HClustering h_cluster(const Eigen::MatrixXd& H);

struct Keyword {
  std::string token;
  double weight = 0.0;      // raw W value
  double normalized = 0.0;  // weight / L1 norm of the column

  bool operator==(const Keyword&) const = default;
};

// n largest entries of each W column, descending; ties toward the
// lexicographically smaller token. Zero entries are never reported.
std::vector<std::vector<Keyword>> top_keywords(const Eigen::MatrixXd& W,
                                               std::span<const std::string> tokens, int n);

struct VocabularyParams {
  std::size_t min_df = 2;
  // Node-relative lower bound: effective min_df = max(min_df, ceil(min_df_fraction * N)).
  double min_df_fraction = 0.0;
  double max_df_fraction = 0.8;
  // Documents with fewer in-vocabulary tokens are dropped (at least 1 is
  // always required).
  std::size_t min_tokens = 1;
};

// A set of documents with the matrices built from them.
struct NodeMatrices {
  Vocabulary vocab;
  std::vector<TokenizedDocument> docs;  // retained, original token order
  std::vector<std::string> dropped;     // doc_ids removed by token-count filtering
  SparseMatrix X;
  std::optional<SparseMatrix> S;
  std::optional<CategoryMatrix> C;
};

struct MatrixParams {
  VocabularyParams vocab;
  CooccurrenceConfig cooccurrence;
  bool semantic = true;  // build S
  bool category = true;  // build C (requires a category for every document)
};

// Builds the vocabulary, dropping short documents until none fall below the
// token threshold, then X and optionally S and C. Throws ArgumentError when
// the vocabulary or the document set empties.
NodeMatrices build_node_matrices(std::span<const TokenizedDocument> docs,
                                 const std::map<std::string, std::string>& doc_category,
                                 const MatrixParams& params);

struct ExpandPolicy {
  bool all = true;
  // Used when !all: node_id -> topic indices to expand.
  std::map<std::string, std::vector<int>> selected;

  bool expands(const std::string& node_id, int topic) const;
};

struct HierarchyParams {
  int max_depth = 1;
  std::size_t min_docs = 20;
  ExpandPolicy expand;
  MatrixParams matrices;
  int keywords = 50;
};

struct TopicNode {
  std::string node_id;  // "root", "root/3", "root/3/1", ...
  int depth = 0;
  int topic = -1;       // index of this node's topic in its parent
  std::vector<std::string> doc_ids;      // documents factorized at this node
  std::vector<std::string> dropped;      // documents removed by re-filtering
  std::vector<std::string> vocabulary;
  Eigen::MatrixXd W;                     // F x k
  Eigen::MatrixXd H;                     // k x |doc_ids|
  int k = 0;
  std::vector<int> assignment;           // topic per doc_ids entry
  std::vector<std::vector<Keyword>> keywords;
  std::string leaf_reason;               // set when the node could not be factorized
  std::vector<TopicNode> children;       // ordered by topic

  std::size_t topic_size(int t) const;
  const TopicNode* find(const std::string& node_id) const;
};

std::string child_id(const std::string& parent, int topic);

// Factorizes `docs` with the SPLIT pipeline, clusters documents by H and
// recurses into expanded topics until max_depth. Node seeds derive from the
// split master seed and the node id. With `checkpoint_dir`, each node's
// select_k results are cached under <dir>/<node_id>/.
TopicNode build_topic_tree(std::span<const TokenizedDocument> docs,
                           const std::map<std::string, std::string>& doc_category,
                           const HierarchyParams& params, const SplitParams& split_params,
                           const std::optional<std::filesystem::path>& checkpoint_dir = {});

// Directory mirror: one folder per node (named by the node path) holding
// W.tri, H.tri, vocabulary.txt, assignments.tsv, dropped.txt, node.tsv and
// keywords/topic_<i>.tsv (rank, token, raw, normalized).
void write_topic_tree(const std::filesystem::path& dir, const TopicNode& root);
TopicNode read_topic_tree(const std::filesystem::path& dir);

}  // namespace topickg
