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

// Brute-force reference implementations. They share no code with the
// library beyond the input types and use dense storage and direct loops.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "topickg/corpus.hpp"

namespace oracle {

using Dense = std::vector<std::vector<double>>;

inline Dense zeros(std::size_t r, std::size_t c) { return Dense(r, std::vector<double>(c, 0.0)); }

// Tokens with lo <= df <= frac * N, sorted.
inline std::vector<std::string> vocabulary(const std::vector<topickg::TokenizedDocument>& docs,
                                           std::size_t lo, double frac) {
  std::map<std::string, std::size_t> df;
  for (const auto& d : docs) {
    std::set<std::string> seen(d.tokens.begin(), d.tokens.end());
    for (const auto& t : seen) ++df[t];
  }
  std::vector<std::string> out;
  for (const auto& [t, n] : df)
    if (n >= lo && static_cast<double>(n) <= frac * static_cast<double>(docs.size())) out.push_back(t);
  return out;
}

inline long find(const std::vector<std::string>& vocab, const std::string& t) {
  for (std::size_t i = 0; i < vocab.size(); ++i)
    if (vocab[i] == t) return static_cast<long>(i);
  return -1;
}

inline Dense tfidf(const std::vector<topickg::TokenizedDocument>& docs,
                   const std::vector<std::string>& vocab) {
  const std::size_t F = vocab.size(), N = docs.size();
  Dense X = zeros(F, N);
  for (std::size_t f = 0; f < F; ++f) {
    std::size_t df = 0;
    for (const auto& d : docs) {
      bool present = false;
      for (const auto& t : d.tokens) present = present || t == vocab[f];
      df += present ? 1 : 0;
    }
    for (std::size_t n = 0; n < N; ++n) {
      std::size_t tf = 0;
      for (const auto& t : docs[n].tokens) tf += t == vocab[f] ? 1 : 0;
      if (tf > 0) X[f][n] = static_cast<double>(tf) * std::log(static_cast<double>(N) / static_cast<double>(df));
    }
  }
  return X;
}

inline Dense cooccurrence(const std::vector<topickg::TokenizedDocument>& docs,
                          const std::vector<std::string>& vocab, std::size_t window) {
  Dense C = zeros(vocab.size(), vocab.size());
  for (const auto& d : docs)
    for (std::size_t t = 0; t < d.tokens.size(); ++t)
      for (std::size_t u = t + 1; u < d.tokens.size() && u - t <= window; ++u) {
        const long a = find(vocab, d.tokens[t]);
        const long b = find(vocab, d.tokens[u]);
        if (a < 0 || b < 0) continue;
        C[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] += 1.0;
        C[static_cast<std::size_t>(b)][static_cast<std::size_t>(a)] += 1.0;
      }
  return C;
}

inline Dense sppmi(const Dense& C, double shift) {
  const std::size_t F = C.size();
  double total = 0.0;
  std::vector<double> row(F, 0.0);
  for (std::size_t i = 0; i < F; ++i)
    for (std::size_t j = 0; j < F; ++j) {
      total += C[i][j];
      row[i] += C[i][j];
    }
  Dense S = zeros(F, F);
  for (std::size_t i = 0; i < F; ++i)
    for (std::size_t j = 0; j < F; ++j) {
      if (C[i][j] <= 0.0) continue;
      const double pmi = std::log(C[i][j] * total / (row[i] * row[j]));
      S[i][j] = std::max(pmi - std::log(shift), 0.0);
    }
  return S;
}

struct CategoryResult {
  Dense matrix;
  std::vector<std::string> labels;
};

inline CategoryResult category(const std::vector<topickg::TokenizedDocument>& docs,
                               const std::vector<std::string>& vocab,
                               const std::map<std::string, std::string>& doc_category) {
  std::map<std::string, std::vector<std::string>> super_docs;
  for (const auto& d : docs) {
    auto& bag = super_docs[doc_category.at(d.doc_id)];
    bag.insert(bag.end(), d.tokens.begin(), d.tokens.end());
  }
  CategoryResult out;
  for (const auto& [label, bag] : super_docs) out.labels.push_back(label);
  const std::size_t L = out.labels.size();
  out.matrix = zeros(vocab.size(), L);
  for (std::size_t f = 0; f < vocab.size(); ++f) {
    std::vector<std::size_t> tf(L, 0);
    std::size_t cf = 0;
    for (std::size_t l = 0; l < L; ++l) {
      for (const auto& t : super_docs[out.labels[l]]) tf[l] += t == vocab[f] ? 1 : 0;
      cf += tf[l] > 0 ? 1 : 0;
    }
    for (std::size_t l = 0; l < L; ++l)
      if (tf[l] > 0)
        out.matrix[f][l] = static_cast<double>(tf[l]) * std::log(static_cast<double>(L) / static_cast<double>(cf));
  }
  return out;
}

// Expected graph content computed straight from the fixture files.
struct GraphCounts {
  std::map<std::string, std::size_t> nodes;  // by kind name
  std::map<std::string, std::size_t> edges;  // by kind name
  // (smaller doc id, larger doc id) -> number of shared entities
  std::map<std::pair<std::string, std::string>, std::size_t> shared;
};

inline std::vector<std::string> split_on(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    auto b = cur.find_first_not_of(" \t");
    auto e = cur.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(cur.substr(b, e - b + 1));
    cur.clear();
  };
  for (char c : s) {
    if (c == sep || (sep == ' ' && c == '\t')) flush();
    else cur.push_back(c);
  }
  flush();
  return out;
}

inline GraphCounts graph_counts(const std::string& corpus_path, const std::string& annotation_path,
                                const std::set<std::string>& node_docs, int k,
                                const std::vector<std::vector<std::string>>& keywords) {
  using nlohmann::json;
  GraphCounts g;
  std::set<std::string> authors, categories, doc_author, doc_cat;
  std::ifstream cin(corpus_path);
  std::string line;
  std::size_t docs = 0;
  while (std::getline(cin, line)) {
    if (line.empty()) continue;
    json rec = json::parse(line);
    const std::string id = rec["id"];
    if (!node_docs.count(id)) continue;
    ++docs;
    for (const auto& a : split_on(rec.value("authors", std::string()), ',')) {
      authors.insert(a);
      doc_author.insert(id + "\x1f" + a);
    }
    for (const auto& c : split_on(rec.value("categories", std::string()), ' ')) {
      categories.insert(c);
      doc_cat.insert(id + "\x1f" + c);
    }
  }
  const std::map<std::string, std::string> labels = {
      {"organization", "Organization"}, {"org", "Organization"}, {"event", "Event"},
      {"person", "Person"}, {"location", "Location"}, {"loc", "Location"},
      {"product", "Product"}, {"geopoliticalentity", "GeopoliticalEntity"},
      {"gpe", "GeopoliticalEntity"}};
  std::set<std::string> entities, mentions;
  std::map<std::string, std::set<std::string>> docs_of_entity;
  std::ifstream ain(annotation_path);
  while (std::getline(ain, line)) {
    if (line.empty()) continue;
    json rec = json::parse(line);
    std::string label = rec["label"];
    std::transform(label.begin(), label.end(), label.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (!labels.count(label)) continue;
    const std::string doc = rec["doc_id"];
    if (!node_docs.count(doc)) continue;
    std::string norm;
    for (const auto& w : split_on(rec["text"].get<std::string>(), ' ')) {
      if (!norm.empty()) norm += ' ';
      for (char c : w) norm += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    const std::string ent = labels.at(label) + "\x1f" + norm;
    entities.insert(ent);
    mentions.insert(doc + "\x1f" + ent);
    docs_of_entity[ent].insert(doc);
  }
  for (const auto& [ent, ds] : docs_of_entity)
    for (auto a = ds.begin(); a != ds.end(); ++a)
      for (auto b = std::next(a); b != ds.end(); ++b) ++g.shared[{"doc:" + *a, "doc:" + *b}];

  std::set<std::string> kw, kw_edges;
  for (std::size_t t = 0; t < keywords.size(); ++t)
    for (const auto& w : keywords[t]) {
      kw.insert(w);
      kw_edges.insert(w + "\x1f" + std::to_string(t));
    }
  g.nodes = {{"Document", docs},           {"Topic", static_cast<std::size_t>(k)},
             {"Keyword", kw.size()},       {"Entity", entities.size()},
             {"Category", categories.size()}, {"Author", authors.size()}};
  g.edges = {{"HAS_TOPIC", docs},
             {"HAS_KEYWORD", kw_edges.size()},
             {"MENTIONS", mentions.size()},
             {"IN_CATEGORY", doc_cat.size()},
             {"AUTHORED_BY", doc_author.size()},
             {"SHARES_ENTITY", g.shared.size()}};
  return g;
}

}  // namespace oracle
