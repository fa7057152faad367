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

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace topickg {

// One corpus document with its observable metadata.
struct DocumentRecord {
  std::string doc_id;
  std::string title;
  std::string body;
  std::vector<std::string> authors;
  std::string primary_category;
  std::vector<std::string> categories;
  std::optional<int> year;
  std::optional<std::string> doi;
  std::map<std::string, std::string> extra;

  bool operator==(const DocumentRecord&) const = default;
};

// Names of the JSON fields holding each DocumentRecord attribute.
// `categories` may be a string or an array; the first entry is the primary
// category unless `primary_category` names a field of its own.
struct FieldMapping {
  std::string id = "id";
  std::string title = "title";
  std::string body = "abstract";
  std::string authors = "authors";
  std::string categories = "categories";
  std::string primary_category;  // empty: first of `categories`
  std::string year = "year";
  std::string doi = "doi";
};

struct CleaningConfig {
  std::unordered_set<std::string> stopwords;
  std::vector<std::string> stop_phrases;
  std::size_t min_tokens = 0;
  bool join_hyphens = true;
  bool lowercase = true;
  bool strip_non_ascii = true;
  std::optional<std::unordered_map<std::string, std::string>> lemma_map;
};

struct TokenizedDocument {
  std::string doc_id;
  std::vector<std::string> tokens;

  bool operator==(const TokenizedDocument&) const = default;
};

struct Vocabulary {
  std::vector<std::string> tokens;
  std::unordered_map<std::string, std::size_t> index;
  std::vector<std::size_t> df;

  std::size_t size() const { return tokens.size(); }
  std::optional<std::size_t> find(const std::string& token) const;

  // Builds the index from `tokens`. `df` must already be aligned.
  static Vocabulary from_tokens(std::vector<std::string> tokens, std::vector<std::size_t> df);
};

struct VocabularyResult {
  Vocabulary vocab;
  // Positions (into the input document list) of documents left with fewer
  // than `min_tokens` in-vocabulary tokens.
  std::vector<std::size_t> excluded;
};

struct LoadReport {
  std::size_t lines = 0;
  std::size_t rejected = 0;  // records without an id or a body
};

// Reads line-delimited JSON records. Blank lines are ignored; records missing
// the id or body field are rejected and counted in `report`.
std::vector<DocumentRecord> load_corpus(const std::filesystem::path& path,
                                        const FieldMapping& fields = {},
                                        LoadReport* report = nullptr);

// Runs the cleaning pipeline in its fixed order: stop phrases, markup and
// symbol stripping, case folding, hyphen joining, whitespace split, lemma
// map, then stopword and single-character removal.
std::vector<std::string> clean_text(std::string_view raw, const CleaningConfig& cfg);

std::vector<TokenizedDocument> clean_corpus(std::span<const DocumentRecord> docs,
                                            const CleaningConfig& cfg);

// Keeps tokens with min_df <= df <= max_df_fraction * N, sorted
// lexicographically. Throws ArgumentError when nothing survives.
VocabularyResult build_vocabulary(std::span<const TokenizedDocument> docs, std::size_t min_df,
                                  double max_df_fraction, std::size_t min_tokens = 0);

// Drops tokens that are not in `vocab`, preserving order.
TokenizedDocument restrict_to_vocabulary(const TokenizedDocument& doc, const Vocabulary& vocab);

std::unordered_set<std::string> load_stopwords(const std::filesystem::path& path);
std::unordered_map<std::string, std::string> load_lemma_map(const std::filesystem::path& path);

}  // namespace topickg
