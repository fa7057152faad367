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

#include <fstream>
#include <set>

#include "doctest.h"
#include "support.hpp"
#include "topickg/corpus.hpp"
#include "topickg/error.hpp"

using namespace topickg;
using testing::TempDir;

namespace {

std::filesystem::path write_file(const TempDir& dir, const std::string& name,
                                 const std::string& content) {
  auto p = dir.path() / name;
  std::ofstream(p) << content;
  return p;
}

std::vector<TokenizedDocument> docs_of(std::vector<std::vector<std::string>> tokens) {
  std::vector<TokenizedDocument> out;
  for (std::size_t i = 0; i < tokens.size(); ++i)
    out.push_back({"d" + std::to_string(i), std::move(tokens[i])});
  return out;
}

}  // namespace

TEST_CASE("load_corpus: empty file gives no records") {
  TempDir dir("corpus");
  CHECK(load_corpus(write_file(dir, "c.jsonl", "")).empty());
}

TEST_CASE("load_corpus: records in file order with mapped fields") {
  TempDir dir("corpus");
  auto p = write_file(dir, "c.jsonl",
                      R"({"id":"a","title":"T1","abstract":"one","categories":"cs.LG stat.ML","authors":"X Y, Z W","year":2020,"doi":"10.1/a"})"
                      "\n\n"
                      R"({"id":"b","title":"T2","abstract":"two","categories":["q-bio"],"authors":["Q"],"venue":"J"})"
                      "\n"
                      R"({"id":"c","abstract":"three"})"
                      "\n");
  auto docs = load_corpus(p);
  REQUIRE(docs.size() == 3);
  CHECK(docs[0].doc_id == "a");
  CHECK(docs[1].doc_id == "b");
  CHECK(docs[2].doc_id == "c");
  CHECK(docs[0].categories == std::vector<std::string>{"cs.LG", "stat.ML"});
  CHECK(docs[0].primary_category == "cs.LG");
  CHECK(docs[0].authors == std::vector<std::string>{"X Y", "Z W"});
  CHECK(docs[0].year == 2020);
  CHECK(docs[0].doi == "10.1/a");
  CHECK(docs[1].authors == std::vector<std::string>{"Q"});
  CHECK(docs[1].extra.at("venue") == "J");
  CHECK_FALSE(docs[2].year.has_value());
  CHECK(docs[2].primary_category.empty());
}

TEST_CASE("load_corpus: custom field mapping") {
  TempDir dir("corpus");
  auto p = write_file(dir, "c.jsonl", R"({"key":"k1","text":"body text","label":"x"})" "\n");
  FieldMapping f;
  f.id = "key";
  f.body = "text";
  f.categories = "label";
  auto docs = load_corpus(p, f);
  REQUIRE(docs.size() == 1);
  CHECK(docs[0].doc_id == "k1");
  CHECK(docs[0].body == "body text");
  CHECK(docs[0].primary_category == "x");
}

TEST_CASE("load_corpus: duplicate id names both lines") {
  TempDir dir("corpus");
  auto p = write_file(dir, "c.jsonl",
                      R"({"id":"d1","abstract":"x"})" "\n" R"({"id":"d2","abstract":"y"})" "\n"
                      R"({"id":"d1","abstract":"z"})" "\n");
  try {
    load_corpus(p);
    FAIL("expected an error");
  } catch (const InputError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("d1") != std::string::npos);
    CHECK(msg.find('1') != std::string::npos);
    CHECK(msg.find('3') != std::string::npos);
  }
}

TEST_CASE("load_corpus: malformed line reports its number") {
  TempDir dir("corpus");
  auto p = write_file(dir, "c.jsonl", R"({"id":"d1","abstract":"x"})" "\n{not json\n");
  try {
    load_corpus(p);
    FAIL("expected an error");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find(":2") != std::string::npos);
  }
}

TEST_CASE("load_corpus: records without id or body are rejected and counted") {
  TempDir dir("corpus");
  auto p = write_file(dir, "c.jsonl",
                      R"({"id":"d1","abstract":"x"})" "\n" R"({"abstract":"no id"})" "\n"
                      R"({"id":"d3"})" "\n");
  LoadReport report;
  auto docs = load_corpus(p, {}, &report);
  CHECK(docs.size() == 1);
  CHECK(report.rejected == 2);
}

TEST_CASE("load_corpus: unreadable path") {
  CHECK_THROWS_AS(load_corpus("/nonexistent/corpus.jsonl"), InputError);
}

TEST_CASE("clean_text: examples") {
  CleaningConfig cfg;
  CHECK(clean_text("", cfg).empty());

  cfg.stop_phrases = {"All rights reserved."};
  CHECK(clean_text("Deep-Learning attacks. All rights reserved.", cfg) ==
        std::vector<std::string>{"deeplearning", "attacks"});

  CleaningConfig sw;
  sw.stopwords = {"the"};
  CHECK(clean_text("the THE The", sw).empty());
}

TEST_CASE("clean_text: markup, emails, LaTeX, non-ASCII and symbols") {
  CleaningConfig cfg;
  auto toks = clean_text("See <b>bold</b> mail me@x.org \\alpha caf\xc3\xa9 x=y+z a", cfg);
  CHECK(toks == std::vector<std::string>{"see", "bold", "mail", "caf"});
}

TEST_CASE("clean_text: hyphen handling") {
  CleaningConfig cfg;
  CHECK(clean_text("state-of-the-art -leading trailing- a--b", cfg) ==
        std::vector<std::string>{"stateoftheart", "leading", "trailing", "ab"});
  cfg.join_hyphens = false;
  CHECK(clean_text("state-of-the-art", cfg) ==
        std::vector<std::string>{"state", "of", "the", "art"});
}

TEST_CASE("clean_text: lemma map applies before stopword removal") {
  CleaningConfig cfg;
  cfg.lemma_map = std::unordered_map<std::string, std::string>{{"networks", "network"}, {"thee", "the"}};
  cfg.stopwords = {"the"};
  CHECK(clean_text("Networks thee", cfg) == std::vector<std::string>{"network"});
}

TEST_CASE("clean_text: lowercase can be disabled") {
  CleaningConfig cfg;
  cfg.lowercase = false;
  CHECK(clean_text("Gene Expression", cfg) == std::vector<std::string>{"Gene", "Expression"});
}

TEST_CASE("clean_text: idempotent on the fixture corpus") {
  const auto cfg = testing::fixture_cleaning();
  for (const auto& d : load_corpus(testing::data_path("corpus20.jsonl"))) {
    const auto once = clean_text(d.title + "\n" + d.body, cfg);
    std::string joined;
    for (const auto& t : once) joined += t + " ";
    CHECK(clean_text(joined, cfg) == once);
    for (const auto& t : once) {
      CHECK(t.size() > 1);
      CHECK_FALSE(cfg.stopwords.contains(t));
    }
  }
}

TEST_CASE("build_vocabulary: examples") {
  auto docs = docs_of({{"a", "b"}, {"a", "c"}, {"a"}});
  try {
    build_vocabulary(docs, 2, 0.8);
    FAIL("expected an empty-vocabulary error");
  } catch (const ArgumentError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("min_df") != std::string::npos);
  }

  auto vr = build_vocabulary(docs, 1, 1.0);
  CHECK(vr.vocab.tokens == std::vector<std::string>{"a", "b", "c"});
  CHECK(vr.vocab.df == std::vector<std::size_t>{3, 1, 1});

  auto single = build_vocabulary(docs_of({{"x", "x", "y"}}), 1, 1.0);
  CHECK(single.vocab.tokens == std::vector<std::string>{"x", "y"});
  CHECK(single.vocab.df == std::vector<std::size_t>{1, 1});
}

TEST_CASE("build_vocabulary: index inverts tokens and df recounts") {
  auto raw = load_corpus(testing::data_path("corpus20.jsonl"));
  auto docs = clean_corpus(raw, testing::fixture_cleaning());
  auto vr = build_vocabulary(docs, 2, 0.8);
  const auto& v = vr.vocab;
  REQUIRE(v.size() > 0);
  CHECK(std::is_sorted(v.tokens.begin(), v.tokens.end()));
  for (std::size_t i = 0; i < v.size(); ++i) {
    CHECK(v.index.at(v.tokens[i]) == i);
    std::size_t df = 0;
    for (const auto& d : docs)
      df += std::find(d.tokens.begin(), d.tokens.end(), v.tokens[i]) != d.tokens.end() ? 1 : 0;
    CHECK(v.df[i] == df);
    CHECK(df >= 2);
    CHECK(static_cast<double>(df) <= 0.8 * static_cast<double>(docs.size()));
  }
  CHECK(v.index.size() == v.size());
}

TEST_CASE("build_vocabulary: retention is monotone in both thresholds") {
  auto raw = load_corpus(testing::data_path("corpus20.jsonl"));
  auto docs = clean_corpus(raw, testing::fixture_cleaning());
  auto as_set = [](const Vocabulary& v) { return std::set<std::string>(v.tokens.begin(), v.tokens.end()); };
  for (std::size_t lo = 1; lo < 5; ++lo)
    for (double frac : {1.0, 0.8, 0.5, 0.3}) {
      auto base = as_set(build_vocabulary(docs, lo, frac).vocab);
      auto higher = as_set(build_vocabulary(docs, lo + 1, frac).vocab);
      auto lower_frac = as_set(build_vocabulary(docs, lo, frac * 0.7).vocab);
      CHECK(std::includes(base.begin(), base.end(), higher.begin(), higher.end()));
      CHECK(std::includes(base.begin(), base.end(), lower_frac.begin(), lower_frac.end()));
    }
}

TEST_CASE("build_vocabulary: short documents are flagged") {
  auto docs = docs_of({{"a", "b", "a"}, {"a"}, {"b", "zz"}});
  auto vr = build_vocabulary(docs, 2, 1.0, 2);
  CHECK(vr.excluded == std::vector<std::size_t>{1, 2});
}

TEST_CASE("build_vocabulary: argument checks") {
  CHECK_THROWS_AS(build_vocabulary(docs_of({{"a"}}), 0, 1.0), ArgumentError);
  CHECK_THROWS_AS(build_vocabulary(docs_of({{"a"}}), 1, 0.0), ArgumentError);
  CHECK_THROWS_AS(build_vocabulary({}, 1, 1.0), ArgumentError);
}

TEST_CASE("stopword and lemma files") {
  auto sw = load_stopwords(testing::data_path("stopwords.txt"));
  CHECK(sw.contains("the"));
  auto lm = load_lemma_map(testing::data_path("lemmas.tsv"));
  CHECK(lm.at("networks") == "network");
  TempDir dir("corpus");
  CHECK_THROWS_AS(load_lemma_map(write_file(dir, "bad.tsv", "onlyone\n")), InputError);
}

TEST_CASE("restrict_to_vocabulary keeps order") {
  auto v = Vocabulary::from_tokens({"a", "c"}, {1, 1});
  auto d = restrict_to_vocabulary({"x", {"c", "b", "a", "c"}}, v);
  CHECK(d.tokens == std::vector<std::string>{"c", "a", "c"});
}
