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

#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "support.hpp"
#include "topickg/error.hpp"
#include "topickg/matrices.hpp"

using namespace topickg;

namespace {

std::vector<TokenizedDocument> docs_of(std::vector<std::vector<std::string>> tokens) {
  std::vector<TokenizedDocument> out;
  for (std::size_t i = 0; i < tokens.size(); ++i)
    out.push_back({"d" + std::to_string(i + 1), std::move(tokens[i])});
  return out;
}

Vocabulary vocab_of(std::vector<std::string> tokens) {
  std::vector<std::size_t> df(tokens.size(), 1);
  return Vocabulary::from_tokens(std::move(tokens), std::move(df));
}

// Fixture corpus with the real df counts.
struct Fixture {
  std::vector<TokenizedDocument> docs;
  Vocabulary vocab;
  std::vector<std::string> oracle_vocab;
};

Fixture fixture() {
  Fixture f;
  f.docs = clean_corpus(load_corpus(testing::data_path("corpus20.jsonl")), testing::fixture_cleaning());
  f.vocab = build_vocabulary(f.docs, 2, 0.8).vocab;
  f.oracle_vocab = oracle::vocabulary(f.docs, 2, 0.8);
  return f;
}

void check_equal(const SparseMatrix& m, const oracle::Dense& d, double tol) {
  REQUIRE(static_cast<std::size_t>(m.rows()) == d.size());
  for (Index r = 0; r < m.rows(); ++r)
    for (Index c = 0; c < m.cols(); ++c) {
      const double want = d[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
      const double got = m.coeff(r, c);
      if (tol == 0.0) REQUIRE(got == want);
      else REQUIRE(std::abs(got - want) <= tol * std::max(1.0, std::abs(want)));
    }
}

}  // namespace

TEST_CASE("build_tfidf: examples") {
  auto X = build_tfidf(docs_of({{"a", "a", "b"}, {"b", "c"}}), vocab_of({"a", "b", "c"}));
  CHECK(X.rows() == 3);
  CHECK(X.cols() == 2);
  CHECK(X.coeff(0, 0) == doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-15));
  CHECK(X.coeff(2, 1) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(X.coeff(1, 0) == 0.0);
  CHECK(X.coeff(1, 1) == 0.0);
  CHECK(X.nnz() == 2);

  auto single = build_tfidf(docs_of({{"a"}}), vocab_of({"a"}));
  CHECK(single.rows() == 1);
  CHECK(single.cols() == 1);
  CHECK(single.nnz() == 0);
}

TEST_CASE("build_tfidf: matches brute force and entry pattern on the fixture") {
  auto f = fixture();
  REQUIRE(f.vocab.tokens == f.oracle_vocab);
  auto X = build_tfidf(f.docs, f.vocab);
  check_equal(X, oracle::tfidf(f.docs, f.oracle_vocab), 1e-12);
  const auto N = f.docs.size();
  for (std::size_t t = 0; t < f.vocab.size(); ++t)
    for (std::size_t n = 0; n < N; ++n) {
      const auto& toks = f.docs[n].tokens;
      const bool occurs = std::find(toks.begin(), toks.end(), f.vocab.tokens[t]) != toks.end();
      CHECK((X.coeff(static_cast<Index>(t), static_cast<Index>(n)) > 0.0) ==
            (occurs && f.vocab.df[t] < N));
    }
}

TEST_CASE("build_cooccurrence: examples") {
  auto v = vocab_of({"a", "b"});
  auto c1 = build_cooccurrence(docs_of({{"a", "b"}}), v, 1);
  CHECK(c1.coeff(0, 1) == 1.0);
  CHECK(c1.coeff(1, 0) == 1.0);
  CHECK(c1.nnz() == 2);

  auto c2 = build_cooccurrence(docs_of({{"a", "b", "a"}}), v, 2);
  CHECK(c2.coeff(0, 1) == 2.0);
  CHECK(c2.coeff(1, 0) == 2.0);
  CHECK(c2.coeff(0, 0) == 2.0);
  CHECK(c2.coeff(1, 1) == 0.0);

  CHECK(build_cooccurrence(docs_of({{"a"}, {"b"}}), v, 5).nnz() == 0);
  CHECK_THROWS_AS(build_cooccurrence(docs_of({{"a"}}), v, 0), ArgumentError);
}

TEST_CASE("build_cooccurrence: out-of-vocabulary tokens keep their position") {
  auto v = vocab_of({"a", "b"});
  auto c = build_cooccurrence(docs_of({{"a", "zz", "b"}}), v, 1);
  CHECK(c.nnz() == 0);
  auto c2 = build_cooccurrence(docs_of({{"a", "zz", "b"}}), v, 2);
  CHECK(c2.coeff(0, 1) == 1.0);
}

TEST_CASE("build_cooccurrence: matches the brute-force double loop exactly") {
  auto f = fixture();
  for (int w : {1, 3, 10, 100}) {
    auto C = build_cooccurrence(f.docs, f.vocab, w);
    CHECK(C.is_symmetric());
    check_equal(C, oracle::cooccurrence(f.docs, f.oracle_vocab, static_cast<std::size_t>(w)), 0.0);
  }
}

TEST_CASE("sppmi: examples") {
  auto counts = SparseMatrix::from_triplets(2, 2, {{0, 1, 2.0}, {1, 0, 2.0}});
  auto s1 = sppmi(counts, 1.0);
  CHECK(s1.coeff(0, 1) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(s1.coeff(1, 0) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(sppmi(counts, 4.0).nnz() == 0);
  CHECK_THROWS_AS(sppmi(SparseMatrix(2, 2), 1.0), ArgumentError);
  CHECK_THROWS_AS(sppmi(counts, 0.5), ArgumentError);
}

TEST_CASE("sppmi: brute force, symmetry and monotonicity in shift") {
  auto f = fixture();
  auto C = build_cooccurrence(f.docs, f.vocab, 100);
  auto dense = oracle::cooccurrence(f.docs, f.oracle_vocab, 100);
  SparseMatrix prev;
  bool first = true;
  for (double s : {1.0, 1.5, 2.0, 4.0, 8.0}) {
    auto S = sppmi(C, s);
    check_equal(S, oracle::sppmi(dense, s), 1e-12);
    CHECK(S.is_symmetric());
    if (!first)
      for (const auto& t : S.triplets()) CHECK(t.value <= prev.coeff(t.row, t.col));
    prev = S;
    first = false;
  }
}

TEST_CASE("build_category_matrix: examples") {
  auto v = vocab_of({"a", "b"});
  auto one = build_category_matrix(docs_of({{"a"}, {"a"}}), v, {{"d1", "cs.CR"}, {"d2", "cs.CR"}});
  CHECK(one.labels == std::vector<std::string>{"cs.CR"});
  CHECK(one.matrix.nnz() == 0);

  auto two = build_category_matrix(docs_of({{"a", "b"}, {"a"}}), v, {{"d1", "cs.CR"}, {"d2", "cs.CV"}});
  CHECK(two.labels == std::vector<std::string>{"cs.CR", "cs.CV"});
  CHECK(two.matrix.coeff(1, 0) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(two.matrix.coeff(0, 0) == 0.0);
  CHECK(two.matrix.coeff(0, 1) == 0.0);
  CHECK(two.matrix.nnz() == 1);

  auto empty_col = build_category_matrix(docs_of({{"a", "b"}, {}}), v, {{"d1", "x"}, {"d2", "y"}});
  CHECK(empty_col.matrix.col_rows(1).empty());

  CHECK_THROWS_AS(build_category_matrix(docs_of({{"a"}}), v, {}), ArgumentError);
}

TEST_CASE("build_category_matrix: matches brute force on the fixture") {
  auto f = fixture();
  auto raw = load_corpus(testing::data_path("corpus20.jsonl"));
  std::map<std::string, std::string> cats;
  for (const auto& d : raw) cats[d.doc_id] = d.primary_category;
  auto C = build_category_matrix(f.docs, f.vocab, cats);
  auto want = oracle::category(f.docs, f.oracle_vocab, cats);
  CHECK(C.labels == want.labels);
  check_equal(C.matrix, want.matrix, 1e-12);
}
