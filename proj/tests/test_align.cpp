// Copyright 2026 The simulmt Authors
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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "simulmt/align.hpp"
#include "simulmt/error.hpp"
#include "support.hpp"

using namespace simulmt;
using align::AlignerOptions;
using align::Link;
using testing::pair;

namespace {

std::vector<corpus::SentencePair> random_corpus(std::mt19937_64& rng, std::size_t count, std::size_t vocab,
                                                std::size_t max_len) {
  std::uniform_int_distribution<std::size_t> len(1, max_len), word(0, vocab - 1);
  std::vector<corpus::SentencePair> out;
  for (std::size_t i = 0; i < count; ++i) {
    corpus::SentencePair p;
    p.id = i;
    for (std::size_t j = len(rng); j > 0; --j) p.source.push_back("s" + std::to_string(word(rng)));
    for (std::size_t j = len(rng); j > 0; --j) p.target.push_back("t" + std::to_string(word(rng)));
    out.push_back(p);
  }
  return out;
}

}  // namespace

TEST_CASE("positional prior sums to one and peaks on the diagonal") {
  AlignerOptions o;
  const auto p = align::positional_prior(2, 4, 4, o);
  double s = 0;
  for (double v : p) s += v;
  CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(p[0] == doctest::Approx(o.p_null));
  CHECK(p[2] > p[1]);
  CHECK(p[2] > p[3]);

  o.lambda = 0;
  const auto flat = align::positional_prior(1, 5, 3, o);
  for (std::size_t j = 1; j <= 5; ++j) CHECK(flat[j] == doctest::Approx((1 - o.p_null) / 5));
}

TEST_CASE("em_align single co-occurrence") {
  const auto r = align::em_align({pair("a", "x")}, 1);
  CHECK(r.table.prob("a", "x") == doctest::Approx(1.0));
  CHECK(r.log_likelihood.size() == 2);
}

TEST_CASE("em_align preconditions") {
  CHECK_THROWS_AS(align::em_align({}, 1), UsageError);
  CHECK_THROWS_AS(align::em_align({pair("a", "x")}, 0), UsageError);
  AlignerOptions bad;
  bad.p_null = 1.0;
  CHECK_THROWS_AS(align::em_align({pair("a", "x")}, 1, bad), UsageError);
  bad = {};
  bad.lambda = -1;
  CHECK_THROWS_AS(align::em_align({pair("a", "x")}, 1, bad), UsageError);
}

TEST_CASE("em_align matches brute-force enumeration of alignments") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 6; ++trial) {
    const auto pairs = random_corpus(rng, 5, 4, 3);
    std::vector<oracle::ToyPair> toy;
    for (const auto& p : pairs) toy.push_back({p.source, p.target});
    AlignerOptions o;
    o.lambda = trial % 2 == 0 ? 4.0 : 0.5;
    o.p_null = 0.1;
    const auto got = align::em_align(pairs, 3, o);
    const auto want = oracle::brute_force_em(toy, 3, o.lambda, o.p_null);
    REQUIRE(got.log_likelihood.size() == want.log_likelihood.size());
    for (std::size_t i = 0; i < want.log_likelihood.size(); ++i) {
      CHECK(got.log_likelihood[i] == doctest::Approx(want.log_likelihood[i]).epsilon(1e-10));
    }
    for (const auto& [key, p] : want.table) {
      CHECK(got.table.prob(key.first, key.second) == doctest::Approx(p).epsilon(1e-10));
    }
  }
}

TEST_CASE("em_align separates a symmetric two-pair corpus when the prior is informative") {
  const std::vector<corpus::SentencePair> pairs{pair("a b", "x y", 0), pair("b a", "y x", 1)};
  const auto r = align::em_align(pairs, 5);
  CHECK(r.table.prob("a", "x") > r.table.prob("a", "y"));
  CHECK(r.table.prob("b", "y") > r.table.prob("b", "x"));
  const auto v = align::viterbi_align(pairs[0], r.table);
  CHECK(v.links() == std::set<Link>{{1, 1}, {2, 2}});
}

TEST_CASE("em_align with a flat prior cannot break the two-pair symmetry") {
  AlignerOptions o;
  o.lambda = 0;
  const std::vector<corpus::SentencePair> pairs{pair("a b", "x y", 0), pair("b a", "y x", 1)};
  const auto r = align::em_align(pairs, 5, o);
  CHECK(r.table.prob("a", "x") == doctest::Approx(r.table.prob("a", "y")).epsilon(1e-12));
}

TEST_CASE("property: em log-likelihood never decreases and rows stay normalized") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 10; ++trial) {
    const auto pairs = random_corpus(rng, 10 + trial * 4, 6, 6);
    const auto r = align::em_align(pairs, 10);
    for (std::size_t i = 1; i < r.log_likelihood.size(); ++i) {
      CHECK(r.log_likelihood[i] >= r.log_likelihood[i - 1] - 1e-9);
    }
    for (const auto& [e, row] : r.table.entries()) {
      double s = 0;
      for (const auto& [f, p] : row) s += p;
      CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("viterbi_align forced link and unseen-token diagonal") {
  align::TranslationTable t;
  t.set("a", "x", 1.0);
  CHECK(align::viterbi_align(pair("a", "x"), t).links() == std::set<Link>{{1, 1}});

  AlignerOptions o;
  o.lambda = 50;
  const auto p = pair("p q r s t u", "k l m");
  const auto v = align::viterbi_align(p, align::TranslationTable{}, o);
  for (std::size_t t_pos = 1; t_pos <= 3; ++t_pos) {
    const auto want = static_cast<std::size_t>(std::lround(t_pos * 6.0 / 3.0));
    CHECK(v.links().count({t_pos, want}) == 1);
  }
}

TEST_CASE("viterbi_align prefers the lowest source index on ties") {
  align::TranslationTable t;
  t.set("a", "x", 0.5);
  AlignerOptions o;
  o.lambda = 0;
  CHECK(align::viterbi_align(pair("a a a", "x"), t, o).links() == std::set<Link>{{1, 1}});
}

TEST_CASE("viterbi_align leaves a target unaligned when the null link wins") {
  align::TranslationTable t;
  t.set(align::kNullToken, "x", 1.0);
  AlignerOptions o;
  o.p_null = 0.5;
  CHECK(align::viterbi_align(pair("a", "x"), t, o).links().empty());
}

TEST_CASE("alignment links are bounds-checked") {
  align::AlignmentSet a(2, 2);
  CHECK_THROWS_AS(a.add({3, 1}), UsageError);
  CHECK_THROWS_AS(a.add({1, 0}), UsageError);
}

TEST_CASE("Pharaoh format round trip and errors") {
  align::AlignmentSet a(3, 2, {{1, 2}, {2, 1}, {2, 3}});
  CHECK(align::to_pharaoh(a) == "0-1 1-0 2-1");
  CHECK(align::from_pharaoh("0-1 1-0 2-1", 3, 2) == a);
  CHECK(align::from_pharaoh("", 3, 2).links().empty());
  CHECK_THROWS_AS(align::from_pharaoh("0-", 3, 2), DataError);
  CHECK_THROWS_AS(align::from_pharaoh("a-1", 3, 2), DataError);
  CHECK_THROWS_AS(align::from_pharaoh("5-0", 3, 2), DataError);

  testing::TempDir dir;
  const std::vector<corpus::SentencePair> pairs{pair("a b c", "x y"), pair("d", "z")};
  align::write_pharaoh(dir / "a.txt", {a, align::AlignmentSet(1, 1, {{1, 1}})});
  const auto back = align::read_pharaoh(dir / "a.txt", pairs);
  REQUIRE(back.size() == 2);
  CHECK(back[0] == a);
  CHECK(back[1].links() == std::set<Link>{{1, 1}});
  CHECK_THROWS_AS(align::read_pharaoh(dir / "a.txt", {pairs[0]}), DataError);
}
