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

#include <random>

#include "simulmt/error.hpp"
#include "simulmt/latency.hpp"
#include "support.hpp"

using namespace simulmt;
using latency::DecodingPath;
using Z = std::vector<std::size_t>;

namespace {

align::AlignmentSet crossing() { return align::AlignmentSet(4, 4, {{1, 1}, {2, 3}, {3, 2}, {4, 4}}); }

align::AlignmentSet random_alignment(std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> len(1, 9);
  const std::size_t n = len(rng), m = len(rng);
  std::bernoulli_distribution keep(0.3);
  align::AlignmentSet a(n, m);
  for (std::size_t t = 1; t <= m; ++t) {
    for (std::size_t j = 1; j <= n; ++j) {
      if (keep(rng)) a.add({t, j});
    }
  }
  return a;
}

}  // namespace

TEST_CASE("DecodingPath validates bounds and monotonicity") {
  CHECK_THROWS_AS(DecodingPath(Z{0}, 3), UsageError);
  CHECK_THROWS_AS(DecodingPath(Z{4}, 3), UsageError);
  CHECK_THROWS_AS(DecodingPath(Z{2, 1}, 3), UsageError);
  CHECK_THROWS_AS(DecodingPath(Z{}, 0), UsageError);
  const DecodingPath p(Z{1, 3}, 3);
  CHECK(p[2] == 3);
  CHECK(p.target_len() == 2);
}

TEST_CASE("waitk_path examples") {
  CHECK(latency::waitk_path(3, 5, 4).z() == Z{3, 4, 5, 5});
  CHECK(latency::waitk_path(1, 3, 3).z() == Z{1, 2, 3});
  CHECK(latency::waitk_path(10, 4, 3).z() == Z{4, 4, 4});
  CHECK_THROWS_AS(latency::waitk_path(0, 4, 3), UsageError);
  CHECK_THROWS_AS(latency::waitk_path(1, 0, 3), UsageError);
}

TEST_CASE("reference_path examples") {
  CHECK(latency::reference_path(crossing()).z() == Z{1, 3, 3, 4});
  CHECK(latency::reference_path(align::AlignmentSet(3, 2)).z() == Z{1, 1});
  CHECK(latency::reference_path(align::AlignmentSet(3, 3, {{1, 1}, {2, 2}, {3, 3}})).z() == Z{1, 2, 3});
  // An unaligned target position keeps the previous read count.
  CHECK(latency::reference_path(align::AlignmentSet(5, 3, {{1, 4}, {3, 2}})).z() == Z{4, 4, 4});
}

TEST_CASE("average_lagging examples") {
  const auto r = latency::average_lagging(DecodingPath(Z{1, 3, 3, 4}, 4));
  CHECK(r.tau == 4);
  CHECK(r.al == 1.25);

  const auto end = latency::average_lagging(DecodingPath(Z{6, 6, 6}, 6));
  CHECK(end.tau == 1);
  CHECK(end.al == 6.0);

  CHECK_THROWS_AS(latency::average_lagging(DecodingPath(Z{}, 3)), UsageError);
}

TEST_CASE("average_lagging closed form for wait-k on equal lengths") {
  for (std::size_t n = 1; n <= 20; ++n) {
    for (std::size_t k = 1; k < n; ++k) {
      CHECK(latency::average_lagging(latency::waitk_path(k, n, n)).al == doctest::Approx(k).epsilon(1e-12));
    }
  }
}

TEST_CASE("lagging_difficulty examples") {
  const auto p = testing::pair("a b c d", "w x y z");
  CHECK(latency::lagging_difficulty(p, crossing()) == 1.25);
  CHECK(latency::lagging_difficulty(p, align::AlignmentSet(4, 4, {{1, 1}, {2, 2}, {3, 3}, {4, 4}})) == 1.0);
  const auto short_pair = testing::pair("a b c", "x y");
  CHECK(latency::lagging_difficulty(short_pair, align::AlignmentSet(3, 2)) == doctest::Approx(0.25));
  CHECK_THROWS_AS(latency::lagging_difficulty(short_pair, crossing()), UsageError);
}

TEST_CASE("property: reference paths are monotone, dominate links and are minimal") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 300; ++trial) {
    const auto a = random_alignment(rng);
    const auto path = latency::reference_path(a);
    const auto& z = path.z();
    for (std::size_t t = 1; t < z.size(); ++t) CHECK(z[t - 1] <= z[t]);
    for (const auto& l : a.links()) CHECK(path[l.t] >= l.j);
    for (std::size_t t = 0; t < z.size(); ++t) {
      if (z[t] == 1) continue;
      Z lower = z;
      --lower[t];
      bool monotone = true;
      for (std::size_t s = 1; s < lower.size(); ++s) monotone = monotone && lower[s - 1] <= lower[s];
      bool dominates = true;
      for (const auto& l : a.links()) dominates = dominates && lower[l.t - 1] >= l.j;
      CHECK_FALSE((monotone && dominates));
    }
  }
}

TEST_CASE("property: wait-k paths are valid and AL grows with k") {
  for (std::size_t n = 1; n <= 12; ++n) {
    for (std::size_t m = 1; m <= 12; ++m) {
      double prev = -1e9;
      for (std::size_t k = 1; k <= n + 2; ++k) {
        const auto path = latency::waitk_path(k, n, m);
        CHECK(path.target_len() == m);
        const double al = latency::average_lagging(path).al;
        CHECK(al >= prev - 1e-12);
        prev = al;
      }
    }
  }
}

TEST_CASE("any path that reads the whole source first has AL equal to its length") {
  for (std::size_t n = 1; n <= 10; ++n) {
    for (std::size_t m = 1; m <= 10; ++m) {
      const auto r = latency::average_lagging(DecodingPath(Z(m, n), n));
      CHECK(r.tau == 1);
      CHECK(r.al == static_cast<double>(n));
    }
  }
}

TEST_CASE("factor files round trip and carry metadata") {
  testing::TempDir dir;
  const std::vector<latency::SegmentFactors> rows{{0, 4, 4, 1.25, 3.0}, {7, 3, 2, 0.25, 3.0}};
  latency::write_factors(dir / "f.tsv", rows, {"tool=test"});
  const auto text = testing::read_file(dir / "f.tsv");
  CHECK(text.rfind("# tool=test\nid\tsrc_len\ttgt_len\tLD\tAL\n0\t4\t4\t1.250000\t3.000000\n", 0) == 0);
  const auto back = latency::read_factors(dir / "f.tsv");
  REQUIRE(back.size() == 2);
  CHECK(back[1].id == 7);
  CHECK(back[1].ld == 0.25);

  testing::write_file(dir / "bad.tsv", "id\tsrc_len\n1\t2\n");
  CHECK_THROWS_AS(latency::read_factors(dir / "bad.tsv"), DataError);
}
