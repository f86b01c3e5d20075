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

#include "simulmt/error.hpp"
#include "simulmt/report.hpp"
#include "support.hpp"

using namespace simulmt;

TEST_CASE("FNV-1a reference values") {
  CHECK(report::hex64(report::fnv1a64("")) == "cbf29ce484222325");
  CHECK(report::hex64(report::fnv1a64("a")) == "af63dc4c8601ec8c");
}

TEST_CASE("real formatting is fixed and sign-stable") {
  CHECK(report::format_real(1.25) == "1.250000");
  CHECK(report::format_real(-0.0000001) == "0.000000");
  CHECK(report::format_real(std::nan("")) == "nan");
  CHECK(report::format_real(-1.0 / 0.0) == "-inf");
}

TEST_CASE("TSV write and read") {
  testing::TempDir dir;
  report::write_tsv(dir / "t.tsv", {"tool=x", "seed=1"}, {"id", "value"}, {{"0", "1.5"}, {"3", "x"}});
  CHECK(testing::read_file(dir / "t.tsv") == "# tool=x\n# seed=1\nid\tvalue\n0\t1.5\n3\tx\n");
  const auto t = report::read_tsv(dir / "t.tsv");
  CHECK(t.metadata == std::vector<std::string>{"tool=x", "seed=1"});
  CHECK(t.column("value") == 1);
  CHECK(t.to_size(1, 0) == 3);
  CHECK(t.to_real(0, 1) == 1.5);
  CHECK_THROWS_AS(t.to_real(1, 1), DataError);
  CHECK_THROWS_AS(t.column("missing"), DataError);

  testing::write_file(dir / "neg.tsv", "id\n-1\n");
  CHECK_THROWS_AS(report::read_tsv(dir / "neg.tsv").to_size(0, 0), DataError);
  testing::write_file(dir / "ragged.tsv", "a\tb\n1\n");
  CHECK_THROWS_AS(report::read_tsv(dir / "ragged.tsv"), DataError);
  testing::write_file(dir / "empty.tsv", "# only metadata\n");
  CHECK_THROWS_AS(report::read_tsv(dir / "empty.tsv"), DataError);
  CHECK_THROWS_AS(report::read_tsv(dir / "missing.tsv"), DataError);
  CHECK(report::split_tabs("a\t\tb") == std::vector<std::string>{"a", "", "b"});
}
