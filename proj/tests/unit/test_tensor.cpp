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

#include <doctest.h>

#include "fixtures.hpp"
#include "nelson/tensor.hpp"

using namespace nelson;
using namespace nelson::testing;

TEST_CASE("two-clause tensors match the hand-worked encoding") {
  const auto t = encode_tensors(two_clause());
  REQUIRE(t.L == 2);
  REQUIRE(t.K == 2);
  REQUIRE(t.n == 3);
  const std::vector<std::int8_t> W = {1, 0, 0, 0, 1, 0,    // clause 1
                                      -1, 0, 0, 0, 0, 1};  // clause 2
  CHECK(t.W == W);
  CHECK(t.b == std::vector<std::uint8_t>{0, 0, 1, 0});
  CHECK(t.V == std::vector<std::uint8_t>{1, 1, 0, 1, 0, 1});

  const auto x = bits("001");
  const auto st = satisfaction_pass(t, x, 1);
  CHECK(st.Z == std::vector<std::int8_t>{0, 0, 1, 1});
  CHECK(st.S == std::vector<std::uint8_t>{1, 0});
  CHECK(resample_mask(t, st.S, 1) == std::vector<std::uint8_t>{1, 1, 0});
}

TEST_CASE("satisfaction pass and masks") {
  const auto t = encode_tensors(two_clause());
  CHECK(satisfaction_pass(t, bits("011"), 1).S == std::vector<std::uint8_t>{0, 0});
  const std::vector<std::uint8_t> batch = {0, 0, 1, 0, 1, 1};
  CHECK(satisfaction_pass(t, batch, 2).S == std::vector<std::uint8_t>{1, 0, 0, 0});
  const std::vector<std::uint8_t> none = {0, 0}, second = {0, 1};
  CHECK(resample_mask(t, none, 1) == std::vector<std::uint8_t>{0, 0, 0});
  CHECK(resample_mask(t, second, 1) == std::vector<std::uint8_t>{1, 0, 1});
}

TEST_CASE("ragged clauses are padded") {
  const auto t = encode_tensors(parse_dimacs("p cnf 2 2\n1 0\n-1 2 0\n"));
  CHECK(t.K == 2);
  for (std::size_t i = 0; i < t.n; ++i) CHECK(t.w(0, 1, i) == 0);
  CHECK(t.bias(0, 1) == 0);
  CHECK(t.slot_variable[1] == -1);
  // Padded Z=0 never satisfies the unit clause.
  CHECK(satisfaction_pass(t, bits("01"), 1).S == std::vector<std::uint8_t>{1, 0});

  const auto empty = encode_tensors(parse_dimacs("p cnf 3 0"));
  CHECK(empty.L == 0);
  CHECK(empty.W.empty());
}

TEST_CASE("tensor pipeline agrees with direct evaluation") {
  for (std::uint64_t s = 0; s < 150; ++s) {
    const std::size_t n = 2 + s % 11;
    const auto cs = random_clauses(n, 1 + s % 8, 4, s);
    const auto t = encode_tensors(cs);
    std::vector<std::uint8_t> batch;
    const std::size_t rows = std::min<std::size_t>(1u << n, 64);
    for (std::size_t r = 0; r < rows; ++r) {
      const auto x = mask_to_assignment(r * 2654435761u % (1u << n), n);
      batch.insert(batch.end(), x.begin(), x.end());
    }
    const auto st = satisfaction_pass(t, batch, rows);
    const auto A = resample_mask(t, st.S, rows);
    for (std::size_t r = 0; r < rows; ++r) {
      const AssignmentView x(batch.data() + r * n, n);
      const auto viol = violated_constraints(cs, x);
      std::vector<std::uint8_t> expect_mask(n, 0);
      std::vector<std::size_t> from_s;
      for (std::size_t j = 0; j < t.L; ++j) {
        if (st.s(r, j)) from_s.push_back(j);
      }
      for (auto j : viol) {
        for (auto v : cs.variables_of(j)) expect_mask[v] = 1;
      }
      REQUIRE(from_s == viol);
      REQUIRE(std::vector<std::uint8_t>(A.begin() + r * n, A.begin() + (r + 1) * n) ==
              expect_mask);
    }
  }
}

TEST_CASE("extra padding slot changes nothing") {
  for (std::uint64_t s = 0; s < 50; ++s) {
    const std::size_t n = 3 + s % 6;
    const auto cs = random_clauses(n, 4, 3, s);
    const auto t = encode_tensors(cs);
    ClauseTensors padded = t;
    padded.K = t.K + 1;
    padded.W.assign(t.L * padded.K * n, 0);
    padded.b.assign(t.L * padded.K, 0);
    padded.slot_variable.assign(t.L * padded.K, -1);
    for (std::size_t j = 0; j < t.L; ++j) {
      for (std::size_t k = 0; k < t.K; ++k) {
        padded.b[j * padded.K + k] = t.bias(j, k);
        padded.slot_variable[j * padded.K + k] = t.slot_variable[j * t.K + k];
        for (std::size_t i = 0; i < n; ++i) {
          padded.W[(j * padded.K + k) * n + i] = t.w(j, k, i);
        }
      }
    }
    for (std::uint64_t mask = 0; mask < (1u << n); ++mask) {
      const auto x = mask_to_assignment(mask, n);
      REQUIRE(satisfaction_pass(t, x, 1).S == satisfaction_pass(padded, x, 1).S);
    }
  }
}
