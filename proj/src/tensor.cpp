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

#include "nelson/tensor.hpp"

#include <algorithm>
#include <cassert>
#include <string>

#include "nelson/error.hpp"

namespace nelson {

ClauseTensors encode_tensors(const ConstraintSet& cs) {
  ClauseTensors t;
  t.n = cs.n_vars();
  t.L = cs.num_clauses();
  for (const auto& c : cs.clauses()) {
    t.K = std::max(t.K, c.literals.size());
  }
  t.W.assign(t.L * t.K * t.n, 0);
  t.b.assign(t.L * t.K, 0);
  t.V.assign(t.L * t.n, 0);
  t.slot_variable.assign(t.L * t.K, -1);
  for (std::size_t j = 0; j < t.L; ++j) {
    const auto& lits = cs.clauses()[j].literals;
    for (std::size_t k = 0; k < lits.size(); ++k) {
      const auto i = lits[k].variable;
      t.W[(j * t.K + k) * t.n + i] = lits[k].negated ? -1 : 1;
      t.b[j * t.K + k] = lits[k].negated ? 1 : 0;
      t.V[j * t.n + i] = 1;
      t.slot_variable[j * t.K + k] = static_cast<std::int32_t>(i);
    }
  }
  return t;
}

namespace kernel {

std::size_t clause_pass(const ClauseTensors& t, AssignmentView x,
                        std::span<std::int8_t> z, std::span<std::uint8_t> s) {
  std::size_t violated = 0;
  for (std::size_t j = 0; j < t.L; ++j) {
    std::int8_t best = 0;
    for (std::size_t k = 0; k < t.K; ++k) {
      const std::size_t slot = j * t.K + k;
      const auto i = t.slot_variable[slot];
      // W[j][k][:] has at most one nonzero, so the contraction over i
      // reduces to that column.
      const std::int8_t value =
          i < 0 ? 0
                : static_cast<std::int8_t>(t.W[slot * t.n + i] * x[i] +
                                           t.b[slot]);
      assert(value == 0 || value == 1);
      z[slot] = value;
      best = std::max(best, value);
    }
    s[j] = static_cast<std::uint8_t>(1 - best);
    violated += s[j];
  }
  return violated;
}

void accumulate_mask(const ClauseTensors& t, std::span<const std::uint8_t> s,
                     std::span<std::uint8_t> mask) {
  for (std::size_t j = 0; j < t.L; ++j) {
    if (!s[j]) continue;
    for (std::size_t k = 0; k < t.K; ++k) {
      const auto i = t.slot_variable[j * t.K + k];
      if (i >= 0) mask[i] = 1;
    }
  }
}

}  // namespace kernel

SatisfactionState satisfaction_pass(const ClauseTensors& t,
                                    std::span<const std::uint8_t> batch,
                                    std::size_t rows) {
  if (batch.size() != rows * t.n) {
    fail(ErrorKind::kInvalidArgument,
         "satisfaction_pass: batch width does not match n=" +
             std::to_string(t.n));
  }
  SatisfactionState st;
  st.batch = rows;
  st.L = t.L;
  st.K = t.K;
  st.n = t.n;
  st.Z.assign(rows * t.L * t.K, 0);
  st.S.assign(rows * t.L, 0);
  for (std::size_t l = 0; l < rows; ++l) {
    kernel::clause_pass(
        t, batch.subspan(l * t.n, t.n),
        std::span<std::int8_t>(st.Z).subspan(l * t.L * t.K, t.L * t.K),
        std::span<std::uint8_t>(st.S).subspan(l * t.L, t.L));
  }
  return st;
}

std::vector<std::uint8_t> resample_mask(const ClauseTensors& t,
                                        std::span<const std::uint8_t> s,
                                        std::size_t rows) {
  if (s.size() != rows * t.L) {
    fail(ErrorKind::kInvalidArgument,
         "resample_mask: S has wrong shape for L=" + std::to_string(t.L));
  }
  std::vector<std::uint8_t> a(rows * t.n, 0);
  for (std::size_t l = 0; l < rows; ++l) {
    // A[l][i] = 1(sum_j S[l][j] V[j][i] >= 1)
    for (std::size_t i = 0; i < t.n; ++i) {
      unsigned hits = 0;
      for (std::size_t j = 0; j < t.L; ++j) hits += s[l * t.L + j] * t.v(j, i);
      a[l * t.n + i] = hits >= 1 ? 1 : 0;
    }
  }
  return a;
}

}  // namespace nelson
