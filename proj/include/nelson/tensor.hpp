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

// Arithmetic clause checking.
//
// A clause set with L clauses of at most K literals over n variables is
// encoded as
//   W (L x K x n, entries -1/0/1): W[j][k][i] = +1 if literal k of clause j
//       is X_i, -1 if it is (not X_i);
//   b (L x K): b[j][k] = 1 if literal k of clause j is negated;
//   V (L x n): V[j][i] = 1 if clause j mentions X_i.
// For an assignment x, Z[j][k] = sum_i W[j][k][i] x_i + b[j][k] is 1 exactly
// when literal k is true, S[j] = 1 - max_k Z[j][k] flags violated clauses, and
// A[i] = 1(sum_j S[j] V[j][i] >= 1) marks variables to resample. Short
// clauses are padded with all-zero slots, which contribute Z = 0.

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "nelson/cnf.hpp"

namespace nelson {

struct ClauseTensors {
  std::size_t n = 0;  // variables
  std::size_t L = 0;  // clauses
  std::size_t K = 0;  // max clause length

  std::vector<std::int8_t> W;  // L*K*n, row-major [j][k][i]
  std::vector<std::uint8_t> b; // L*K
  std::vector<std::uint8_t> V; // L*n

  /// Column of the single nonzero in W[j][k][:], or -1 for a padded slot.
  /// Lets the Z contraction skip the zeros of W.
  std::vector<std::int32_t> slot_variable; // L*K

  std::int8_t w(std::size_t j, std::size_t k, std::size_t i) const {
    return W[(j * K + k) * n + i];
  }
  std::uint8_t bias(std::size_t j, std::size_t k) const { return b[j * K + k]; }
  std::uint8_t v(std::size_t j, std::size_t i) const { return V[j * n + i]; }
};

/// Z (b x L x K), S (b x L) and optionally A (b x n), all row-major.
struct SatisfactionState {
  std::size_t batch = 0;
  std::size_t L = 0;
  std::size_t K = 0;
  std::size_t n = 0;
  std::vector<std::int8_t> Z;
  std::vector<std::uint8_t> S;
  std::vector<std::uint8_t> A;

  std::int8_t z(std::size_t l, std::size_t j, std::size_t k) const {
    return Z[(l * L + j) * K + k];
  }
  std::uint8_t s(std::size_t l, std::size_t j) const { return S[l * L + j]; }
  std::uint8_t a(std::size_t l, std::size_t i) const { return A[l * n + i]; }
};

/// Encodes the clauses of `cs`; exactly-one groups are not tensorized.
ClauseTensors encode_tensors(const ConstraintSet& cs);

/// Z and S for every row of a row-major batch (rows x n).
SatisfactionState satisfaction_pass(const ClauseTensors& t,
                                    std::span<const std::uint8_t> batch,
                                    std::size_t rows);

/// A = 1(S V >= 1) for a row-major S (rows x L); returns rows x n.
std::vector<std::uint8_t> resample_mask(const ClauseTensors& t,
                                        std::span<const std::uint8_t> s,
                                        std::size_t rows);

namespace kernel {

/// Single-row Z and S. `z` has L*K entries, `s` has L entries.
/// Returns the number of violated clauses.
std::size_t clause_pass(const ClauseTensors& t, AssignmentView x,
                        std::span<std::int8_t> z, std::span<std::uint8_t> s);

/// Single-row A, OR-ed into `mask` (n entries).
void accumulate_mask(const ClauseTensors& t, std::span<const std::uint8_t> s,
                     std::span<std::uint8_t> mask);

}  // namespace kernel

}  // namespace nelson
