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

// Constrained MRF in single-variable form:
//   P(x | C) = exp(sum_i theta_i x_i) C(x) / Z_C(theta).

#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <utility>
#include <vector>

#include "nelson/cnf.hpp"

namespace nelson {

struct ModelParams {
  std::vector<double> theta;

  std::size_t size() const { return theta.size(); }
  static ModelParams zeros(std::size_t n) { return {std::vector<double>(n)}; }
  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

/// P_i = P(X_i = 0) = 1 / (1 + exp(theta_i)). Throws on non-finite theta.
std::vector<double> marginals(const ModelParams& m);

/// sum_i theta_i x_i
double potential(const ModelParams& m, AssignmentView x);

/// Linear plus pairwise potential over Boolean variables.
struct FactorSpec {
  std::map<std::size_t, double> linear;
  std::map<std::pair<std::size_t, std::size_t>, double> pairwise;
};

double factor_potential(const FactorSpec& f, AssignmentView x);

struct AuxiliaryBlock {
  std::size_t a = 0;
  std::size_t b = 0;
  /// Variables standing for (x_a, x_b) = 00, 01, 10, 11.
  std::array<std::size_t, 4> aux{};
};

struct PairwiseTransform {
  ModelParams params;
  ConstraintSet constraints;
  std::size_t original_vars = 0;
  std::vector<AuxiliaryBlock> blocks;
};

/// Rewrites each pairwise term t * x_a * x_b with four indicator variables
/// tied to (x_a, x_b) by CNF clauses; the coefficient t moves onto the
/// indicator of (1, 1). Original variables keep their indices.
PairwiseTransform pairwise_to_single(const FactorSpec& f,
                                     const ConstraintSet& base);

}  // namespace nelson
