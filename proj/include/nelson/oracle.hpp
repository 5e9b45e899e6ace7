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

// Ground truth by enumerating all 2^n assignments. Assignments are encoded as
// bit masks (bit i = variable i), so n is capped well below 64.

#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "nelson/cnf.hpp"
#include "nelson/mrf.hpp"

namespace nelson {

inline constexpr std::size_t kDefaultEnumerationCap = 25;

struct ExactDistribution {
  std::size_t n = 0;
  std::vector<std::uint64_t> support;  // masks, ascending
  std::vector<double> probabilities;
  double log_partition = 0.0;

  Assignment assignment(std::size_t k) const;
};

struct ResampleExpectation {
  double q_empty = 0.0;
  std::vector<double> q_single;
  std::vector<double> per_constraint_expected;
  double total_expected = 0.0;
  /// Passed through from check_extremal; the formula assumes it holds.
  bool extremal = false;
};

/// Bitstring -> probability. Missing keys read as zero mass.
using DistributionTable = std::map<std::string, double>;

ExactDistribution exact_distribution(const ConstraintSet& cs,
                                     const ModelParams& m,
                                     std::size_t cap = kDefaultEnumerationCap);

/// E[x_i] under P(x | C), i.e. the gradient of log Z_C(theta).
std::vector<double> exact_grad_log_partition(
    const ConstraintSet& cs, const ModelParams& m,
    std::size_t cap = kDefaultEnumerationCap);

/// q_empty and q_{c_j} under the product of marginals, with
/// E[resamples of c_j] = q_{c_j} / q_empty.
ResampleExpectation expected_resamples(const ConstraintSet& cs,
                                       const ModelParams& m,
                                       std::size_t cap = kDefaultEnumerationCap);

/// Product-measure mass of every violated-constraint pattern (sorted index
/// lists; the empty list is "all satisfied"). Requires <= 64 constraints.
std::map<std::vector<std::size_t>, double> violation_pattern_masses(
    const ConstraintSet& cs, const ModelParams& m,
    std::size_t cap = kDefaultEnumerationCap);

double tv_distance(const DistributionTable& p, const DistributionTable& q);

DistributionTable to_table(const ExactDistribution& d);
/// Empirical table of the valid rows of a row-major batch.
DistributionTable empirical_table(std::span<const std::uint8_t> rows,
                                  std::size_t n,
                                  std::span<const std::uint8_t> valid_flags);

}  // namespace nelson
