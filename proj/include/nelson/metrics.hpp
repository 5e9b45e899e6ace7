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

#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nelson/cnf.hpp"
#include "nelson/mrf.hpp"
#include "nelson/sampler.hpp"

namespace nelson {

struct ResampleSummary {
  std::map<std::uint32_t, std::uint64_t> histogram;  // rounds -> rows
  double mean_rounds = 0.0;
  std::uint32_t max_rounds = 0;
  std::uint64_t variables_resampled = 0;
  std::vector<std::uint64_t> per_constraint;
};

struct MetricReport {
  std::optional<double> validity;
  std::optional<double> map_at_10;
  std::optional<double> grad_error_l1;
  std::optional<double> nll;
  std::optional<ResampleSummary> resamples;
};

/// Fraction of rows satisfying every constraint; exhausted rows count as
/// drawn.
double validity(const AssignmentBatch& batch, const ConstraintSet& cs);

/// Ranks preferred U unseen by potential (descending; ties by bitstring,
/// descending) and returns 100/10 * sum_{k=1..10} (#preferred in top k) / k.
double map_at_10(const ModelParams& theta,
                 const std::vector<Assignment>& preferred,
                 const std::vector<Assignment>& unseen);

/// L1 distance between the exact E[x] and the mean of m valid sampler draws.
double grad_error(const ConstraintSet& cs, const ModelParams& theta,
                  SamplerKind kind, std::size_t m, std::uint64_t seed,
                  SamplerConfig base = {});

ResampleSummary resample_stats(const SamplerStats& stats);

}  // namespace nelson
