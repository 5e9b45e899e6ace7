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

// Batched constraint-resampling samplers and the Gibbs baseline.
//
// nelson_sample draws every variable from its marginal, then repeatedly
// redraws all variables of every violated constraint until none is violated
// (partial rejection sampling). Under the extremal condition a terminated row
// is an exact draw from P(x | C). moser_tardos_sample redraws the variables of
// a single violated constraint per round.
//
// Randomness: the uniform used for variable i of row l at round t is
// counter_uniform(seed, row_offset + l, t, i, Stream::kSampler). Row l of a
// batch therefore equals a one-row run with row_offset = l.

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "nelson/cnf.hpp"
#include "nelson/mrf.hpp"

namespace nelson {

enum class SamplerKind { kNelson, kMoserTardos, kGibbs };

struct SamplerConfig {
  std::uint32_t t_tryout = 1000;
  std::size_t batch_size = 1;
  std::uint64_t seed = 0;
  std::uint32_t row_offset = 0;
  std::uint32_t gibbs_burn_in = 1000;
  std::uint32_t gibbs_thinning = 10;
  bool record = false;
  /// 0 picks std::thread::hardware_concurrency().
  unsigned threads = 0;
};

struct AssignmentBatch {
  std::size_t n = 0;
  std::vector<std::uint8_t> rows;        // batch x n, row-major
  std::vector<std::uint8_t> valid_flags; // batch

  std::size_t size() const { return valid_flags.size(); }
  AssignmentView row(std::size_t l) const {
    return AssignmentView(rows).subspan(l * n, n);
  }
  std::size_t valid_count() const;
};

/// Violated-constraint set of one round.
using ViolationSet = std::vector<std::uint32_t>;

struct SamplerStats {
  /// Round at which the row terminated (1 = initial draw was valid); for
  /// exhausted rows, t_tryout.
  std::vector<std::uint32_t> rounds_per_row;
  /// How often each constraint was violated and triggered a resample.
  std::vector<std::uint64_t> per_constraint_resamples;
  std::uint64_t variables_resampled = 0;
  std::size_t exhausted = 0;
  /// S_1..S_T per row when SamplerConfig::record is set.
  std::vector<std::vector<ViolationSet>> records;
};

struct SampleResult {
  AssignmentBatch batch;
  SamplerStats stats;
};

SampleResult nelson_sample(const ConstraintSet& cs, const ModelParams& m,
                           const SamplerConfig& cfg);

/// Same as nelson_sample but resamples only the lowest-index violated
/// constraint each round.
SampleResult moser_tardos_sample(const ConstraintSet& cs, const ModelParams& m,
                                 const SamplerConfig& cfg);

/// Single-site Gibbs chain: batch_size samples emitted after gibbs_burn_in
/// sweeps, one every gibbs_thinning sweeps. Starts from `init` or from one
/// Nelson draw. Throws kSamplerExhausted if no valid start is found. A site
/// whose both values violate an incident constraint keeps its value.
SampleResult gibbs_sample(const ConstraintSet& cs, const ModelParams& m,
                          const SamplerConfig& cfg,
                          std::optional<Assignment> init = std::nullopt);

SampleResult run_sampler(SamplerKind kind, const ConstraintSet& cs,
                         const ModelParams& m, const SamplerConfig& cfg);

/// Collects `count` valid rows, redrawing batches (derived seeds) up to
/// `max_batches` times. Throws kSamplerExhausted when that is not enough.
std::vector<Assignment> draw_valid(SamplerKind kind, const ConstraintSet& cs,
                                   const ModelParams& m, SamplerConfig cfg,
                                   std::size_t count,
                                   std::size_t max_batches = 10);

}  // namespace nelson
