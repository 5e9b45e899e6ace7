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

// Contrastive-divergence training of a constrained MRF.
//
// The negative log-likelihood
//   l(theta) = -(1/N) sum_k theta . x^k + log Z_C(theta)
// has gradient E_model[x] - E_data[x]; each step replaces both expectations
// with m-sample means and applies theta <- theta - eta * g.

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "nelson/cnf.hpp"
#include "nelson/mrf.hpp"
#include "nelson/oracle.hpp"
#include "nelson/sampler.hpp"

namespace nelson {

struct Dataset {
  std::size_t n_vars = 0;
  std::vector<Assignment> assignments;

  std::size_t size() const { return assignments.size(); }
};

/// Throws kInvalidArgument if a row has the wrong width or violates `cs`.
void validate_dataset(const Dataset& ds, const ConstraintSet& cs);

struct TrainConfig {
  std::size_t m = 200;
  double eta = 0.1;
  std::size_t t_max = 1000;
  SamplerKind sampler = SamplerKind::kNelson;
  std::uint64_t seed = 0;
  std::uint32_t t_tryout = 1000;
  std::uint32_t gibbs_burn_in = 1000;
  std::uint32_t gibbs_thinning = 10;
  /// Batches the sampler may draw per step to collect m valid rows.
  std::size_t retry_batches = 10;
  /// Trace every k-th iteration (and the last one).
  std::size_t trace_every = 1;
  std::size_t enumeration_cap = kDefaultEnumerationCap;
  bool record_wall_time = false;
  unsigned threads = 0;
};

struct TraceEntry {
  std::size_t iter = 0;
  std::optional<double> nll;  // absent when n exceeds the enumeration cap
  double grad_l1 = 0.0;
  double wall_ms = 0.0;
};

struct TrainResult {
  ModelParams theta;
  std::vector<TraceEntry> trace;
};

/// g = mean(model rows) - mean(data rows): the estimate of grad l(theta).
std::vector<double> cd_step(const ModelParams& theta,
                            const std::vector<Assignment>& data_batch,
                            const std::vector<Assignment>& model_batch);

/// Trace entry 0 holds the NLL of theta0; entry t the NLL after update t.
TrainResult train(const Dataset& ds, const ConstraintSet& cs,
                  const TrainConfig& cfg, const ModelParams& theta0);

/// -(1/N) sum_k phi(x^k) + log Z_C(theta), with exact log Z.
double neg_log_likelihood(const ModelParams& theta, const Dataset& ds,
                          const ConstraintSet& cs,
                          std::size_t cap = kDefaultEnumerationCap);

SamplerConfig sampler_config_for(const TrainConfig& cfg, std::size_t iter);

}  // namespace nelson
