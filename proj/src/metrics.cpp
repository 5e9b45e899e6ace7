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

#include "nelson/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "nelson/error.hpp"
#include "nelson/oracle.hpp"

namespace nelson {

double validity(const AssignmentBatch& batch, const ConstraintSet& cs) {
  if (batch.size() == 0) fail(ErrorKind::kInvalidArgument, "validity: empty batch");
  if (batch.n != cs.n_vars()) {
    fail(ErrorKind::kInvalidArgument, "validity: batch width mismatch");
  }
  std::size_t ok = 0;
  for (std::size_t l = 0; l < batch.size(); ++l) {
    if (violated_constraints(cs, batch.row(l)).empty()) ++ok;
  }
  return static_cast<double>(ok) / static_cast<double>(batch.size());
}

double map_at_10(const ModelParams& theta,
                 const std::vector<Assignment>& preferred,
                 const std::vector<Assignment>& unseen) {
  if (preferred.empty() || unseen.empty()) {
    fail(ErrorKind::kInvalidArgument, "MAP@10 needs preferred and unseen sets");
  }
  struct Candidate {
    double score;
    std::string bits;
    bool preferred;
  };
  std::set<std::string> preferred_keys;
  std::vector<Candidate> pool;
  for (const auto& x : preferred) {
    auto key = to_bitstring(x);
    if (preferred_keys.insert(key).second) {
      pool.push_back({potential(theta, x), std::move(key), true});
    }
  }
  std::set<std::string> unseen_keys;
  for (const auto& x : unseen) {
    auto key = to_bitstring(x);
    if (preferred_keys.contains(key) || !unseen_keys.insert(key).second) continue;
    pool.push_back({potential(theta, x), std::move(key), false});
  }
  if (pool.size() < 10) {
    fail(ErrorKind::kInvalidArgument,
         "MAP@10 needs at least 10 distinct candidates, got " +
             std::to_string(pool.size()));
  }
  std::sort(pool.begin(), pool.end(), [](const Candidate& a, const Candidate& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.bits > b.bits;
  });
  double sum = 0.0;
  std::size_t hits = 0;
  for (std::size_t k = 1; k <= 10; ++k) {
    if (pool[k - 1].preferred) ++hits;
    sum += static_cast<double>(hits) / static_cast<double>(k);
  }
  return sum / 10.0 * 100.0;
}

double grad_error(const ConstraintSet& cs, const ModelParams& theta,
                  SamplerKind kind, std::size_t m, std::uint64_t seed,
                  SamplerConfig base) {
  if (m == 0) fail(ErrorKind::kInvalidArgument, "grad_error: m must be >= 1");
  const auto exact = exact_grad_log_partition(cs, theta);
  base.seed = seed;
  const auto draws = draw_valid(kind, cs, theta, base, m);
  double err = 0.0;
  for (std::size_t i = 0; i < cs.n_vars(); ++i) {
    double mean = 0.0;
    for (const auto& x : draws) mean += x[i];
    mean /= static_cast<double>(m);
    err += std::abs(exact[i] - mean);
  }
  return err;
}

ResampleSummary resample_stats(const SamplerStats& stats) {
  ResampleSummary s;
  double total = 0.0;
  for (auto r : stats.rounds_per_row) {
    ++s.histogram[r];
    total += r;
    s.max_rounds = std::max(s.max_rounds, r);
  }
  if (!stats.rounds_per_row.empty()) {
    s.mean_rounds = total / static_cast<double>(stats.rounds_per_row.size());
  }
  s.variables_resampled = stats.variables_resampled;
  s.per_constraint = stats.per_constraint_resamples;
  return s;
}

}  // namespace nelson
