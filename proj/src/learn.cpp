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

#include "nelson/learn.hpp"

#include <chrono>
#include <cmath>
#include <string>

#include "nelson/error.hpp"
#include "nelson/rng.hpp"

namespace nelson {

void validate_dataset(const Dataset& ds, const ConstraintSet& cs) {
  for (std::size_t k = 0; k < ds.size(); ++k) {
    const auto& row = ds.assignments[k];
    if (row.size() != cs.n_vars()) {
      fail(ErrorKind::kInvalidArgument,
           "dataset row " + std::to_string(k) + " has width " +
               std::to_string(row.size()) + ", expected " +
               std::to_string(cs.n_vars()));
    }
    if (!violated_constraints(cs, row).empty()) {
      fail(ErrorKind::kInvalidArgument,
           "dataset row " + std::to_string(k) + " (" + to_bitstring(row) +
               ") violates the constraints");
    }
  }
}

namespace {

std::vector<double> column_mean(const std::vector<Assignment>& rows,
                                std::size_t n) {
  std::vector<double> mean(n, 0.0);
  for (const auto& r : rows) {
    if (r.size() != n) {
      fail(ErrorKind::kInvalidArgument, "cd_step: batch width mismatch");
    }
    for (std::size_t i = 0; i < n; ++i) mean[i] += r[i];
  }
  for (auto& v : mean) v /= static_cast<double>(rows.size());
  return mean;
}

}  // namespace

std::vector<double> cd_step(const ModelParams& theta,
                            const std::vector<Assignment>& data_batch,
                            const std::vector<Assignment>& model_batch) {
  if (data_batch.empty() || model_batch.empty()) {
    fail(ErrorKind::kInvalidArgument, "cd_step: empty batch");
  }
  const std::size_t n = theta.size();
  const auto data_mean = column_mean(data_batch, n);
  const auto model_mean = column_mean(model_batch, n);
  // grad_theta phi(x) = x, so grad l = -E_data[x] + E_model[x].
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) g[i] = model_mean[i] - data_mean[i];
  return g;
}

double neg_log_likelihood(const ModelParams& theta, const Dataset& ds,
                          const ConstraintSet& cs, std::size_t cap) {
  validate_dataset(ds, cs);
  if (ds.size() == 0) fail(ErrorKind::kInvalidArgument, "empty dataset");
  const auto d = exact_distribution(cs, theta, cap);
  double mean_potential = 0.0;
  for (const auto& row : ds.assignments) mean_potential += potential(theta, row);
  mean_potential /= static_cast<double>(ds.size());
  return -mean_potential + d.log_partition;
}

SamplerConfig sampler_config_for(const TrainConfig& cfg, std::size_t iter) {
  SamplerConfig sc;
  sc.t_tryout = cfg.t_tryout;
  sc.batch_size = cfg.m;
  sc.seed = derive_seed(cfg.seed, static_cast<std::uint32_t>(iter), 0x5a3fu);
  sc.gibbs_burn_in = cfg.gibbs_burn_in;
  sc.gibbs_thinning = cfg.gibbs_thinning;
  sc.threads = cfg.threads;
  return sc;
}

TrainResult train(const Dataset& ds, const ConstraintSet& cs,
                  const TrainConfig& cfg, const ModelParams& theta0) {
  if (cfg.m < 1) fail(ErrorKind::kInvalidArgument, "m must be >= 1");
  if (!(cfg.eta > 0.0)) fail(ErrorKind::kInvalidArgument, "eta must be > 0");
  if (theta0.size() != cs.n_vars()) {
    fail(ErrorKind::kInvalidArgument, "theta0 width does not match n");
  }
  validate_dataset(ds, cs);
  if (cfg.t_max > 0 && ds.size() == 0) {
    fail(ErrorKind::kInvalidArgument, "cannot train on an empty dataset");
  }
  const bool exact_nll = cs.n_vars() <= cfg.enumeration_cap;
  const auto start = std::chrono::steady_clock::now();
  auto elapsed_ms = [&] {
    if (!cfg.record_wall_time) return 0.0;
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now() - start)
        .count();
  };

  TrainResult result{theta0, {}};
  auto trace = [&](std::size_t iter, double grad_l1) {
    TraceEntry e;
    e.iter = iter;
    if (exact_nll && ds.size() > 0) {
      e.nll = neg_log_likelihood(result.theta, ds, cs, cfg.enumeration_cap);
    }
    e.grad_l1 = grad_l1;
    e.wall_ms = elapsed_ms();
    result.trace.push_back(e);
  };
  trace(0, 0.0);

  const std::size_t every = std::max<std::size_t>(cfg.trace_every, 1);
  std::vector<Assignment> data_batch(cfg.m);
  for (std::size_t t = 1; t <= cfg.t_max; ++t) {
    for (std::size_t j = 0; j < cfg.m; ++j) {
      const double u = counter_uniform(cfg.seed, static_cast<std::uint32_t>(t),
                                       static_cast<std::uint32_t>(j), 0,
                                       Stream::kData);
      auto k = static_cast<std::size_t>(u * static_cast<double>(ds.size()));
      data_batch[j] = ds.assignments[std::min(k, ds.size() - 1)];
    }
    const auto model_batch =
        draw_valid(cfg.sampler, cs, result.theta, sampler_config_for(cfg, t),
                   cfg.m, cfg.retry_batches);
    const auto g = cd_step(result.theta, data_batch, model_batch);
    double l1 = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      result.theta.theta[i] -= cfg.eta * g[i];
      l1 += std::abs(g[i]);
    }
    if (t % every == 0 || t == cfg.t_max) trace(t, l1);
  }
  return result;
}

}  // namespace nelson
