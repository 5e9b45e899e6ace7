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

#include "nelson/sampler.hpp"

#include <algorithm>
#include <string>
#include <thread>

#include "nelson/error.hpp"
#include "nelson/rng.hpp"
#include "nelson/tensor.hpp"

namespace nelson {

std::size_t AssignmentBatch::valid_count() const {
  return static_cast<std::size_t>(
      std::count(valid_flags.begin(), valid_flags.end(), std::uint8_t{1}));
}

namespace {

enum class Selection { kAllViolated, kLowestIndex };

// Per-thread accumulators, merged in chunk order.
struct Tally {
  std::vector<std::uint64_t> per_constraint;
  std::uint64_t variables = 0;
};

class ResampleEngine {
 public:
  ResampleEngine(const ConstraintSet& cs, const ModelParams& m,
                 const SamplerConfig& cfg, Selection selection)
      : cs_(cs),
        cfg_(cfg),
        selection_(selection),
        tensors_(encode_tensors(cs)),
        p_zero_(marginals(m)) {}

  SampleResult run() const {
    const std::size_t n = cs_.n_vars();
    const std::size_t rows = cfg_.batch_size;
    SampleResult out;
    out.batch.n = n;
    out.batch.rows.assign(rows * n, 0);
    out.batch.valid_flags.assign(rows, 0);
    out.stats.rounds_per_row.assign(rows, 0);
    out.stats.per_constraint_resamples.assign(cs_.num_constraints(), 0);
    if (cfg_.record) out.stats.records.resize(rows);

    unsigned threads = cfg_.threads ? cfg_.threads
                                    : std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(
        std::min<std::size_t>(threads, std::max<std::size_t>(rows / 64, 1)));
    std::vector<Tally> tallies(threads);
    auto work = [&](unsigned chunk) {
      Tally& tally = tallies[chunk];
      tally.per_constraint.assign(cs_.num_constraints(), 0);
      const std::size_t begin = rows * chunk / threads;
      const std::size_t end = rows * (chunk + 1) / threads;
      Scratch scratch(tensors_, cs_);
      for (std::size_t l = begin; l < end; ++l) {
        auto x = std::span<std::uint8_t>(out.batch.rows).subspan(l * n, n);
        auto* record = cfg_.record ? &out.stats.records[l] : nullptr;
        const auto [rounds, valid] =
            run_row(static_cast<std::uint32_t>(cfg_.row_offset + l), x,
                    scratch, tally, record);
        out.stats.rounds_per_row[l] = rounds;
        out.batch.valid_flags[l] = valid ? 1 : 0;
      }
    };
    if (threads == 1) {
      work(0);
    } else {
      std::vector<std::jthread> pool;
      for (unsigned c = 0; c < threads; ++c) pool.emplace_back(work, c);
    }
    for (const auto& t : tallies) {
      for (std::size_t j = 0; j < t.per_constraint.size(); ++j) {
        out.stats.per_constraint_resamples[j] += t.per_constraint[j];
      }
      out.stats.variables_resampled += t.variables;
    }
    out.stats.exhausted = rows - out.batch.valid_count();
    return out;
  }

 private:
  struct Scratch {
    Scratch(const ClauseTensors& t, const ConstraintSet& cs)
        : z(t.L * t.K), s(t.L), mask(cs.n_vars()) {
      violated.reserve(cs.num_constraints());
    }
    std::vector<std::int8_t> z;
    std::vector<std::uint8_t> s;
    std::vector<std::uint8_t> mask;
    std::vector<std::uint32_t> violated;
  };

  void draw(std::uint32_t row, std::uint32_t round, std::size_t i,
            std::span<std::uint8_t> x) const {
    const double u = counter_uniform(cfg_.seed, row, round,
                                     static_cast<std::uint32_t>(i),
                                     Stream::kSampler);
    x[i] = u > p_zero_[i] ? 1 : 0;
  }

  std::pair<std::uint32_t, bool> run_row(std::uint32_t row,
                                         std::span<std::uint8_t> x,
                                         Scratch& sc, Tally& tally,
                                         std::vector<ViolationSet>* record) const {
    const std::size_t n = cs_.n_vars();
    const std::size_t n_clauses = cs_.num_clauses();
    std::uint32_t round = 1;
    for (std::size_t i = 0; i < n; ++i) draw(row, round, i, x);

    for (;;) {
      sc.violated.clear();
      if (kernel::clause_pass(tensors_, x, sc.z, sc.s) > 0) {
        for (std::size_t j = 0; j < n_clauses; ++j) {
          if (sc.s[j]) sc.violated.push_back(static_cast<std::uint32_t>(j));
        }
      }
      for (std::size_t j = n_clauses; j < cs_.num_constraints(); ++j) {
        if (!cs_.satisfied(j, x)) {
          sc.violated.push_back(static_cast<std::uint32_t>(j));
        }
      }
      if (sc.violated.empty()) return {round, true};
      if (round >= cfg_.t_tryout) return {round, false};
      if (record) record->push_back(sc.violated);

      std::fill(sc.mask.begin(), sc.mask.end(), std::uint8_t{0});
      if (selection_ == Selection::kAllViolated) {
        kernel::accumulate_mask(tensors_, sc.s, sc.mask);
        for (auto j : sc.violated) {
          ++tally.per_constraint[j];
          if (cs_.is_group(j)) {
            for (auto v : cs_.variables_of(j)) sc.mask[v] = 1;
          }
        }
      } else {
        const auto j = sc.violated.front();
        ++tally.per_constraint[j];
        for (auto v : cs_.variables_of(j)) sc.mask[v] = 1;
      }

      ++round;
      for (std::size_t i = 0; i < n; ++i) {
        if (sc.mask[i]) {
          draw(row, round, i, x);
          ++tally.variables;
        }
      }
    }
  }

  const ConstraintSet& cs_;
  SamplerConfig cfg_;
  Selection selection_;
  ClauseTensors tensors_;
  std::vector<double> p_zero_;
};

void check_config(const ConstraintSet& cs, const ModelParams& m,
                  const SamplerConfig& cfg) {
  if (m.size() != cs.n_vars()) {
    fail(ErrorKind::kInvalidArgument,
         "model has " + std::to_string(m.size()) + " weights, constraint set " +
             std::to_string(cs.n_vars()) + " variables");
  }
  if (cfg.t_tryout < 1) fail(ErrorKind::kInvalidArgument, "t_tryout must be >= 1");
  if (cfg.batch_size < 1) fail(ErrorKind::kInvalidArgument, "batch_size must be >= 1");
}

}  // namespace

SampleResult nelson_sample(const ConstraintSet& cs, const ModelParams& m,
                           const SamplerConfig& cfg) {
  check_config(cs, m, cfg);
  return ResampleEngine(cs, m, cfg, Selection::kAllViolated).run();
}

SampleResult moser_tardos_sample(const ConstraintSet& cs, const ModelParams& m,
                                 const SamplerConfig& cfg) {
  check_config(cs, m, cfg);
  return ResampleEngine(cs, m, cfg, Selection::kLowestIndex).run();
}

SampleResult gibbs_sample(const ConstraintSet& cs, const ModelParams& m,
                          const SamplerConfig& cfg,
                          std::optional<Assignment> init) {
  check_config(cs, m, cfg);
  if (cfg.gibbs_thinning < 1) {
    fail(ErrorKind::kInvalidArgument, "Gibbs thinning must be >= 1");
  }
  const std::size_t n = cs.n_vars();
  Assignment x;
  if (init) {
    if (init->size() != n) {
      fail(ErrorKind::kInvalidArgument, "Gibbs initial assignment has wrong width");
    }
    x = std::move(*init);
  } else {
    SamplerConfig start = cfg;
    start.batch_size = 1;
    start.row_offset = 0;
    start.record = false;
    start.threads = 1;
    start.seed = derive_seed(cfg.seed, 0x61bb5u, cfg.row_offset);
    auto first = nelson_sample(cs, m, start);
    if (!first.batch.valid_flags[0]) {
      fail(ErrorKind::kSamplerExhausted,
           "Gibbs: no valid initial assignment within t_tryout=" +
               std::to_string(cfg.t_tryout));
    }
    x.assign(first.batch.rows.begin(), first.batch.rows.end());
  }

  std::vector<std::vector<std::size_t>> incident(n);
  for (std::size_t j = 0; j < cs.num_constraints(); ++j) {
    for (auto v : cs.variables_of(j)) incident[v].push_back(j);
  }
  const auto p_zero = marginals(m);
  auto locally_valid = [&](std::size_t i) {
    for (auto j : incident[i]) {
      if (!cs.satisfied(j, x)) return false;
    }
    return true;
  };

  SampleResult out;
  out.batch.n = n;
  out.batch.rows.reserve(cfg.batch_size * n);
  out.stats.per_constraint_resamples.assign(cs.num_constraints(), 0);
  std::uint32_t sweep = 0;
  for (std::size_t k = 0; k < cfg.batch_size; ++k) {
    const std::uint32_t sweeps = k == 0 ? cfg.gibbs_burn_in : cfg.gibbs_thinning;
    for (std::uint32_t s = 0; s < sweeps; ++s) {
      ++sweep;
      for (std::size_t i = 0; i < n; ++i) {
        const std::uint8_t old = x[i];
        x[i] = 0;
        const bool ok0 = locally_valid(i);
        x[i] = 1;
        const bool ok1 = locally_valid(i);
        if (!ok0 && !ok1) {
          x[i] = old;
          continue;
        }
        const double p_one = ok0 && ok1 ? 1.0 - p_zero[i] : (ok1 ? 1.0 : 0.0);
        const double u = counter_uniform(cfg.seed, cfg.row_offset, sweep,
                                         static_cast<std::uint32_t>(i),
                                         Stream::kGibbs);
        x[i] = u < p_one ? 1 : 0;
        ++out.stats.variables_resampled;
      }
    }
    out.batch.rows.insert(out.batch.rows.end(), x.begin(), x.end());
    out.batch.valid_flags.push_back(violated_constraints(cs, x).empty() ? 1 : 0);
    out.stats.rounds_per_row.push_back(sweeps);
  }
  out.stats.exhausted = cfg.batch_size - out.batch.valid_count();
  return out;
}

SampleResult run_sampler(SamplerKind kind, const ConstraintSet& cs,
                         const ModelParams& m, const SamplerConfig& cfg) {
  switch (kind) {
    case SamplerKind::kNelson: return nelson_sample(cs, m, cfg);
    case SamplerKind::kMoserTardos: return moser_tardos_sample(cs, m, cfg);
    case SamplerKind::kGibbs: return gibbs_sample(cs, m, cfg);
  }
  fail(ErrorKind::kInvalidArgument, "unknown sampler kind");
}

std::vector<Assignment> draw_valid(SamplerKind kind, const ConstraintSet& cs,
                                   const ModelParams& m, SamplerConfig cfg,
                                   std::size_t count, std::size_t max_batches) {
  std::vector<Assignment> out;
  out.reserve(count);
  if (count == 0) return out;
  const std::uint64_t base_seed = cfg.seed;
  cfg.batch_size = count;
  cfg.record = false;
  for (std::size_t attempt = 0; attempt < max_batches && out.size() < count;
       ++attempt) {
    cfg.seed = attempt == 0
                   ? base_seed
                   : derive_seed(base_seed, static_cast<std::uint32_t>(attempt),
                                 0xd7a3u);
    const auto result = run_sampler(kind, cs, m, cfg);
    for (std::size_t l = 0; l < result.batch.size() && out.size() < count; ++l) {
      if (result.batch.valid_flags[l]) {
        const auto row = result.batch.row(l);
        out.emplace_back(row.begin(), row.end());
      }
    }
  }
  if (out.size() < count) {
    fail(ErrorKind::kSamplerExhausted,
         "obtained " + std::to_string(out.size()) + " of " +
             std::to_string(count) + " valid samples within " +
             std::to_string(max_batches) + " batches");
  }
  return out;
}

}  // namespace nelson
