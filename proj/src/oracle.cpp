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

#include "nelson/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "nelson/error.hpp"

namespace nelson {
namespace {

// Constraints as bit masks over the assignment word.
struct MaskedConstraints {
  std::vector<std::uint64_t> positive;  // clause: variables appearing plain
  std::vector<std::uint64_t> negative;  // clause: variables appearing negated
  std::vector<std::uint64_t> members;   // group: member variables

  explicit MaskedConstraints(const ConstraintSet& cs) {
    for (const auto& c : cs.clauses()) {
      std::uint64_t pos = 0, neg = 0;
      for (const auto& lit : c.literals) {
        (lit.negated ? neg : pos) |= std::uint64_t{1} << lit.variable;
      }
      positive.push_back(pos);
      negative.push_back(neg);
    }
    for (const auto& g : cs.exactly_one_groups()) {
      std::uint64_t mem = 0;
      for (auto v : g) mem |= std::uint64_t{1} << v;
      members.push_back(mem);
    }
  }

  std::size_t size() const { return positive.size() + members.size(); }

  bool violated(std::size_t j, std::uint64_t x) const {
    if (j < positive.size()) {
      return (x & positive[j]) == 0 && (~x & negative[j]) == 0;
    }
    return std::popcount(x & members[j - positive.size()]) != 1;
  }

  bool valid(std::uint64_t x) const {
    for (std::size_t j = 0; j < size(); ++j) {
      if (violated(j, x)) return false;
    }
    return true;
  }
};

void check_cap(const ConstraintSet& cs, std::size_t cap) {
  const std::size_t hard = 40;
  if (cs.n_vars() > std::min(cap, hard)) {
    fail(ErrorKind::kCapExceeded,
         "enumeration over " + std::to_string(cs.n_vars()) +
             " variables exceeds cap " + std::to_string(std::min(cap, hard)));
  }
}

void check_width(const ConstraintSet& cs, const ModelParams& m) {
  if (m.size() != cs.n_vars()) {
    fail(ErrorKind::kInvalidArgument,
         "model has " + std::to_string(m.size()) + " weights, constraint set " +
             std::to_string(cs.n_vars()) + " variables");
  }
  for (double t : m.theta) {
    if (!std::isfinite(t)) fail(ErrorKind::kInvalidArgument, "non-finite theta");
  }
}

double mask_potential(const ModelParams& m, std::uint64_t x) {
  double sum = 0.0;
  while (x) {
    const int i = std::countr_zero(x);
    sum += m.theta[static_cast<std::size_t>(i)];
    x &= x - 1;
  }
  return sum;
}

// Product of marginals, P(x) = prod_i p1_i^{x_i} (1 - p1_i)^{1 - x_i}.
double product_mass(const std::vector<double>& p_zero, std::uint64_t x) {
  double prob = 1.0;
  for (std::size_t i = 0; i < p_zero.size(); ++i) {
    prob *= ((x >> i) & 1u) ? 1.0 - p_zero[i] : p_zero[i];
  }
  return prob;
}

}  // namespace

Assignment ExactDistribution::assignment(std::size_t k) const {
  Assignment x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = (support[k] >> i) & 1u;
  return x;
}

ExactDistribution exact_distribution(const ConstraintSet& cs,
                                     const ModelParams& m, std::size_t cap) {
  check_width(cs, m);
  check_cap(cs, cap);
  const MaskedConstraints masks(cs);
  ExactDistribution d;
  d.n = cs.n_vars();
  std::vector<double> log_weights;
  const std::uint64_t count = std::uint64_t{1} << cs.n_vars();
  for (std::uint64_t x = 0; x < count; ++x) {
    if (!masks.valid(x)) continue;
    d.support.push_back(x);
    log_weights.push_back(mask_potential(m, x));
  }
  if (d.support.empty()) {
    fail(ErrorKind::kInfeasible, "constraint set has no satisfying assignment");
  }
  const double top = *std::max_element(log_weights.begin(), log_weights.end());
  double sum = 0.0;
  for (double lw : log_weights) sum += std::exp(lw - top);
  d.log_partition = top + std::log(sum);
  d.probabilities.reserve(log_weights.size());
  for (double lw : log_weights) {
    d.probabilities.push_back(std::exp(lw - d.log_partition));
  }
  return d;
}

std::vector<double> exact_grad_log_partition(const ConstraintSet& cs,
                                             const ModelParams& m,
                                             std::size_t cap) {
  const auto d = exact_distribution(cs, m, cap);
  std::vector<double> grad(d.n, 0.0);
  for (std::size_t k = 0; k < d.support.size(); ++k) {
    for (std::size_t i = 0; i < d.n; ++i) {
      if ((d.support[k] >> i) & 1u) grad[i] += d.probabilities[k];
    }
  }
  return grad;
}

ResampleExpectation expected_resamples(const ConstraintSet& cs,
                                       const ModelParams& m, std::size_t cap) {
  check_width(cs, m);
  check_cap(cs, cap);
  const MaskedConstraints masks(cs);
  const auto p_zero = marginals(m);
  ResampleExpectation r;
  r.q_single.assign(masks.size(), 0.0);
  const std::uint64_t count = std::uint64_t{1} << cs.n_vars();
  for (std::uint64_t x = 0; x < count; ++x) {
    std::size_t broken = 0;
    std::size_t which = 0;
    for (std::size_t j = 0; j < masks.size() && broken < 2; ++j) {
      if (masks.violated(j, x)) {
        ++broken;
        which = j;
      }
    }
    if (broken == 0) {
      r.q_empty += product_mass(p_zero, x);
    } else if (broken == 1) {
      r.q_single[which] += product_mass(p_zero, x);
    }
  }
  if (!(r.q_empty > 0.0)) {
    fail(ErrorKind::kInfeasible,
         "q_empty = 0: no assignment satisfies every constraint");
  }
  r.per_constraint_expected.reserve(masks.size());
  for (double q : r.q_single) {
    r.per_constraint_expected.push_back(q / r.q_empty);
    r.total_expected += q / r.q_empty;
  }
  try {
    r.extremal = check_extremal(cs).extremal;
  } catch (const Error&) {
    r.extremal = false;
  }
  return r;
}

std::map<std::vector<std::size_t>, double> violation_pattern_masses(
    const ConstraintSet& cs, const ModelParams& m, std::size_t cap) {
  check_width(cs, m);
  check_cap(cs, cap);
  const MaskedConstraints masks(cs);
  if (masks.size() > 64) {
    fail(ErrorKind::kCapExceeded, "violation patterns need <= 64 constraints");
  }
  const auto p_zero = marginals(m);
  std::unordered_map<std::uint64_t, double> by_pattern;
  const std::uint64_t count = std::uint64_t{1} << cs.n_vars();
  for (std::uint64_t x = 0; x < count; ++x) {
    std::uint64_t pattern = 0;
    for (std::size_t j = 0; j < masks.size(); ++j) {
      if (masks.violated(j, x)) pattern |= std::uint64_t{1} << j;
    }
    by_pattern[pattern] += product_mass(p_zero, x);
  }
  std::map<std::vector<std::size_t>, double> out;
  for (const auto& [pattern, mass] : by_pattern) {
    std::vector<std::size_t> key;
    for (std::size_t j = 0; j < masks.size(); ++j) {
      if ((pattern >> j) & 1u) key.push_back(j);
    }
    out[key] += mass;
  }
  return out;
}

double tv_distance(const DistributionTable& p, const DistributionTable& q) {
  double sum = 0.0;
  auto check = [](double v) {
    if (v < 0.0 || !std::isfinite(v)) {
      fail(ErrorKind::kInvalidArgument, "distribution table has negative mass");
    }
  };
  for (const auto& [key, pv] : p) {
    check(pv);
    const auto it = q.find(key);
    sum += std::abs(pv - (it == q.end() ? 0.0 : it->second));
  }
  for (const auto& [key, qv] : q) {
    check(qv);
    if (!p.contains(key)) sum += qv;
  }
  return 0.5 * sum;
}

DistributionTable to_table(const ExactDistribution& d) {
  DistributionTable t;
  for (std::size_t k = 0; k < d.support.size(); ++k) {
    t[to_bitstring(d.assignment(k))] = d.probabilities[k];
  }
  return t;
}

DistributionTable empirical_table(std::span<const std::uint8_t> rows,
                                  std::size_t n,
                                  std::span<const std::uint8_t> valid_flags) {
  DistributionTable t;
  std::size_t kept = 0;
  for (std::size_t l = 0; l < valid_flags.size(); ++l) {
    if (!valid_flags[l]) continue;
    t[to_bitstring(rows.subspan(l * n, n))] += 1.0;
    ++kept;
  }
  for (auto& [key, v] : t) v /= static_cast<double>(kept);
  return t;
}

}  // namespace nelson
