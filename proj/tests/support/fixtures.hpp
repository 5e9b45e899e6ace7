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

// Shared instances and brute-force references for the test suites.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "nelson/cnf.hpp"
#include "nelson/error.hpp"
#include "nelson/mrf.hpp"
#include "nelson/oracle.hpp"
#include "nelson/problems.hpp"
#include "nelson/rng.hpp"

namespace nelson::testing {

/// (X1 v X2) ^ (!X1 v X3), 0-based variables.
inline ConstraintSet two_clause() {
  return parse_dimacs("p cnf 3 2\n1 2 0\n-1 3 0\n");
}

inline ConstraintSet from_dimacs(const std::string& text) {
  return parse_dimacs(text);
}

inline Assignment bits(const std::string& s) { return from_bitstring(s); }

/// Independent reference: evaluates every literal directly.
inline bool brute_valid(const ConstraintSet& cs, AssignmentView x) {
  for (const auto& c : cs.clauses()) {
    bool sat = false;
    for (const auto& lit : c.literals) {
      sat = sat || ((x[lit.variable] == 1) != lit.negated);
    }
    if (!sat) return false;
  }
  for (const auto& g : cs.exactly_one_groups()) {
    int ones = 0;
    for (auto v : g) ones += x[v];
    if (ones != 1) return false;
  }
  return true;
}

inline Assignment mask_to_assignment(std::uint64_t mask, std::size_t n) {
  Assignment x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = (mask >> i) & 1u;
  return x;
}

/// Clauses of width 1..max_width over n variables, distinct variables per
/// clause, fair-coin polarity.
inline ConstraintSet random_clauses(std::size_t n, std::size_t num_clauses,
                                    std::size_t max_width, std::uint64_t seed,
                                    std::uint32_t tag = 0xc1a05u) {
  PhiloxStream rng(seed, tag);
  std::vector<Clause> clauses;
  for (std::size_t j = 0; j < num_clauses; ++j) {
    const std::size_t w = 1 + rng.below(std::min(max_width, n));
    std::vector<std::size_t> pool(n);
    for (std::size_t i = 0; i < n; ++i) pool[i] = i;
    Clause c;
    for (std::size_t r = 0; r < w; ++r) {
      const auto pick = r + rng.below(n - r);
      std::swap(pool[r], pool[pick]);
      c.literals.push_back({pool[r], (rng() & 1u) != 0});
    }
    clauses.push_back(std::move(c));
  }
  return ConstraintSet(n, std::move(clauses));
}

inline ModelParams random_theta(std::size_t n, std::uint64_t seed,
                                double scale = 1.0) {
  ModelParams m;
  for (std::size_t i = 0; i < n; ++i) {
    const double u = counter_uniform(seed, 0x7e7au, static_cast<std::uint32_t>(i),
                                     0, Stream::kGenerator);
    m.theta.push_back(scale * (2.0 * u - 1.0));
  }
  return m;
}

/// Extremal clause sets with small support: hand-built formulas, sink-free
/// generations, and random clause sets that pass check_extremal.
struct CorpusEntry {
  std::string name;
  ConstraintSet cs;
};

inline bool satisfiable(const ConstraintSet& cs) {
  try {
    exact_distribution(cs, ModelParams::zeros(cs.n_vars()));
    return true;
  } catch (const Error&) {
    return false;
  }
}

inline std::vector<CorpusEntry> extremal_corpus(std::size_t max_support = 64) {
  std::vector<CorpusEntry> out;
  auto add = [&](std::string name, ConstraintSet cs) {
    if (!check_extremal(cs).extremal || !satisfiable(cs)) return;
    const auto d = exact_distribution(cs, ModelParams::zeros(cs.n_vars()));
    if (d.support.size() > max_support) return;
    out.push_back({std::move(name), std::move(cs)});
  };
  add("two_clause", two_clause());
  add("two_units", from_dimacs("p cnf 2 2\n1 0\n2 0\n"));
  add("chain4", from_dimacs("p cnf 4 3\n1 2 0\n-2 3 0\n-3 4 0\n"));
  add("mixed", from_dimacs("p cnf 5 3\n1 -2 0\n2 3 4 0\n-4 5 0\n"));
  add("triangle", sinkfree_constraints(3, {{0, 1}, {0, 2}, {1, 2}}));
  add("square", sinkfree_constraints(4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}}));
  add("square_diag",
      sinkfree_constraints(4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}, {0, 2}}));
  add("k4", sinkfree_constraints(
                4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}));
  add("bowtie", sinkfree_constraints(
                    5, {{0, 1}, {0, 2}, {1, 2}, {2, 3}, {2, 4}, {3, 4}}));
  for (std::uint64_t s = 0; s < 40 && out.size() < 16; ++s) {
    const std::size_t v = 4 + s % 2;
    try {
      auto inst = gen_sinkfree(v, 0.55, 1000 + s);
      if (inst.constraints.n_vars() > 12) continue;
      add("sinkfree_" + std::to_string(1000 + s), inst.constraints);
    } catch (const Error&) {
    }
  }
  for (std::uint64_t s = 0; s < 400 && out.size() < 26; ++s) {
    const std::size_t n = 4 + s % 5;
    add("random_" + std::to_string(s), random_clauses(n, 2 + s % 4, 3, s));
  }
  return out;
}

}  // namespace nelson::testing
