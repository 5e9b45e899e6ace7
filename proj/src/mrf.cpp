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

#include "nelson/mrf.hpp"

#include <cmath>
#include <string>

#include "nelson/error.hpp"

namespace nelson {

std::vector<double> marginals(const ModelParams& m) {
  std::vector<double> p(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    const double t = m.theta[i];
    if (!std::isfinite(t)) {
      fail(ErrorKind::kInvalidArgument,
           "theta[" + std::to_string(i) + "] is not finite");
    }
    // exp(0) / (exp(0) + exp(t)), written to avoid overflow for large |t|.
    p[i] = t >= 0 ? std::exp(-t) / (1.0 + std::exp(-t))
                  : 1.0 / (1.0 + std::exp(t));
  }
  return p;
}

double potential(const ModelParams& m, AssignmentView x) {
  if (x.size() != m.size()) {
    fail(ErrorKind::kInvalidArgument,
         "potential: assignment width " + std::to_string(x.size()) +
             " != model width " + std::to_string(m.size()));
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i]) sum += m.theta[i];
  }
  return sum;
}

double factor_potential(const FactorSpec& f, AssignmentView x) {
  double sum = 0.0;
  for (const auto& [v, c] : f.linear) sum += c * x[v];
  for (const auto& [pair, c] : f.pairwise) {
    sum += c * x[pair.first] * x[pair.second];
  }
  return sum;
}

PairwiseTransform pairwise_to_single(const FactorSpec& f,
                                     const ConstraintSet& base) {
  const std::size_t n = base.n_vars();
  for (const auto& [v, c] : f.linear) {
    if (v >= n) {
      fail(ErrorKind::kInvalidArgument,
           "linear term references variable " + std::to_string(v));
    }
  }
  for (const auto& [pair, c] : f.pairwise) {
    if (pair.first >= n || pair.second >= n) {
      fail(ErrorKind::kInvalidArgument,
           "pairwise term (" + std::to_string(pair.first) + ", " +
               std::to_string(pair.second) + ") out of range");
    }
    if (pair.first == pair.second) {
      fail(ErrorKind::kInvalidArgument,
           "pairwise term needs two distinct variables");
    }
  }

  PairwiseTransform out;
  out.original_vars = n;
  const std::size_t total = n + 4 * f.pairwise.size();
  out.params.theta.assign(total, 0.0);
  for (const auto& [v, c] : f.linear) out.params.theta[v] += c;

  std::vector<Clause> clauses = base.clauses();
  std::size_t next = n;
  for (const auto& [pair, coef] : f.pairwise) {
    AuxiliaryBlock block{pair.first, pair.second, {}};
    for (int uv = 0; uv < 4; ++uv) {
      const std::size_t aux = next++;
      block.aux[uv] = aux;
      const bool u = (uv >> 1) & 1;
      const bool v = uv & 1;
      // Literals true exactly when x_a == u and x_b == v.
      const Literal la{pair.first, !u};
      const Literal lb{pair.second, !v};
      clauses.push_back({{{aux, true}, la}});
      clauses.push_back({{{aux, true}, lb}});
      clauses.push_back({{{la.variable, !la.negated},
                          {lb.variable, !lb.negated},
                          {aux, false}}});
    }
    out.params.theta[block.aux[3]] = coef;
    out.blocks.push_back(block);
  }
  out.constraints =
      ConstraintSet(total, std::move(clauses), base.exactly_one_groups());
  return out;
}

}  // namespace nelson
