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

// Benchmark families: random K-SAT, sink-free orientations of Erdos-Renyi
// graphs, and delivery routes with exactly-one successor/predecessor groups.

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nelson/cnf.hpp"
#include "nelson/learn.hpp"
#include "nelson/mrf.hpp"

namespace nelson {

enum class Family { kKSat, kSinkFree, kRoutes };

std::string to_string(Family f);
Family family_from_string(const std::string& s);

struct ProblemInstance {
  ConstraintSet constraints;
  Family family = Family::kKSat;
  std::uint64_t seed = 0;
  /// Generation parameters, e.g. {"n", 10}, {"K", 5}.
  std::vector<std::pair<std::string, double>> params;
  /// Sink-free: variable e is edge edges[e] = (i, j), i < j, X_e = 1 means
  /// i -> j. Routes: variable v is the arc edges[v] = (i, j).
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  std::size_t num_vertices = 0;
  /// Routes only: symmetric distance matrix.
  std::vector<std::vector<double>> distances;
  /// Suggested weights (routes: -distance per arc).
  std::optional<ModelParams> theta;
};

ProblemInstance gen_ksat(std::size_t n, std::size_t num_clauses, std::size_t k,
                         std::uint64_t seed);

/// Redraws the graph (up to 1000 times) until every vertex has degree >= 1.
ProblemInstance gen_sinkfree(std::size_t num_vertices, double edge_prob,
                             std::uint64_t seed);

/// Clauses of the sink-free encoding for a fixed edge list (i < j per edge).
ConstraintSet sinkfree_constraints(
    std::size_t num_vertices,
    const std::vector<std::pair<std::size_t, std::size_t>>& edges);

ProblemInstance gen_routes(std::size_t num_cities, std::uint64_t seed);

/// N valid rows drawn by the Nelson sampler under theta_star.
Dataset gen_training_set(const ProblemInstance& inst,
                         const ModelParams& theta_star, std::size_t count,
                         std::uint64_t seed, std::uint32_t t_tryout = 1000);

/// Sidecar JSON: exactly-one groups plus family metadata.
std::string emit_instance_json(const ProblemInstance& inst);

}  // namespace nelson
