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

#include "nelson/problems.hpp"

#include <algorithm>
#include <numeric>

#include <json.hpp>

#include "nelson/error.hpp"
#include "nelson/rng.hpp"
#include "nelson/sampler.hpp"

namespace nelson {

std::string to_string(Family f) {
  switch (f) {
    case Family::kKSat: return "ksat";
    case Family::kSinkFree: return "sinkfree";
    case Family::kRoutes: return "routes";
  }
  return "unknown";
}

Family family_from_string(const std::string& s) {
  if (s == "ksat") return Family::kKSat;
  if (s == "sinkfree") return Family::kSinkFree;
  if (s == "routes") return Family::kRoutes;
  fail(ErrorKind::kInvalidArgument, "unknown family '" + s + "'");
}

ProblemInstance gen_ksat(std::size_t n, std::size_t num_clauses, std::size_t k,
                         std::uint64_t seed) {
  if (k == 0 || k > n) {
    fail(ErrorKind::kInvalidArgument,
         "clause width K=" + std::to_string(k) + " must be in 1..n=" +
             std::to_string(n));
  }
  PhiloxStream rng(seed, 0x6b5a7u);
  std::vector<std::size_t> pool(n);
  std::vector<Clause> clauses;
  clauses.reserve(num_clauses);
  for (std::size_t j = 0; j < num_clauses; ++j) {
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    Clause c;
    // Partial Fisher-Yates: the first k entries are a uniform k-subset.
    for (std::size_t r = 0; r < k; ++r) {
      const auto pick = r + rng.below(n - r);
      std::swap(pool[r], pool[pick]);
      c.literals.push_back({pool[r], (rng() & 1u) != 0});
    }
    clauses.push_back(std::move(c));
  }
  ProblemInstance inst;
  inst.constraints = ConstraintSet(n, std::move(clauses));
  inst.family = Family::kKSat;
  inst.seed = seed;
  inst.params = {{"n", static_cast<double>(n)},
                 {"L", static_cast<double>(num_clauses)},
                 {"K", static_cast<double>(k)}};
  return inst;
}

ConstraintSet sinkfree_constraints(
    std::size_t num_vertices,
    const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
  std::vector<Clause> clauses(num_vertices);
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const auto [i, j] = edges[e];
    if (i >= j || j >= num_vertices) {
      fail(ErrorKind::kInvalidArgument, "edges must be (i, j) with i < j < V");
    }
    // X_e = 1 orients i -> j: outgoing for i, incoming for j.
    clauses[i].literals.push_back({e, false});
    clauses[j].literals.push_back({e, true});
  }
  for (std::size_t v = 0; v < num_vertices; ++v) {
    if (clauses[v].literals.empty()) {
      fail(ErrorKind::kInvalidArgument,
           "vertex " + std::to_string(v) + " has no incident edge");
    }
  }
  return ConstraintSet(edges.size(), std::move(clauses));
}

ProblemInstance gen_sinkfree(std::size_t num_vertices, double edge_prob,
                             std::uint64_t seed) {
  if (num_vertices < 2) {
    fail(ErrorKind::kInvalidArgument, "sink-free instances need >= 2 vertices");
  }
  if (!(edge_prob > 0.0 && edge_prob <= 1.0)) {
    fail(ErrorKind::kInvalidArgument, "edge probability must be in (0, 1]");
  }
  for (std::uint32_t draw = 0; draw < 1000; ++draw) {
    PhiloxStream rng(seed, 0x51f0000u + draw);
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    std::vector<std::size_t> degree(num_vertices, 0);
    for (std::size_t i = 0; i < num_vertices; ++i) {
      for (std::size_t j = i + 1; j < num_vertices; ++j) {
        if (rng.uniform() < edge_prob) {
          edges.emplace_back(i, j);
          ++degree[i];
          ++degree[j];
        }
      }
    }
    if (std::find(degree.begin(), degree.end(), 0) != degree.end()) continue;
    ProblemInstance inst;
    inst.constraints = sinkfree_constraints(num_vertices, edges);
    inst.family = Family::kSinkFree;
    inst.seed = seed;
    inst.params = {{"vertices", static_cast<double>(num_vertices)},
                   {"edge_prob", edge_prob},
                   {"graph_draws", static_cast<double>(draw + 1)}};
    inst.edges = std::move(edges);
    inst.num_vertices = num_vertices;
    return inst;
  }
  fail(ErrorKind::kInfeasible,
       "no graph without isolated vertices in 1000 draws");
}

ProblemInstance gen_routes(std::size_t num_cities, std::uint64_t seed) {
  if (num_cities < 2) {
    fail(ErrorKind::kInvalidArgument, "route instances need >= 2 cities");
  }
  PhiloxStream rng(seed, 0x7e0u);
  std::vector<std::vector<double>> dist(num_cities,
                                        std::vector<double>(num_cities, 0.0));
  for (std::size_t i = 0; i < num_cities; ++i) {
    for (std::size_t j = i + 1; j < num_cities; ++j) {
      dist[i][j] = dist[j][i] = rng.uniform();
    }
  }
  std::vector<std::pair<std::size_t, std::size_t>> arcs;
  std::vector<std::vector<std::size_t>> var_of(
      num_cities, std::vector<std::size_t>(num_cities, 0));
  ModelParams theta;
  for (std::size_t i = 0; i < num_cities; ++i) {
    for (std::size_t j = 0; j < num_cities; ++j) {
      if (i == j) continue;
      var_of[i][j] = arcs.size();
      arcs.emplace_back(i, j);
      theta.theta.push_back(-dist[i][j]);
    }
  }
  std::vector<VariableGroup> groups;
  for (std::size_t i = 0; i < num_cities; ++i) {  // one successor
    VariableGroup g;
    for (std::size_t j = 0; j < num_cities; ++j) {
      if (i != j) g.push_back(var_of[i][j]);
    }
    groups.push_back(std::move(g));
  }
  for (std::size_t j = 0; j < num_cities; ++j) {  // one predecessor
    VariableGroup g;
    for (std::size_t i = 0; i < num_cities; ++i) {
      if (i != j) g.push_back(var_of[i][j]);
    }
    groups.push_back(std::move(g));
  }
  ProblemInstance inst;
  inst.constraints = ConstraintSet(arcs.size(), {}, std::move(groups));
  inst.family = Family::kRoutes;
  inst.seed = seed;
  inst.params = {{"cities", static_cast<double>(num_cities)}};
  inst.edges = std::move(arcs);
  inst.num_vertices = num_cities;
  inst.distances = std::move(dist);
  inst.theta = std::move(theta);
  return inst;
}

Dataset gen_training_set(const ProblemInstance& inst,
                         const ModelParams& theta_star, std::size_t count,
                         std::uint64_t seed, std::uint32_t t_tryout) {
  const auto& cs = inst.constraints;
  if (theta_star.size() != cs.n_vars()) {
    fail(ErrorKind::kInvalidArgument, "theta_star width does not match instance");
  }
  Dataset ds;
  ds.n_vars = cs.n_vars();
  SamplerConfig cfg;
  cfg.seed = seed;
  cfg.t_tryout = t_tryout;
  ds.assignments = draw_valid(SamplerKind::kNelson, cs, theta_star, cfg, count);
  validate_dataset(ds, cs);
  return ds;
}

std::string emit_instance_json(const ProblemInstance& inst) {
  nlohmann::ordered_json doc;
  doc["exactly_one"] = inst.constraints.exactly_one_groups();
  doc["family"] = to_string(inst.family);
  doc["seed"] = inst.seed;
  nlohmann::ordered_json params = nlohmann::ordered_json::object();
  for (const auto& [k, v] : inst.params) params[k] = v;
  doc["params"] = params;
  doc["n_vars"] = inst.constraints.n_vars();
  if (!inst.edges.empty()) {
    doc["num_vertices"] = inst.num_vertices;
    nlohmann::ordered_json edges = nlohmann::ordered_json::array();
    for (const auto& [i, j] : inst.edges) edges.push_back({i, j});
    doc[inst.family == Family::kRoutes ? "arcs" : "edges"] = edges;
  }
  if (!inst.distances.empty()) doc["distances"] = inst.distances;
  return doc.dump(2) + "\n";
}

}  // namespace nelson
