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

// Acceptance suite: one PASS/FAIL line per criterion.
//   acceptance            run every criterion
//   acceptance 3 7        run criteria 3 and 7
// Exit status is nonzero if any selected criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "nelson/cli.hpp"
#include "nelson/io.hpp"
#include "nelson/learn.hpp"
#include "nelson/metrics.hpp"
#include "nelson/sampler.hpp"
#include "nelson/tensor.hpp"

using namespace nelson;
using namespace nelson::testing;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

SamplerConfig rows_cfg(std::size_t rows, std::uint64_t seed) {
  SamplerConfig cfg;
  cfg.batch_size = rows;
  cfg.seed = seed;
  return cfg;
}

double empirical_tv(const SampleResult& r, const ExactDistribution& d) {
  return tv_distance(empirical_table(r.batch.rows, r.batch.n, r.batch.valid_flags),
                     to_table(d));
}

// Sink-free generations with at most `max_edges` edges and a satisfying
// orientation.
std::vector<ConstraintSet> sinkfree_instances(std::size_t count, std::size_t vertices,
                                              std::size_t max_edges,
                                              std::uint64_t first_seed) {
  std::vector<ConstraintSet> out;
  for (std::uint64_t s = first_seed; out.size() < count && s < first_seed + 1000; ++s) {
    const auto inst = gen_sinkfree(vertices, 0.55, s);
    if (inst.constraints.n_vars() > max_edges || !satisfiable(inst.constraints)) continue;
    out.push_back(inst.constraints);
  }
  return out;
}

// ---------------------------------------------------------------------------

Outcome unbiasedness() {
  const auto corpus = extremal_corpus();
  std::size_t sinkfree = 0, runs = 0, bad = 0;
  double worst = 0.0;
  std::string worst_name;
  for (std::size_t c = 0; c < corpus.size(); ++c) {
    const auto& [name, cs] = corpus[c];
    if (name.rfind("sinkfree", 0) == 0 || name == "triangle" || name == "square" ||
        name == "square_diag" || name == "k4" || name == "bowtie") {
      ++sinkfree;
    }
    const std::size_t n = cs.n_vars();
    for (int v = 0; v < 4; ++v) {
      const auto theta = v == 0 ? ModelParams::zeros(n) : random_theta(n, 100 * c + v);
      const auto r = nelson_sample(cs, theta, rows_cfg(100000, 7000 + 10 * c + v));
      const double tv = empirical_tv(r, exact_distribution(cs, theta));
      ++runs;
      if (tv > 0.02) ++bad;
      if (tv > worst) {
        worst = tv;
        worst_name = name;
      }
    }
  }
  const bool big_enough = corpus.size() >= 20;
  return {big_enough && bad == 0,
          fmt("%zu extremal instances (%zu sink-free), %zu runs of 1e5 draws; max TV "
              "%.4f (%s), %zu above 0.02",
              corpus.size(), sinkfree, runs, worst, worst_name.c_str(), bad)};
}

Outcome expected_resample_counts() {
  struct Row {
    std::string name;
    ConstraintSet cs;
  };
  std::vector<Row> cases{{"two_clause", two_clause()}};
  const auto sf = sinkfree_instances(5, 5, 12, 500);
  for (std::size_t k = 0; k < sf.size(); ++k) cases.push_back({"sinkfree#" + std::to_string(k), sf[k]});

  double worst = 0.0;
  std::string worst_at;
  bool pass = sf.size() == 5;
  for (std::size_t c = 0; c < cases.size(); ++c) {
    const auto& cs = cases[c].cs;
    const auto theta = ModelParams::zeros(cs.n_vars());
    const auto expect = expected_resamples(cs, theta);
    pass = pass && expect.extremal;
    const auto r = nelson_sample(cs, theta, rows_cfg(100000, 900 + c));
    double total = 0.0;
    for (std::size_t j = 0; j < cs.num_constraints(); ++j) {
      const double mean = r.stats.per_constraint_resamples[j] / 1e5;
      total += mean;
      const double rel = std::abs(mean - expect.per_constraint_expected[j]) /
                         expect.per_constraint_expected[j];
      if (rel > worst) {
        worst = rel;
        worst_at = cases[c].name + " c" + std::to_string(j);
      }
    }
    const double rel_total = std::abs(total - expect.total_expected) / expect.total_expected;
    if (rel_total > worst) {
      worst = rel_total;
      worst_at = cases[c].name + " total";
    }
    if (c == 0) {
      worst_at += fmt(" [two-clause total %.4f, per-constraint %.4f/%.4f]", total,
                      r.stats.per_constraint_resamples[0] / 1e5,
                      r.stats.per_constraint_resamples[1] / 1e5);
    }
  }
  pass = pass && worst <= 0.05;
  return {pass, fmt("%zu instances x 1e5 runs; worst relative error %.4f at %s (limit 0.05)",
                    cases.size(), worst, worst_at.c_str())};
}

Outcome validity_everywhere() {
  std::vector<ConstraintSet> corpus;
  for (const auto& e : extremal_corpus()) corpus.push_back(e.cs);
  for (std::uint64_t s = 0; s < 30; ++s) {
    corpus.push_back(random_clauses(5 + s % 8, 3 + s % 9, 4, 5000 + s));
  }
  for (std::uint64_t s = 0; s < 5; ++s) corpus.push_back(gen_ksat(12, 12, 5, s).constraints);
  corpus.push_back(gen_routes(3, 1).constraints);
  corpus.push_back(gen_routes(4, 2).constraints);
  corpus.push_back(gen_sinkfree(8, 0.55, 3).constraints);

  std::uint64_t checked = 0, violations = 0;
  for (std::size_t c = 0; c < corpus.size(); ++c) {
    const auto& cs = corpus[c];
    for (auto kind : {SamplerKind::kNelson, SamplerKind::kMoserTardos}) {
      auto cfg = rows_cfg(10000, 40 + c);
      const auto r = run_sampler(kind, cs, random_theta(cs.n_vars(), c), cfg);
      for (std::size_t l = 0; l < r.batch.size(); ++l) {
        if (!r.batch.valid_flags[l]) continue;
        ++checked;
        if (!violated_constraints(cs, r.batch.row(l)).empty() ||
            !brute_valid(cs, r.batch.row(l))) {
          ++violations;
        }
      }
    }
  }
  return {violations == 0 && checked > 0,
          fmt("%zu instances, %llu accepted rows checked, %llu violations", corpus.size(),
              static_cast<unsigned long long>(checked),
              static_cast<unsigned long long>(violations))};
}

Outcome golden_tensors() {
  const auto t = encode_tensors(two_clause());
  const std::vector<std::int8_t> W = {1, 0, 0, 0, 1, 0, -1, 0, 0, 0, 0, 1};
  const std::vector<std::uint8_t> b = {0, 0, 1, 0}, V = {1, 1, 0, 1, 0, 1};
  const auto x = from_bitstring("001");
  const auto st = satisfaction_pass(t, x, 1);
  const std::vector<std::int8_t> Z = {0, 0, 1, 1};
  const std::vector<std::uint8_t> S = {1, 0}, A = {1, 1, 0};
  const auto mask = resample_mask(t, st.S, 1);
  const bool ok = t.W == W && t.b == b && t.V == V && st.Z == Z && st.S == S && mask == A;
  return {ok, fmt("W %s, b %s, V %s, Z %s, S %s, A %s", t.W == W ? "ok" : "MISMATCH",
                  t.b == b ? "ok" : "MISMATCH", t.V == V ? "ok" : "MISMATCH",
                  st.Z == Z ? "ok" : "MISMATCH", st.S == S ? "ok" : "MISMATCH",
                  mask == A ? "ok" : "MISMATCH")};
}

Outcome gradient_estimator() {
  ConstraintSet ten;
  for (const auto& cs : sinkfree_instances(50, 6, 10, 0)) {
    if (cs.n_vars() == 10 && check_extremal(cs).extremal) {
      ten = cs;
      break;
    }
  }
  if (ten.n_vars() != 10) return {false, "no 10-variable extremal instance generated"};

  bool pass = true;
  std::string detail;
  for (const auto& [name, cs] : std::vector<std::pair<std::string, ConstraintSet>>{
           {"two_clause", two_clause()}, {"sinkfree n=10", ten}}) {
    const auto theta = ModelParams::zeros(cs.n_vars());
    int within = 0;
    std::vector<double> errs;
    for (std::uint64_t s = 0; s < 100; ++s) {
      const double e = grad_error(cs, theta, SamplerKind::kNelson, 2000, 30000 + s);
      errs.push_back(e);
      if (e <= 0.05) ++within;
    }
    std::sort(errs.begin(), errs.end());
    std::vector<double> small, large;
    for (std::uint64_t s = 0; s < 20; ++s) {
      small.push_back(grad_error(cs, theta, SamplerKind::kNelson, 500, 40000 + s));
      large.push_back(grad_error(cs, theta, SamplerKind::kNelson, 8000, 50000 + s));
    }
    std::sort(small.begin(), small.end());
    std::sort(large.begin(), large.end());
    const double med_small = (small[9] + small[10]) / 2, med_large = (large[9] + large[10]) / 2;
    const bool ok = within >= 99 && med_large < med_small;
    pass = pass && ok;
    detail += fmt("%s%s: m=2000 error <= 0.05 in %d/100 seeds (need 99; median %.4f, "
                  "p99 %.4f); median m=8000 %.4f vs m=500 %.4f",
                  detail.empty() ? "" : "; ", name.c_str(), within,
                  (errs[49] + errs[50]) / 2, errs[98], med_large, med_small);
  }
  return {pass, detail};
}

Outcome oracle_finite_differences() {
  int pairs = 0;
  double worst = 0.0;
  for (std::uint64_t s = 0; pairs < 50; ++s) {
    const std::size_t n = 2 + s % 11;
    const auto cs = random_clauses(n, 1 + s % 6, 4, 600 + s);
    if (!satisfiable(cs)) continue;
    ++pairs;
    const auto theta = random_theta(n, 700 + s, 2.0);
    const auto g = exact_grad_log_partition(cs, theta);
    for (std::size_t i = 0; i < n; ++i) {
      auto up = theta, down = theta;
      up.theta[i] += 1e-5;
      down.theta[i] -= 1e-5;
      const double fd = (exact_distribution(cs, up).log_partition -
                         exact_distribution(cs, down).log_partition) / 2e-5;
      worst = std::max(worst, std::abs(fd - g[i]));
    }
  }
  return {worst <= 1e-6, fmt("%d (instance, theta) pairs, max |fd - grad| = %.3g (limit 1e-6)",
                             pairs, worst)};
}

Outcome learning() {
  ProblemInstance inst;
  std::uint64_t seed = 11;
  for (;; ++seed) {
    inst = gen_sinkfree(8, 0.55, seed);
    if (inst.constraints.n_vars() <= 20 && satisfiable(inst.constraints)) break;
  }
  const auto& cs = inst.constraints;
  const std::size_t n = cs.n_vars();
  const auto star = random_theta(n, seed);
  const auto data = gen_training_set(inst, star, 200, 77);
  const auto others = gen_training_set(inst, ModelParams::zeros(n), 400, 78);

  TrainConfig cfg;
  cfg.t_max = 500;
  cfg.seed = 5;
  cfg.trace_every = 500;
  const auto theta0 = ModelParams::zeros(n);
  const auto r = train(data, cs, cfg, theta0);
  const double nll0 = neg_log_likelihood(theta0, data, cs);
  const double nll1 = neg_log_likelihood(r.theta, data, cs);
  const double map0 = map_at_10(theta0, data.assignments, others.assignments);
  const double map1 = map_at_10(r.theta, data.assignments, others.assignments);
  const bool ok = nll0 - nll1 >= 0.05 && map1 >= map0;
  return {ok, fmt("sink-free V=8 (%zu edges): NLL %.4f -> %.4f (drop %.4f, need 0.05); "
                  "MAP@10 %.2f -> %.2f",
                  n, nll0, nll1, nll0 - nll1, map0, map1)};
}

Outcome record_structure() {
  const auto corpus = extremal_corpus();
  std::uint64_t runs = 0, transitions = 0, escapes = 0, dependent = 0;
  for (std::size_t c = 0; c < corpus.size() && runs < 10000; ++c) {
    const auto& cs = corpus[c].cs;
    const auto g = build_dependency_graph(cs);
    auto cfg = rows_cfg(1000, 80 + c);
    cfg.record = true;
    const auto r = nelson_sample(cs, random_theta(cs.n_vars(), c), cfg);
    for (const auto& rec : r.stats.records) {
      ++runs;
      for (std::size_t t = 0; t < rec.size(); ++t) {
        for (std::size_t a = 0; a < rec[t].size(); ++a) {
          for (std::size_t b = a + 1; b < rec[t].size(); ++b) {
            if (g.adjacent(rec[t][a], rec[t][b])) ++dependent;
          }
        }
        if (t + 1 == rec.size()) continue;
        ++transitions;
        const std::vector<std::size_t> cur(rec[t].begin(), rec[t].end());
        const auto nb = gamma(g, cur);
        for (auto j : rec[t + 1]) {
          if (!std::binary_search(nb.begin(), nb.end(), j)) ++escapes;
        }
      }
    }
  }
  return {runs >= 10000 && escapes == 0 && dependent == 0,
          fmt("%llu recorded runs, %llu transitions: %llu outside the neighbourhood, "
              "%llu dependent pairs within a round",
              static_cast<unsigned long long>(runs), static_cast<unsigned long long>(transitions),
              static_cast<unsigned long long>(escapes),
              static_cast<unsigned long long>(dependent))};
}

Outcome sampler_comparison() {
  std::vector<std::pair<std::string, ConstraintSet>> cases = {
      {"two_clause", two_clause()},
      {"chain4", parse_dimacs("p cnf 4 3\n1 2 0\n-2 3 0\n-3 4 0\n")},
      {"k4", sinkfree_constraints(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}})}};
  for (const auto& cs : sinkfree_instances(2, 6, 12, 300)) {
    cases.push_back({"sinkfree#" + std::to_string(cases.size()), cs});
  }
  bool pass = cases.size() == 5;
  std::string detail;
  for (std::size_t c = 0; c < cases.size(); ++c) {
    const auto& cs = cases[c].second;
    const auto theta = ModelParams::zeros(cs.n_vars());
    auto mean_rounds = [&](SamplerKind k) {
      const auto s = resample_stats(run_sampler(k, cs, theta, rows_cfg(10000, 60 + c)).stats);
      return s.mean_rounds;
    };
    const double nel = mean_rounds(SamplerKind::kNelson);
    const double mt = mean_rounds(SamplerKind::kMoserTardos);
    pass = pass && check_extremal(cs).extremal && mt >= nel;
    detail += fmt("%s%s %.3f>=%.3f", detail.empty() ? "" : ", ", cases[c].first.c_str(), mt, nel);
  }
  return {pass, "mean rounds moser vs nelson: " + detail};
}

Outcome pairwise_equivalence() {
  double worst = 0.0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const std::size_t n = 2 + s % 2;
    PhiloxStream rng(s, 0xa11u);
    FactorSpec f;
    for (std::size_t i = 0; i < n; ++i) f.linear[i] = 4.0 * rng.uniform() - 2.0;
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = a + 1; b < n; ++b) {
        if (n == 2 || rng.uniform() < 0.8) f.pairwise[{a, b}] = 4.0 * rng.uniform() - 2.0;
      }
    }
    const ConstraintSet base = s % 4 == 3 ? parse_dimacs(n == 2 ? "p cnf 2 1\n1 2 0\n"
                                                                : "p cnf 3 1\n1 -3 0\n")
                                          : ConstraintSet(n, {});
    // Direct enumeration of the pairwise model.
    DistributionTable direct;
    double z = 0.0;
    for (std::uint64_t mask = 0; mask < (1u << n); ++mask) {
      const auto x = mask_to_assignment(mask, n);
      if (!brute_valid(base, x)) continue;
      const double w = std::exp(factor_potential(f, x));
      direct[to_bitstring(x)] = w;
      z += w;
    }
    for (auto& [k, v] : direct) v /= z;
    const auto t = pairwise_to_single(f, base);
    const auto d = exact_distribution(t.constraints, t.params);
    DistributionTable reduced;
    for (std::size_t k = 0; k < d.support.size(); ++k) {
      auto x = d.assignment(k);
      x.resize(n);
      reduced[to_bitstring(x)] += d.probabilities[k];
    }
    worst = std::max(worst, tv_distance(direct, reduced));
  }
  return {worst <= 1e-10, fmt("20 pairwise models (2-3 variables), max TV %.3g (limit 1e-10)", worst)};
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) {
      files[fs::relative(e.path(), dir).string()] = io::read_file(e.path());
    }
  }
  return files;
}

Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / "nelson_acceptance_determinism";
  fs::remove_all(root);
  fs::create_directories(root);
  const std::string in = (root / "in").string();
  fs::create_directories(in);
  std::ostringstream sink;
  auto cli = [&](std::vector<std::string> args) { return cli::run(args, sink, sink); };
  if (cli({"gen", "--family", "sinkfree", "--size", "7", "--seed", "2", "--train-n", "60",
           "--out", in}) != 0) {
    return {false, "gen failed: " + sink.str()};
  }
  const std::string cnf = in + "/instance.cnf", theta = in + "/theta_star.json";
  const std::vector<std::vector<std::string>> plans = {
      {"gen", "--family", "ksat", "--size", "12", "--k", "3", "--seed", "4", "--train-n", "20"},
      {"gen", "--family", "routes", "--size", "4", "--seed", "4"},
      {"sample", "--cnf", cnf, "--theta", theta, "--sampler", "nelson", "--n", "3000",
       "--seed", "9", "--record"},
      {"sample", "--cnf", cnf, "--theta", theta, "--sampler", "moser", "--n", "3000", "--seed", "9"},
      {"sample", "--cnf", cnf, "--theta", theta, "--sampler", "gibbs", "--n", "500",
       "--burn-in", "50", "--thin", "3", "--seed", "9"},
      {"train", "--cnf", cnf, "--data", in + "/preferred.txt", "--iters", "40", "--m", "100",
       "--seed", "3"},
      {"eval", "--cnf", cnf, "--theta", theta, "--preferred", in + "/preferred.txt",
       "--unseen", in + "/unseen.txt", "--samples", "500", "--grad-m", "500", "--seed", "1"},
      {"oracle", "--cnf", cnf, "--theta", theta, "--what", "dist"},
      {"oracle", "--cnf", cnf, "--theta", theta, "--what", "resamples"},
  };
  int identical = 0;
  std::string mismatch;
  for (std::size_t p = 0; p < plans.size(); ++p) {
    std::map<std::string, std::string> first;
    for (int rep = 0; rep < 2; ++rep) {
      // Same --out path both times so the manifest echo is identical too.
      const fs::path out = root / ("plan" + std::to_string(p));
      fs::remove_all(out);
      auto args = plans[p];
      args.push_back("--out");
      args.push_back(out.string());
      if (cli(args) != 0) return {false, "plan " + plans[p][0] + " failed: " + sink.str()};
      auto files = snapshot(out);
      if (rep == 0) {
        first = std::move(files);
      } else if (files == first) {
        ++identical;
      } else if (mismatch.empty()) {
        mismatch = plans[p][0];
      }
    }
  }

  // Batch of b rows against b single-row runs.
  const auto cs = io::load_constraints(cnf);
  const auto m = io::parse_model_json(io::read_file(theta));
  std::size_t rows_equal = 0;
  const std::size_t b = 200;
  for (auto kind : {SamplerKind::kNelson, SamplerKind::kMoserTardos}) {
    auto cfg = rows_cfg(b, 21);
    cfg.record = true;
    const auto batch = run_sampler(kind, cs, m, cfg);
    for (std::uint32_t l = 0; l < b; ++l) {
      auto one = cfg;
      one.batch_size = 1;
      one.row_offset = l;
      const auto r = run_sampler(kind, cs, m, one);
      if (std::equal(r.batch.rows.begin(), r.batch.rows.end(), batch.batch.row(l).begin()) &&
          r.batch.valid_flags[0] == batch.batch.valid_flags[l] &&
          r.stats.rounds_per_row[0] == batch.stats.rounds_per_row[l] &&
          r.stats.records[0] == batch.stats.records[l]) {
        ++rows_equal;
      }
    }
  }
  fs::remove_all(root);
  const bool ok = identical == static_cast<int>(plans.size()) && rows_equal == 2 * b;
  return {ok, fmt("%d/%zu CLI plans byte-identical on rerun%s%s; batch vs sequential rows "
                  "equal %zu/%zu",
                  identical, plans.size(), mismatch.empty() ? "" : ", first mismatch: ",
                  mismatch.c_str(), rows_equal, 2 * b)};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
};

const std::vector<Criterion> kCriteria = {
    {1, "unbiasedness", unbiasedness},
    {2, "expected-resamples", expected_resample_counts},
    {3, "validity", validity_everywhere},
    {4, "golden-tensors", golden_tensors},
    {5, "gradient-estimator", gradient_estimator},
    {6, "oracle-finite-differences", oracle_finite_differences},
    {7, "learning", learning},
    {8, "record-structure", record_structure},
    {9, "sampler-comparison", sampler_comparison},
    {10, "pairwise-equivalence", pairwise_equivalence},
    {11, "determinism", determinism},
};

}  // namespace

int main(int argc, char** argv) {
  std::set<int> selected;
  for (int a = 1; a < argc; ++a) selected.insert(std::atoi(argv[a]));
  int failures = 0;
  for (const auto& c : kCriteria) {
    if (!selected.empty() && !selected.contains(c.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s criterion %d %s: %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", c.id, c.name,
                o.detail.c_str(), secs);
    std::fflush(stdout);
    if (!o.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
