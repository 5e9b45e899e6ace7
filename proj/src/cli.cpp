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

#include "nelson/cli.hpp"

#include <algorithm>
#include <chrono>
#include <ostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "nelson/io.hpp"
#include "nelson/metrics.hpp"
#include "nelson/oracle.hpp"
#include "nelson/rng.hpp"

namespace nelson::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr const char* kToolVersion = "0.1.0";
constexpr int kDefaultsVersion = 1;

const std::map<std::string, SamplerKind> kSamplerNames = {
    {"nelson", SamplerKind::kNelson},
    {"moser", SamplerKind::kMoserTardos},
    {"gibbs", SamplerKind::kGibbs}};

const std::map<std::string, Family> kFamilyNames = {
    {"ksat", Family::kKSat},
    {"sinkfree", Family::kSinkFree},
    {"routes", Family::kRoutes}};

const std::map<std::string, OracleWhat> kWhatNames = {
    {"dist", OracleWhat::kDist},
    {"grad", OracleWhat::kGrad},
    {"resamples", OracleWhat::kResamples}};

void usage_error(const std::string& what) {
  fail(ErrorKind::kInvalidArgument, what);
}

}  // namespace

std::string to_string(Command c) {
  switch (c) {
    case Command::kGen: return "gen";
    case Command::kSample: return "sample";
    case Command::kTrain: return "train";
    case Command::kEval: return "eval";
    case Command::kOracle: return "oracle";
  }
  return "unknown";
}

std::string to_string(SamplerKind k) {
  switch (k) {
    case SamplerKind::kNelson: return "nelson";
    case SamplerKind::kMoserTardos: return "moser";
    case SamplerKind::kGibbs: return "gibbs";
  }
  return "unknown";
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return 1;
    case ErrorKind::kParse:
    case ErrorKind::kIo: return 2;
    case ErrorKind::kInfeasible: return 3;
    case ErrorKind::kCapExceeded: return 4;
    case ErrorKind::kSamplerExhausted: return 5;
  }
  return 1;
}

RunPlan build_plan(const std::vector<std::string>& args) {
  RunPlan plan;
  plan.argv = args;

  CLI::App app{"Constrained MRF sampling and learning", "nelson"};
  app.require_subcommand(1, 1);
  app.set_help_all_flag("--help-all", "Help for every subcommand");

  std::string out_dir = ".";
  std::string cnf, groups, theta, data, preferred, unseen;
  unsigned threads = 0;
  std::uint32_t tryout = 1000;
  std::uint32_t burn_in = 1000;
  std::uint32_t thin = 10;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--seed", plan.seed, "Master seed (default 0)");
    sub->add_option("--out", out_dir, "Output directory (default .)");
    sub->add_option("--threads", threads,
                    "Worker threads; outputs do not depend on it");
  };

  auto* gen = app.add_subcommand("gen", "Generate a problem instance");
  gen->add_option("--family", plan.family, "ksat | sinkfree | routes")
      ->required()
      ->transform(CLI::CheckedTransformer(kFamilyNames, CLI::ignore_case));
  gen->add_option("--size", plan.size,
                  "Variables (ksat), vertices (sinkfree) or cities (routes)")
      ->required()
      ->check(CLI::PositiveNumber);
  auto* k_opt = gen->add_option("--k", plan.k, "Clause width (ksat, default 5)")
                    ->check(CLI::PositiveNumber);
  auto* p_opt = gen->add_option("--edge-prob", plan.edge_prob,
                                "Edge probability (sinkfree, default 0.55)");
  gen->add_option("--train-n", plan.train_n,
                  "Also write preferred/unseen assignment sets of this size");
  add_common(gen);

  auto* sample = app.add_subcommand("sample", "Draw assignments");
  sample->add_option("--cnf", cnf, "DIMACS file")->required();
  sample->add_option("--groups", groups, "Exactly-one groups JSON");
  sample->add_option("--theta", theta, "Model JSON")->required();
  sample->add_option("--sampler", plan.sampler, "nelson | moser | gibbs")
      ->required()
      ->transform(CLI::CheckedTransformer(kSamplerNames, CLI::ignore_case));
  sample->add_option("--n", plan.count, "Rows to draw")
      ->required()
      ->check(CLI::PositiveNumber);
  sample->add_option("--tryout", tryout, "Resampling round cap (default 1000)")
      ->check(CLI::PositiveNumber);
  auto* s_burn = sample->add_option("--burn-in", burn_in, "Gibbs burn-in sweeps");
  auto* s_thin = sample->add_option("--thin", thin, "Gibbs thinning interval")
                     ->check(CLI::PositiveNumber);
  sample->add_flag("--record", plan.record,
                   "Also write the per-row violated-set records");
  add_common(sample);

  auto* train = app.add_subcommand("train", "Contrastive-divergence training");
  // --data is declared first so a bare `train` reports it as missing.
  train->add_option("--data", data, "Training assignments, one per line")
      ->required();
  train->add_option("--cnf", cnf, "DIMACS file")->required();
  train->add_option("--groups", groups, "Exactly-one groups JSON");
  train->add_option("--theta0", theta, "Initial model JSON (default zeros)");
  train->add_option("--m", plan.train_cfg.m, "Model samples per step (default 200)")
      ->check(CLI::PositiveNumber);
  train->add_option("--eta", plan.train_cfg.eta, "Learning rate (default 0.1)");
  train->add_option("--iters", plan.train_cfg.t_max, "Iterations (default 1000)");
  train->add_option("--sampler", plan.train_cfg.sampler, "nelson | moser | gibbs")
      ->transform(CLI::CheckedTransformer(kSamplerNames, CLI::ignore_case));
  train->add_option("--tryout", tryout, "Resampling round cap (default 1000)")
      ->check(CLI::PositiveNumber);
  auto* t_burn = train->add_option("--burn-in", burn_in, "Gibbs burn-in sweeps");
  auto* t_thin = train->add_option("--thin", thin, "Gibbs thinning interval")
                     ->check(CLI::PositiveNumber);
  train->add_option("--trace-every", plan.train_cfg.trace_every,
                    "Trace interval (default 1)")
      ->check(CLI::PositiveNumber);
  train->add_flag("--timing", plan.train_cfg.record_wall_time,
                  "Record wall-clock ms in the trace (breaks byte identity)");
  add_common(train);

  auto* eval = app.add_subcommand("eval", "Evaluate a model");
  eval->add_option("--cnf", cnf, "DIMACS file")->required();
  eval->add_option("--groups", groups, "Exactly-one groups JSON");
  eval->add_option("--theta", theta, "Model JSON")->required();
  eval->add_option("--preferred", preferred, "Preferred assignments")->required();
  eval->add_option("--unseen", unseen, "Unseen valid assignments")->required();
  auto* grad_opt = eval->add_option(
      "--grad-m", plan.grad_m, "Samples for the gradient error (default 1000)");
  eval->add_option("--samples", plan.eval_samples,
                   "Rows drawn for validity and resample stats (default 1000)")
      ->check(CLI::PositiveNumber);
  eval->add_option("--sampler", plan.sampler, "nelson | moser | gibbs")
      ->transform(CLI::CheckedTransformer(kSamplerNames, CLI::ignore_case));
  eval->add_option("--tryout", tryout, "Resampling round cap (default 1000)")
      ->check(CLI::PositiveNumber);
  add_common(eval);

  auto* oracle = app.add_subcommand("oracle", "Exact enumeration quantities");
  oracle->add_option("--cnf", cnf, "DIMACS file")->required();
  oracle->add_option("--groups", groups, "Exactly-one groups JSON");
  oracle->add_option("--theta", theta, "Model JSON")->required();
  oracle->add_option("--what", plan.what, "dist | grad | resamples")
      ->required()
      ->transform(CLI::CheckedTransformer(kWhatNames, CLI::ignore_case));
  oracle->add_option("--cap", plan.cap, "Enumeration cap in variables (default 25)");
  add_common(oracle);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    throw HelpRequested{app.get_subcommands().empty()
                            ? app.help()
                            : app.get_subcommands().front()->help()};
  } catch (const CLI::CallForAllHelp&) {
    throw HelpRequested{app.help("", CLI::AppFormatMode::All)};
  } catch (const CLI::ParseError& e) {
    usage_error(e.what());
  }

  const auto* sub = app.get_subcommands().front();
  const std::string name = sub->get_name();
  if (name == "gen") plan.command = Command::kGen;
  if (name == "sample") plan.command = Command::kSample;
  if (name == "train") plan.command = Command::kTrain;
  if (name == "eval") plan.command = Command::kEval;
  if (name == "oracle") plan.command = Command::kOracle;

  if (plan.command == Command::kGen) {
    if (k_opt->count() > 0 && plan.family != Family::kKSat) {
      usage_error("--k only applies to --family ksat");
    }
    if (p_opt->count() > 0 && plan.family != Family::kSinkFree) {
      usage_error("--edge-prob only applies to --family sinkfree");
    }
  }
  const bool gibbs_flags = (name == "sample" && (s_burn->count() || s_thin->count())) ||
                           (name == "train" && (t_burn->count() || t_thin->count()));
  const SamplerKind kind =
      name == "train" ? plan.train_cfg.sampler : plan.sampler;
  if (gibbs_flags && kind != SamplerKind::kGibbs) {
    usage_error("--burn-in/--thin require --sampler gibbs");
  }
  plan.grad_m_explicit = grad_opt->count() > 0;

  plan.out_dir = out_dir;
  plan.cnf = cnf;
  plan.groups = groups;
  plan.theta = theta;
  plan.data = data;
  plan.preferred = preferred;
  plan.unseen = unseen;

  plan.sampler_cfg.seed = plan.seed;
  plan.sampler_cfg.t_tryout = tryout;
  plan.sampler_cfg.gibbs_burn_in = burn_in;
  plan.sampler_cfg.gibbs_thinning = thin;
  plan.sampler_cfg.threads = threads;
  plan.sampler_cfg.record = plan.record;

  plan.train_cfg.seed = plan.seed;
  plan.train_cfg.t_tryout = tryout;
  plan.train_cfg.gibbs_burn_in = burn_in;
  plan.train_cfg.gibbs_thinning = thin;
  plan.train_cfg.threads = threads;
  return plan;
}

void check_inputs(const RunPlan& plan) {
  for (const fs::path* p : {&plan.cnf, &plan.groups, &plan.theta, &plan.data,
                            &plan.preferred, &plan.unseen}) {
    if (!p->empty() && !fs::is_regular_file(*p)) {
      fail(ErrorKind::kIo, "input file '" + p->string() + "' does not exist");
    }
  }
}

namespace {

ordered_json manifest(const RunPlan& plan) {
  ordered_json m;
  m["tool_version"] = kToolVersion;
  m["defaults_version"] = kDefaultsVersion;
  m["command"] = to_string(plan.command);
  m["argv"] = plan.argv;
  m["seed"] = plan.seed;
  ordered_json r;
  switch (plan.command) {
    case Command::kGen:
      r["family"] = to_string(plan.family);
      r["size"] = plan.size;
      if (plan.family == Family::kKSat) r["k"] = plan.k;
      if (plan.family == Family::kSinkFree) r["edge_prob"] = plan.edge_prob;
      r["train_n"] = plan.train_n;
      break;
    case Command::kSample:
      r["cnf"] = plan.cnf.string();
      r["groups"] = plan.groups.string();
      r["theta"] = plan.theta.string();
      r["sampler"] = to_string(plan.sampler);
      r["n"] = plan.count;
      r["t_tryout"] = plan.sampler_cfg.t_tryout;
      if (plan.sampler == SamplerKind::kGibbs) {
        r["burn_in"] = plan.sampler_cfg.gibbs_burn_in;
        r["thin"] = plan.sampler_cfg.gibbs_thinning;
      }
      r["record"] = plan.record;
      break;
    case Command::kTrain:
      r["cnf"] = plan.cnf.string();
      r["groups"] = plan.groups.string();
      r["data"] = plan.data.string();
      r["theta0"] = plan.theta.string();
      r["m"] = plan.train_cfg.m;
      r["eta"] = plan.train_cfg.eta;
      r["iters"] = plan.train_cfg.t_max;
      r["sampler"] = to_string(plan.train_cfg.sampler);
      r["t_tryout"] = plan.train_cfg.t_tryout;
      if (plan.train_cfg.sampler == SamplerKind::kGibbs) {
        r["burn_in"] = plan.train_cfg.gibbs_burn_in;
        r["thin"] = plan.train_cfg.gibbs_thinning;
      }
      r["trace_every"] = plan.train_cfg.trace_every;
      r["timing"] = plan.train_cfg.record_wall_time;
      break;
    case Command::kEval:
      r["cnf"] = plan.cnf.string();
      r["groups"] = plan.groups.string();
      r["theta"] = plan.theta.string();
      r["preferred"] = plan.preferred.string();
      r["unseen"] = plan.unseen.string();
      r["grad_m"] = plan.grad_m;
      r["samples"] = plan.eval_samples;
      r["sampler"] = to_string(plan.sampler);
      r["t_tryout"] = plan.sampler_cfg.t_tryout;
      break;
    case Command::kOracle:
      r["cnf"] = plan.cnf.string();
      r["groups"] = plan.groups.string();
      r["theta"] = plan.theta.string();
      r["what"] = plan.what == OracleWhat::kDist   ? "dist"
                  : plan.what == OracleWhat::kGrad ? "grad"
                                                   : "resamples";
      r["cap"] = plan.cap;
      break;
  }
  m["resolved"] = r;
  return m;
}

ConstraintSet load_cs(const RunPlan& plan) {
  return io::load_constraints(plan.cnf, plan.groups);
}

ModelParams load_theta(const RunPlan& plan, const ConstraintSet& cs) {
  auto m = io::parse_model_json(io::read_file(plan.theta));
  if (m.size() != cs.n_vars()) {
    fail(ErrorKind::kInvalidArgument,
         "model has " + std::to_string(m.size()) + " weights, instance has " +
             std::to_string(cs.n_vars()) + " variables");
  }
  return m;
}

std::vector<Assignment> load_rows(const fs::path& p, const ConstraintSet& cs) {
  Dataset ds{cs.n_vars(), io::parse_bitstrings(io::read_file(p))};
  validate_dataset(ds, cs);
  return std::move(ds.assignments);
}

int run_gen(const RunPlan& plan) {
  ProblemInstance inst;
  switch (plan.family) {
    case Family::kKSat: inst = gen_ksat(plan.size, plan.size, plan.k, plan.seed); break;
    case Family::kSinkFree: inst = gen_sinkfree(plan.size, plan.edge_prob, plan.seed); break;
    case Family::kRoutes: inst = gen_routes(plan.size, plan.seed); break;
  }
  const auto& cs = inst.constraints;
  io::write_file(plan.out_dir / "instance.cnf", emit_dimacs(cs));
  io::write_file(plan.out_dir / "instance.json", emit_instance_json(inst));

  ModelParams theta_star = inst.theta.value_or(ModelParams{});
  if (!inst.theta) {
    for (std::size_t i = 0; i < cs.n_vars(); ++i) {
      const double u = counter_uniform(plan.seed, 0x7a11u,
                                       static_cast<std::uint32_t>(i), 0,
                                       Stream::kGenerator);
      theta_star.theta.push_back(2.0 * u - 1.0);
    }
  }
  io::write_file(plan.out_dir / "theta_star.json", io::emit_model_json(theta_star));
  if (plan.train_n > 0) {
    const auto preferred = gen_training_set(inst, theta_star, plan.train_n,
                                            derive_seed(plan.seed, 1, 0xda7a));
    const auto unseen = gen_training_set(inst, ModelParams::zeros(cs.n_vars()),
                                         plan.train_n,
                                         derive_seed(plan.seed, 2, 0xda7a));
    io::write_file(plan.out_dir / "preferred.txt",
                   io::emit_bitstrings(preferred.assignments));
    io::write_file(plan.out_dir / "unseen.txt",
                   io::emit_bitstrings(unseen.assignments));
  }
  return 0;
}

int run_sample(const RunPlan& plan) {
  const auto cs = load_cs(plan);
  const auto theta = load_theta(plan, cs);
  auto cfg = plan.sampler_cfg;
  cfg.batch_size = plan.count;
  const auto result = run_sampler(plan.sampler, cs, theta, cfg);
  io::write_file(plan.out_dir / "samples.txt", io::emit_sample_dump(result.batch));
  io::write_file(plan.out_dir / "stats.json", io::emit_stats_json(result.stats));
  if (plan.record) {
    ordered_json rec = ordered_json::array();
    for (const auto& row : result.stats.records) rec.push_back(row);
    io::write_file(plan.out_dir / "records.json", rec.dump() + "\n");
  }
  if (result.stats.exhausted > 0) {
    fail(ErrorKind::kSamplerExhausted,
         std::to_string(result.stats.exhausted) + " of " +
             std::to_string(plan.count) + " rows hit the tryout cap");
  }
  return 0;
}

int run_train(const RunPlan& plan) {
  const auto cs = load_cs(plan);
  Dataset ds{cs.n_vars(), load_rows(plan.data, cs)};
  const auto theta0 = plan.theta.empty() ? ModelParams::zeros(cs.n_vars())
                                         : load_theta(plan, cs);
  const auto result = train(ds, cs, plan.train_cfg, theta0);
  io::write_file(plan.out_dir / "model.json", io::emit_model_json(result.theta));
  io::write_file(plan.out_dir / "trace.csv", io::emit_trace_csv(result.trace));
  return 0;
}

int run_eval(const RunPlan& plan) {
  const auto cs = load_cs(plan);
  const auto theta = load_theta(plan, cs);
  const auto preferred = load_rows(plan.preferred, cs);
  const auto unseen = load_rows(plan.unseen, cs);

  MetricReport report;
  report.map_at_10 = map_at_10(theta, preferred, unseen);

  auto cfg = plan.sampler_cfg;
  cfg.batch_size = plan.eval_samples;
  const auto drawn = run_sampler(plan.sampler, cs, theta, cfg);
  report.validity = validity(drawn.batch, cs);
  report.resamples = resample_stats(drawn.stats);

  const bool enumerable = cs.n_vars() <= kDefaultEnumerationCap;
  if (!enumerable && plan.grad_m_explicit) {
    fail(ErrorKind::kCapExceeded,
         "gradient error needs n <= " + std::to_string(kDefaultEnumerationCap));
  }
  if (enumerable) {
    report.nll = neg_log_likelihood(theta, Dataset{cs.n_vars(), preferred}, cs);
    if (plan.grad_m > 0) {
      auto gcfg = plan.sampler_cfg;
      gcfg.batch_size = plan.grad_m;
      report.grad_error_l1 =
          grad_error(cs, theta, plan.sampler, plan.grad_m,
                     derive_seed(plan.seed, 3, 0x9ad), gcfg);
    }
  }
  io::write_file(plan.out_dir / "report.json", io::emit_report_json(report));
  io::write_file(plan.out_dir / "histogram.csv",
                 io::emit_histogram_csv(*report.resamples));
  return 0;
}

int run_oracle(const RunPlan& plan) {
  const auto cs = load_cs(plan);
  const auto theta = load_theta(plan, cs);
  switch (plan.what) {
    case OracleWhat::kDist:
      io::write_file(plan.out_dir / "distribution.json",
                     io::emit_distribution_json(exact_distribution(cs, theta, plan.cap)));
      break;
    case OracleWhat::kGrad:
      io::write_file(plan.out_dir / "grad.json",
                     io::emit_vector_json(exact_grad_log_partition(cs, theta, plan.cap)));
      break;
    case OracleWhat::kResamples:
      io::write_file(plan.out_dir / "resamples.json",
                     io::emit_expectation_json(expected_resamples(cs, theta, plan.cap)));
      break;
  }
  return 0;
}

}  // namespace

int execute_plan(const RunPlan& plan) {
  check_inputs(plan);
  std::error_code ec;
  fs::create_directories(plan.out_dir, ec);
  if (ec) {
    fail(ErrorKind::kIo, "cannot create '" + plan.out_dir.string() + "'");
  }
  io::write_file(plan.out_dir / "manifest.json", manifest(plan).dump(2) + "\n");
  switch (plan.command) {
    case Command::kGen: return run_gen(plan);
    case Command::kSample: return run_sample(plan);
    case Command::kTrain: return run_train(plan);
    case Command::kEval: return run_eval(plan);
    case Command::kOracle: return run_oracle(plan);
  }
  return 1;
}

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  auto report = [&](ErrorKind kind, const std::string& what) {
    ordered_json e;
    e["error"] = std::string(nelson::to_string(kind));
    e["message"] = what;
    e["exit_code"] = exit_code(kind);
    err << e.dump() << '\n';
    return exit_code(kind);
  };
  try {
    return execute_plan(build_plan(args));
  } catch (const HelpRequested& h) {
    out << h.text;
    return 0;
  } catch (const Error& e) {
    return report(e.kind(), e.what());
  } catch (const fs::filesystem_error& e) {
    return report(ErrorKind::kIo, e.what());
  } catch (const std::bad_alloc&) {
    return report(ErrorKind::kCapExceeded, "out of memory");
  }
}

}  // namespace nelson::cli
