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

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "nelson/error.hpp"
#include "nelson/learn.hpp"
#include "nelson/problems.hpp"
#include "nelson/sampler.hpp"

namespace nelson::cli {

enum class Command { kGen, kSample, kTrain, kEval, kOracle };
enum class OracleWhat { kDist, kGrad, kResamples };

std::string to_string(Command c);
std::string to_string(SamplerKind k);

struct RunPlan {
  Command command = Command::kSample;
  std::uint64_t seed = 0;
  std::filesystem::path out_dir = ".";

  // inputs; empty when unused
  std::filesystem::path cnf;
  std::filesystem::path groups;
  std::filesystem::path theta;
  std::filesystem::path data;
  std::filesystem::path preferred;
  std::filesystem::path unseen;

  // gen
  Family family = Family::kKSat;
  std::size_t size = 0;
  std::size_t k = 5;
  double edge_prob = 0.55;
  std::size_t train_n = 0;

  // sample / eval
  SamplerKind sampler = SamplerKind::kNelson;
  SamplerConfig sampler_cfg;
  std::size_t count = 0;
  bool record = false;

  // train
  TrainConfig train_cfg;

  // eval
  std::size_t grad_m = 1000;
  bool grad_m_explicit = false;
  std::size_t eval_samples = 1000;

  // oracle
  OracleWhat what = OracleWhat::kDist;
  std::size_t cap = kDefaultEnumerationCap;

  std::vector<std::string> argv;  // echo for the manifest
};

/// Thrown by build_plan for --help; carries the rendered usage text.
struct HelpRequested {
  std::string text;
};

/// Parses a subcommand and its flags; never touches the filesystem.
/// Throws Error(kInvalidArgument) on unknown flags, missing required
/// arguments, or conflicting flags.
RunPlan build_plan(const std::vector<std::string>& args);

/// Throws Error(kIo) when a referenced input file does not exist.
void check_inputs(const RunPlan& plan);

/// Exit status of a completed run; artifacts are written under out_dir.
int execute_plan(const RunPlan& plan);

int exit_code(ErrorKind kind);

/// Full entry point: parse, check, execute. Errors go to `err` as one JSON
/// line and map to exit_code().
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace nelson::cli
