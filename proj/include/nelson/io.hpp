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

// File formats:
//   model        {"n": int, "theta": [floats]}
//   factor spec  {"linear": {"i": coef}, "pairwise": [["i", "j", coef]]}
//   dataset      one '0'/'1' bitstring per line
//   sample dump  one bitstring per line, " INVALID" appended for exhausted rows
//   stats        {"rounds": [...], "per_constraint": [...], "exhausted": int}
//   distribution [{"assignment": "bits", "prob": float}, ...]

#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "nelson/cnf.hpp"
#include "nelson/learn.hpp"
#include "nelson/metrics.hpp"
#include "nelson/mrf.hpp"
#include "nelson/oracle.hpp"
#include "nelson/sampler.hpp"

namespace nelson::io {

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

/// DIMACS file plus optional groups sidecar.
ConstraintSet load_constraints(const std::filesystem::path& cnf,
                               const std::filesystem::path& groups = {});

std::string emit_model_json(const ModelParams& m);
ModelParams parse_model_json(std::string_view text);

FactorSpec parse_factor_json(std::string_view text);

std::string emit_bitstrings(const std::vector<Assignment>& rows);
/// Blank lines are skipped; every row must have the same width.
std::vector<Assignment> parse_bitstrings(std::string_view text);

std::string emit_sample_dump(const AssignmentBatch& batch);
AssignmentBatch parse_sample_dump(std::string_view text);

std::string emit_stats_json(const SamplerStats& stats);
std::string emit_distribution_json(const ExactDistribution& d);
std::string emit_vector_json(const std::vector<double>& v);
std::string emit_expectation_json(const ResampleExpectation& r);
std::string emit_report_json(const MetricReport& r);
std::string emit_histogram_csv(const ResampleSummary& s);
std::string emit_trace_csv(const std::vector<TraceEntry>& trace);

}  // namespace nelson::io
