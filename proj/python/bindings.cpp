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

#include <sstream>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "nelson/cli.hpp"
#include "nelson/cnf.hpp"
#include "nelson/oracle.hpp"
#include "nelson/sampler.hpp"

namespace py = pybind11;
using namespace nelson;

namespace {

ConstraintSet load(const std::string& dimacs,
                   const std::vector<std::vector<std::size_t>>& groups) {
  auto cs = parse_dimacs(dimacs);
  return groups.empty() ? cs : cs.with_groups(groups);
}

SamplerKind kind_of(const std::string& name) {
  if (name == "nelson") return SamplerKind::kNelson;
  if (name == "moser") return SamplerKind::kMoserTardos;
  if (name == "gibbs") return SamplerKind::kGibbs;
  throw py::value_error("unknown sampler '" + name + "'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Constrained MRF sampler core";

  py::register_exception<Error>(m, "NelsonError", PyExc_RuntimeError);

  m.def(
      "sample",
      [](const std::string& dimacs, const std::vector<double>& theta,
         std::size_t n, std::uint64_t seed, const std::string& sampler,
         std::uint32_t tryout,
         const std::vector<std::vector<std::size_t>>& groups) {
        const auto cs = load(dimacs, groups);
        const auto kind = kind_of(sampler);
        SamplerConfig cfg;
        cfg.batch_size = n;
        cfg.seed = seed;
        cfg.t_tryout = tryout;
        SampleResult r;
        {
          py::gil_scoped_release release;
          r = run_sampler(kind, cs, ModelParams{theta}, cfg);
        }
        py::list rows;
        for (std::size_t l = 0; l < r.batch.size(); ++l) {
          rows.append(to_bitstring(r.batch.row(l)));
        }
        py::dict out;
        out["rows"] = rows;
        out["valid"] = std::vector<bool>(r.batch.valid_flags.begin(),
                                         r.batch.valid_flags.end());
        out["rounds"] = r.stats.rounds_per_row;
        out["per_constraint"] = r.stats.per_constraint_resamples;
        out["exhausted"] = r.stats.exhausted;
        return out;
      },
      py::arg("dimacs"), py::arg("theta"), py::arg("n"), py::arg("seed") = 0,
      py::arg("sampler") = "nelson", py::arg("tryout") = 1000,
      py::arg("groups") = std::vector<std::vector<std::size_t>>{},
      "Draw n rows; returns bitstrings, validity flags and resample stats.");

  m.def(
      "exact_distribution",
      [](const std::string& dimacs, const std::vector<double>& theta,
         const std::vector<std::vector<std::size_t>>& groups) {
        return to_table(exact_distribution(load(dimacs, groups), ModelParams{theta}));
      },
      py::arg("dimacs"), py::arg("theta"),
      py::arg("groups") = std::vector<std::vector<std::size_t>>{});

  m.def(
      "exact_grad",
      [](const std::string& dimacs, const std::vector<double>& theta,
         const std::vector<std::vector<std::size_t>>& groups) {
        return exact_grad_log_partition(load(dimacs, groups), ModelParams{theta});
      },
      py::arg("dimacs"), py::arg("theta"),
      py::arg("groups") = std::vector<std::vector<std::size_t>>{});

  m.def(
      "expected_resamples",
      [](const std::string& dimacs, const std::vector<double>& theta) {
        const auto r = expected_resamples(parse_dimacs(dimacs), ModelParams{theta});
        py::dict out;
        out["q_empty"] = r.q_empty;
        out["per_constraint"] = r.per_constraint_expected;
        out["total"] = r.total_expected;
        out["extremal"] = r.extremal;
        return out;
      },
      py::arg("dimacs"), py::arg("theta"));

  m.def(
      "is_extremal",
      [](const std::string& dimacs) {
        return check_extremal(parse_dimacs(dimacs)).extremal;
      },
      py::arg("dimacs"));

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        int code = 0;
        {
          py::gil_scoped_release release;
          code = cli::run(args, out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Run a CLI plan in-process; returns (code, stdout, stderr).");
}
