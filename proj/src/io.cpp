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

#include "nelson/io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "nelson/error.hpp"

namespace nelson::io {

using nlohmann::ordered_json;

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::kIo, "cannot write '" + path.string() + "'");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) fail(ErrorKind::kIo, "write failed for '" + path.string() + "'");
}

ConstraintSet load_constraints(const std::filesystem::path& cnf,
                               const std::filesystem::path& groups) {
  auto cs = parse_dimacs(read_file(cnf));
  if (groups.empty()) return cs;
  return cs.with_groups(parse_groups_json(read_file(groups)));
}

namespace {

template <typename F>
auto json_guard(const char* what, F&& f) {
  try {
    return f();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::kParse, std::string(what) + ": " + e.what());
  }
}

std::size_t parse_index(const std::string& key) {
  std::size_t pos = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(key, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != key.size() || key.empty()) {
    fail(ErrorKind::kParse, "factor JSON: bad variable index '" + key + "'");
  }
  return static_cast<std::size_t>(v);
}

std::size_t index_of(const nlohmann::json& j) {
  if (j.is_number_unsigned()) return j.get<std::size_t>();
  if (j.is_string()) return parse_index(j.get<std::string>());
  fail(ErrorKind::kParse, "factor JSON: variable index must be a string or integer");
}

}  // namespace

std::string emit_model_json(const ModelParams& m) {
  ordered_json doc;
  doc["n"] = m.size();
  doc["theta"] = m.theta;
  return doc.dump() + "\n";
}

ModelParams parse_model_json(std::string_view text) {
  return json_guard("model JSON", [&] {
    const auto doc = nlohmann::json::parse(text);
    ModelParams m{doc.at("theta").get<std::vector<double>>()};
    if (doc.contains("n") && doc.at("n").get<std::size_t>() != m.size()) {
      fail(ErrorKind::kParse, "model JSON: n does not match theta length");
    }
    return m;
  });
}

FactorSpec parse_factor_json(std::string_view text) {
  return json_guard("factor JSON", [&] {
    const auto doc = nlohmann::json::parse(text);
    FactorSpec f;
    if (doc.contains("linear")) {
      for (const auto& [key, coef] : doc.at("linear").items()) {
        f.linear[parse_index(key)] += coef.get<double>();
      }
    }
    if (doc.contains("pairwise")) {
      for (const auto& term : doc.at("pairwise")) {
        if (!term.is_array() || term.size() != 3) {
          fail(ErrorKind::kInvalidArgument,
               "factor JSON: only pairwise [i, j, coef] interaction terms are "
               "supported");
        }
        auto a = index_of(term[0]);
        auto b = index_of(term[1]);
        if (a > b) std::swap(a, b);
        f.pairwise[{a, b}] += term[2].get<double>();
      }
    }
    return f;
  });
}

std::string emit_bitstrings(const std::vector<Assignment>& rows) {
  std::string out;
  for (const auto& r : rows) {
    out += to_bitstring(r);
    out += '\n';
  }
  return out;
}

std::vector<Assignment> parse_bitstrings(std::string_view text) {
  std::vector<Assignment> rows;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) {
      line.pop_back();
    }
    if (line.empty()) continue;
    rows.push_back(from_bitstring(line));
    if (rows.back().size() != rows.front().size()) {
      fail(ErrorKind::kParse, "bitstring rows have different widths");
    }
  }
  return rows;
}

std::string emit_sample_dump(const AssignmentBatch& batch) {
  std::string out;
  out.reserve(batch.size() * (batch.n + 9));
  for (std::size_t l = 0; l < batch.size(); ++l) {
    out += to_bitstring(batch.row(l));
    if (!batch.valid_flags[l]) out += " INVALID";
    out += '\n';
  }
  return out;
}

AssignmentBatch parse_sample_dump(std::string_view text) {
  AssignmentBatch batch;
  std::istringstream in{std::string(text)};
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string bits, marker;
    fields >> bits >> marker;
    const auto x = from_bitstring(bits);
    if (first) {
      batch.n = x.size();
      first = false;
    } else if (x.size() != batch.n) {
      fail(ErrorKind::kParse, "sample dump rows have different widths");
    }
    if (!marker.empty() && marker != "INVALID") {
      fail(ErrorKind::kParse, "sample dump: unknown marker '" + marker + "'");
    }
    batch.rows.insert(batch.rows.end(), x.begin(), x.end());
    batch.valid_flags.push_back(marker.empty() ? 1 : 0);
  }
  return batch;
}

std::string emit_stats_json(const SamplerStats& stats) {
  ordered_json doc;
  doc["rounds"] = stats.rounds_per_row;
  doc["per_constraint"] = stats.per_constraint_resamples;
  doc["exhausted"] = stats.exhausted;
  doc["variables_resampled"] = stats.variables_resampled;
  return doc.dump() + "\n";
}

std::string emit_distribution_json(const ExactDistribution& d) {
  ordered_json doc = ordered_json::array();
  for (std::size_t k = 0; k < d.support.size(); ++k) {
    ordered_json entry;
    entry["assignment"] = to_bitstring(d.assignment(k));
    entry["prob"] = d.probabilities[k];
    doc.push_back(entry);
  }
  return doc.dump(1) + "\n";
}

std::string emit_vector_json(const std::vector<double>& v) {
  return ordered_json(v).dump() + "\n";
}

std::string emit_expectation_json(const ResampleExpectation& r) {
  ordered_json doc;
  doc["q_empty"] = r.q_empty;
  doc["q_single"] = r.q_single;
  doc["per_constraint_expected"] = r.per_constraint_expected;
  doc["total_expected"] = r.total_expected;
  doc["extremal"] = r.extremal;
  return doc.dump() + "\n";
}

std::string emit_report_json(const MetricReport& r) {
  ordered_json doc = ordered_json::object();
  if (r.validity) doc["validity"] = *r.validity;
  if (r.map_at_10) doc["map_at_10"] = *r.map_at_10;
  if (r.grad_error_l1) doc["grad_error_l1"] = *r.grad_error_l1;
  if (r.nll) doc["nll"] = *r.nll;
  if (r.resamples) {
    ordered_json hist = ordered_json::object();
    for (const auto& [rounds, count] : r.resamples->histogram) {
      hist[std::to_string(rounds)] = count;
    }
    doc["resample_histogram"] = hist;
    doc["mean_rounds"] = r.resamples->mean_rounds;
    doc["max_rounds"] = r.resamples->max_rounds;
    doc["per_constraint"] = r.resamples->per_constraint;
  }
  return doc.dump(2) + "\n";
}

std::string emit_histogram_csv(const ResampleSummary& s) {
  std::string out = "round,count\n";
  for (const auto& [rounds, count] : s.histogram) {
    out += std::to_string(rounds) + "," + std::to_string(count) + "\n";
  }
  return out;
}

std::string emit_trace_csv(const std::vector<TraceEntry>& trace) {
  std::ostringstream out;
  out.precision(17);
  out << "iter,nll,grad_l1,wall_ms\n";
  for (const auto& e : trace) {
    out << e.iter << ',';
    if (e.nll) out << *e.nll;
    out << ',' << e.grad_l1 << ',' << e.wall_ms << '\n';
  }
  return out.str();
}

}  // namespace nelson::io
