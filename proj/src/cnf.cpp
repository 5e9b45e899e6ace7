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

#include "nelson/cnf.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

#include <json.hpp>

#include "nelson/error.hpp"

namespace nelson {

ConstraintSet::ConstraintSet(std::size_t n_vars, std::vector<Clause> clauses,
                             std::vector<VariableGroup> exactly_one_groups)
    : n_vars_(n_vars),
      clauses_(std::move(clauses)),
      groups_(std::move(exactly_one_groups)) {
  supports_.reserve(num_constraints());
  for (std::size_t j = 0; j < clauses_.size(); ++j) {
    const auto& lits = clauses_[j].literals;
    if (lits.empty()) {
      fail(ErrorKind::kInvalidArgument,
           "clause " + std::to_string(j) + " is empty");
    }
    std::vector<std::size_t> vars;
    vars.reserve(lits.size());
    for (const auto& lit : lits) {
      if (lit.variable >= n_vars_) {
        fail(ErrorKind::kInvalidArgument,
             "clause " + std::to_string(j) + " references variable " +
                 std::to_string(lit.variable) + " >= n_vars " +
                 std::to_string(n_vars_));
      }
      vars.push_back(lit.variable);
    }
    std::sort(vars.begin(), vars.end());
    if (std::adjacent_find(vars.begin(), vars.end()) != vars.end()) {
      fail(ErrorKind::kInvalidArgument,
           "clause " + std::to_string(j) + " repeats a variable");
    }
    supports_.push_back(std::move(vars));
  }
  for (std::size_t g = 0; g < groups_.size(); ++g) {
    auto vars = groups_[g];
    if (vars.empty()) {
      fail(ErrorKind::kInvalidArgument,
           "exactly-one group " + std::to_string(g) + " is empty");
    }
    std::sort(vars.begin(), vars.end());
    if (std::adjacent_find(vars.begin(), vars.end()) != vars.end()) {
      fail(ErrorKind::kInvalidArgument,
           "exactly-one group " + std::to_string(g) + " repeats a member");
    }
    if (vars.back() >= n_vars_) {
      fail(ErrorKind::kInvalidArgument,
           "exactly-one group " + std::to_string(g) +
               " references variable out of range");
    }
    supports_.push_back(std::move(vars));
  }
}

bool ConstraintSet::satisfied(std::size_t constraint, AssignmentView x) const {
  if (constraint < clauses_.size()) {
    for (const auto& lit : clauses_[constraint].literals) {
      if (lit.is_true(x)) return true;
    }
    return false;
  }
  std::size_t ones = 0;
  for (auto v : groups_[constraint - clauses_.size()]) ones += x[v];
  return ones == 1;
}

ConstraintSet ConstraintSet::with_groups(
    std::vector<VariableGroup> groups) const {
  auto merged = groups_;
  merged.insert(merged.end(), std::make_move_iterator(groups.begin()),
                std::make_move_iterator(groups.end()));
  return ConstraintSet(n_vars_, clauses_, std::move(merged));
}

bool DependencyGraph::adjacent(std::size_t a, std::size_t b) const {
  const auto& nb = adjacency[a];
  return std::binary_search(nb.begin(), nb.end(), b);
}

namespace {

bool parse_int(std::string_view token, long long& out) {
  const auto* first = token.data();
  const auto* last = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

[[noreturn]] void parse_fail(std::size_t line, const std::string& what) {
  fail(ErrorKind::kParse,
       "DIMACS line " + std::to_string(line) + ": " + what);
}

}  // namespace

ConstraintSet parse_dimacs(std::istream& in) {
  std::optional<std::size_t> n_vars;
  std::size_t declared_clauses = 0;
  std::vector<Clause> clauses;
  Clause current;
  std::string line;
  std::size_t line_no = 0;

  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream tokens(line);
    std::string tok;
    if (!(tokens >> tok)) continue;
    if (tok[0] == 'c') continue;
    if (tok == "p") {
      if (n_vars) parse_fail(line_no, "duplicate header");
      std::string format, extra;
      long long n = -1, l = -1;
      std::string n_tok, l_tok;
      if (!(tokens >> format >> n_tok >> l_tok) || format != "cnf" ||
          !parse_int(n_tok, n) || !parse_int(l_tok, l) || n < 0 || l < 0 ||
          (tokens >> extra)) {
        parse_fail(line_no, "malformed header, expected 'p cnf <n> <L>'");
      }
      n_vars = static_cast<std::size_t>(n);
      declared_clauses = static_cast<std::size_t>(l);
      continue;
    }
    if (!n_vars) parse_fail(line_no, "clause before 'p cnf' header");
    do {
      long long v = 0;
      if (!parse_int(tok, v)) parse_fail(line_no, "bad literal '" + tok + "'");
      if (v == 0) {
        if (current.literals.empty()) parse_fail(line_no, "empty clause");
        clauses.push_back(std::move(current));
        current = Clause{};
        continue;
      }
      const auto index = static_cast<std::size_t>(v < 0 ? -v : v);
      if (index > *n_vars) {
        parse_fail(line_no, "variable " + std::to_string(index) +
                                " out of range 1.." +
                                std::to_string(*n_vars));
      }
      for (const auto& lit : current.literals) {
        if (lit.variable == index - 1) {
          parse_fail(line_no, "variable " + std::to_string(index) +
                                  " repeated within a clause");
        }
      }
      current.literals.push_back({index - 1, v < 0});
    } while (tokens >> tok);
  }
  if (!n_vars) fail(ErrorKind::kParse, "DIMACS: missing 'p cnf' header");
  if (!current.literals.empty()) {
    fail(ErrorKind::kParse, "DIMACS: last clause not terminated by 0");
  }
  if (clauses.size() != declared_clauses) {
    fail(ErrorKind::kParse, "DIMACS: header declares " +
                                std::to_string(declared_clauses) +
                                " clauses, found " +
                                std::to_string(clauses.size()));
  }
  return ConstraintSet(*n_vars, std::move(clauses));
}

ConstraintSet parse_dimacs(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_dimacs(in);
}

std::string emit_dimacs(const ConstraintSet& cs) {
  std::ostringstream out;
  out << "p cnf " << cs.n_vars() << ' ' << cs.num_clauses() << '\n';
  for (const auto& clause : cs.clauses()) {
    for (const auto& lit : clause.literals) {
      const auto v = static_cast<long long>(lit.variable) + 1;
      out << (lit.negated ? -v : v) << ' ';
    }
    out << "0\n";
  }
  return out.str();
}

std::vector<VariableGroup> parse_groups_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::kParse, std::string("groups JSON: ") + e.what());
  }
  std::vector<VariableGroup> groups;
  if (!doc.is_object()) fail(ErrorKind::kParse, "groups JSON: not an object");
  if (!doc.contains("exactly_one")) return groups;
  try {
    for (const auto& g : doc.at("exactly_one")) {
      groups.push_back(g.get<VariableGroup>());
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::kParse, std::string("groups JSON: ") + e.what());
  }
  return groups;
}

std::string emit_groups_json(const ConstraintSet& cs) {
  nlohmann::json doc;
  doc["exactly_one"] = cs.exactly_one_groups();
  return doc.dump();
}

std::vector<std::size_t> violated_constraints(const ConstraintSet& cs,
                                              AssignmentView x) {
  if (x.size() != cs.n_vars()) {
    fail(ErrorKind::kInvalidArgument,
         "assignment has " + std::to_string(x.size()) + " values, expected " +
             std::to_string(cs.n_vars()));
  }
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < cs.num_constraints(); ++j) {
    if (!cs.satisfied(j, x)) out.push_back(j);
  }
  return out;
}

DependencyGraph build_dependency_graph(const ConstraintSet& cs) {
  const std::size_t m = cs.num_constraints();
  std::vector<std::vector<std::size_t>> by_var(cs.n_vars());
  for (std::size_t j = 0; j < m; ++j) {
    for (auto v : cs.variables_of(j)) by_var[v].push_back(j);
  }
  DependencyGraph g;
  g.adjacency.resize(m);
  for (const auto& owners : by_var) {
    for (auto a : owners) {
      for (auto b : owners) {
        if (a != b) g.adjacency[a].push_back(b);
      }
    }
  }
  for (auto& nb : g.adjacency) {
    std::sort(nb.begin(), nb.end());
    nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
  }
  return g;
}

std::vector<std::size_t> gamma(const DependencyGraph& g,
                               std::span<const std::size_t> s) {
  std::vector<std::size_t> out(s.begin(), s.end());
  for (auto c : s) {
    if (c >= g.size()) {
      fail(ErrorKind::kInvalidArgument, "gamma(): constraint index out of range");
    }
    out.insert(out.end(), g.adjacency[c].begin(), g.adjacency[c].end());
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool clauses_jointly_violable(const Clause& a, const Clause& b) {
  for (const auto& la : a.literals) {
    for (const auto& lb : b.literals) {
      if (la.variable == lb.variable && la.negated != lb.negated) return false;
    }
  }
  return true;
}

std::optional<std::vector<std::pair<std::size_t, std::uint8_t>>>
find_joint_violation(const ConstraintSet& cs, std::size_t i, std::size_t j,
                     std::size_t cap) {
  std::vector<std::size_t> vars;
  const auto& vi = cs.variables_of(i);
  const auto& vj = cs.variables_of(j);
  std::set_union(vi.begin(), vi.end(), vj.begin(), vj.end(),
                 std::back_inserter(vars));
  if (vars.size() > cap) {
    fail(ErrorKind::kCapExceeded,
         "extremality check: constraints " + std::to_string(i) + " and " +
             std::to_string(j) + " span " + std::to_string(vars.size()) +
             " variables (cap " + std::to_string(cap) + ")");
  }
  Assignment x(cs.n_vars(), 0);
  const std::uint64_t count = std::uint64_t{1} << vars.size();
  for (std::uint64_t bits = 0; bits < count; ++bits) {
    for (std::size_t k = 0; k < vars.size(); ++k) {
      x[vars[k]] = static_cast<std::uint8_t>((bits >> k) & 1u);
    }
    if (!cs.satisfied(i, x) && !cs.satisfied(j, x)) {
      std::vector<std::pair<std::size_t, std::uint8_t>> witness;
      for (auto v : vars) witness.emplace_back(v, x[v]);
      return witness;
    }
  }
  return std::nullopt;
}

ExtremalReport check_extremal(const ConstraintSet& cs, std::size_t cap) {
  const auto graph = build_dependency_graph(cs);
  ExtremalReport report;
  for (std::size_t i = 0; i < graph.size(); ++i) {
    for (auto j : graph.adjacency[i]) {
      if (j <= i) continue;
      std::optional<std::vector<std::pair<std::size_t, std::uint8_t>>> witness;
      if (!cs.is_group(i) && !cs.is_group(j)) {
        const auto& ci = cs.clauses()[i];
        const auto& cj = cs.clauses()[j];
        if (clauses_jointly_violable(ci, cj)) {
          // Falsify every literal of both clauses.
          std::vector<std::pair<std::size_t, std::uint8_t>> w;
          for (const auto* c : {&ci, &cj}) {
            for (const auto& lit : c->literals) {
              w.emplace_back(lit.variable, lit.negated ? 1 : 0);
            }
          }
          std::sort(w.begin(), w.end());
          w.erase(std::unique(w.begin(), w.end()), w.end());
          witness = std::move(w);
        }
      } else {
        witness = find_joint_violation(cs, i, j, cap);
      }
      if (witness) {
        report.extremal = false;
        report.edge = {i, j};
        report.witness = std::move(*witness);
        return report;
      }
    }
  }
  return report;
}

std::string to_bitstring(AssignmentView x) {
  std::string s(x.size(), '0');
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i]) s[i] = '1';
  }
  return s;
}

Assignment from_bitstring(std::string_view bits) {
  Assignment x(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] == '0') {
      x[i] = 0;
    } else if (bits[i] == '1') {
      x[i] = 1;
    } else {
      fail(ErrorKind::kParse, "bitstring contains '" +
                                  std::string(1, bits[i]) + "'");
    }
  }
  return x;
}

}  // namespace nelson
