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

// Constraint sets over Boolean variables: CNF clauses plus exactly-one
// cardinality groups. Constraint indices run over clauses first, then groups.

#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace nelson {

/// One 0/1 value per variable.
using Assignment = std::vector<std::uint8_t>;
using AssignmentView = std::span<const std::uint8_t>;

struct Literal {
  std::size_t variable = 0;
  bool negated = false;

  bool is_true(AssignmentView x) const {
    return (x[variable] != 0) != negated;
  }
  friend bool operator==(const Literal&, const Literal&) = default;
};

struct Clause {
  std::vector<Literal> literals;
  friend bool operator==(const Clause&, const Clause&) = default;
};

using VariableGroup = std::vector<std::size_t>;

class ConstraintSet {
 public:
  ConstraintSet() = default;
  /// Throws kInvalidArgument when an index is out of range, a clause is empty
  /// or repeats a variable, or a group is empty or repeats a member.
  ConstraintSet(std::size_t n_vars, std::vector<Clause> clauses,
                std::vector<VariableGroup> exactly_one_groups = {});

  std::size_t n_vars() const { return n_vars_; }
  const std::vector<Clause>& clauses() const { return clauses_; }
  const std::vector<VariableGroup>& exactly_one_groups() const {
    return groups_;
  }
  std::size_t num_clauses() const { return clauses_.size(); }
  std::size_t num_constraints() const {
    return clauses_.size() + groups_.size();
  }
  bool is_group(std::size_t constraint) const {
    return constraint >= clauses_.size();
  }

  /// var(c_j), sorted ascending.
  const std::vector<std::size_t>& variables_of(std::size_t constraint) const {
    return supports_[constraint];
  }

  bool satisfied(std::size_t constraint, AssignmentView x) const;

  /// Same set with extra exactly-one groups appended.
  ConstraintSet with_groups(std::vector<VariableGroup> groups) const;

  friend bool operator==(const ConstraintSet& a, const ConstraintSet& b) {
    return a.n_vars_ == b.n_vars_ && a.clauses_ == b.clauses_ &&
           a.groups_ == b.groups_;
  }

 private:
  std::size_t n_vars_ = 0;
  std::vector<Clause> clauses_;
  std::vector<VariableGroup> groups_;
  std::vector<std::vector<std::size_t>> supports_;
};

/// Constraints adjacent iff they share a variable; neighbor lists sorted.
struct DependencyGraph {
  std::vector<std::vector<std::size_t>> adjacency;

  std::size_t size() const { return adjacency.size(); }
  bool adjacent(std::size_t a, std::size_t b) const;
};

struct ExtremalReport {
  bool extremal = true;
  /// First offending dependency-graph edge, when not extremal.
  std::optional<std::pair<std::size_t, std::size_t>> edge;
  /// Values over var(c_i) U var(c_j) violating both constraints of `edge`.
  std::vector<std::pair<std::size_t, std::uint8_t>> witness;
};

inline constexpr std::size_t kDefaultPairEnumerationCap = 24;

ConstraintSet parse_dimacs(std::istream& in);
ConstraintSet parse_dimacs(std::string_view text);
std::string emit_dimacs(const ConstraintSet& cs);

/// Parses {"exactly_one": [[...], ...]}; other keys are ignored.
std::vector<VariableGroup> parse_groups_json(std::string_view text);
std::string emit_groups_json(const ConstraintSet& cs);

/// Sorted indices of constraints that `x` violates.
std::vector<std::size_t> violated_constraints(const ConstraintSet& cs,
                                              AssignmentView x);

DependencyGraph build_dependency_graph(const ConstraintSet& cs);

/// S together with every neighbor of S, sorted.
std::vector<std::size_t> gamma(const DependencyGraph& g,
                               std::span<const std::size_t> s);

/// Whether two clauses can be false at the same time: every shared variable
/// must occur with the same polarity in both.
bool clauses_jointly_violable(const Clause& a, const Clause& b);

/// Enumerates assignments over var(c_i) U var(c_j) looking for one that
/// violates both; returns it when found.
std::optional<std::vector<std::pair<std::size_t, std::uint8_t>>>
find_joint_violation(const ConstraintSet& cs, std::size_t i, std::size_t j,
                     std::size_t cap = kDefaultPairEnumerationCap);

/// Condition: no assignment violates two constraints sharing a variable.
ExtremalReport check_extremal(const ConstraintSet& cs,
                              std::size_t cap = kDefaultPairEnumerationCap);

/// "0110..." with character i holding variable i.
std::string to_bitstring(AssignmentView x);
Assignment from_bitstring(std::string_view bits);

}  // namespace nelson
