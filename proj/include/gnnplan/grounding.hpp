#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "gnnplan/pddl.hpp"

namespace gnnplan {

// A set of ground atoms kept sorted and duplicate free, so equality and
// hashing are independent of insertion order.
class State {
 public:
  State() = default;
  explicit State(std::vector<GroundAtom> atoms);

  const std::vector<GroundAtom>& atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }
  bool contains(const GroundAtom& atom) const;
  bool contains_all(std::span<const GroundAtom> sorted_atoms) const;

  // Stable across runs and platforms (FNV-1a over the canonical encoding).
  std::uint64_t hash() const;

  bool operator==(const State&) const = default;
  auto operator<=>(const State&) const = default;

 private:
  std::vector<GroundAtom> atoms_;
};

struct StateHash {
  std::size_t operator()(const State& s) const { return static_cast<std::size_t>(s.hash()); }
};

struct GroundAction {
  std::size_t schema = 0;
  std::vector<ObjectId> binding;
  std::vector<GroundAtom> precondition;  // sorted
  std::vector<GroundAtom> add;           // sorted
  std::vector<GroundAtom> del;           // sorted, disjoint from add
};

// Every binding of every schema, in schema declaration order and then
// lexicographic binding order. A ground delete effect that is also added is
// dropped, so add wins as in standard STRIPS semantics.
std::vector<GroundAction> ground_actions(const Domain& domain, const Instance& instance);

bool applicable(const State& state, const GroundAction& action);

// Throws std::invalid_argument when the action is not applicable.
State apply(const State& state, const GroundAction& action);

bool is_goal(const State& state, const Instance& instance);

struct Successor {
  std::size_t action = 0;  // index into GroundTask::actions()
  State state;
};

// Domain, instance and their ground actions. Immutable after construction and
// safe to share between threads.
class GroundTask {
 public:
  GroundTask(Domain domain, Instance instance);

  const Domain& domain() const { return domain_; }
  const Instance& instance() const { return instance_; }
  const std::vector<GroundAction>& actions() const { return actions_; }

  State initial_state() const { return State(instance_.init); }
  bool is_goal(const State& state) const { return gnnplan::is_goal(state, instance_); }
  std::vector<Successor> successors(const State& state) const;

  std::string action_name(std::size_t action) const;
  std::string state_string(const State& state) const;

 private:
  Domain domain_;
  Instance instance_;
  std::vector<GroundAction> actions_;
};

}  // namespace gnnplan
