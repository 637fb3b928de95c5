#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "gnnplan/grounding.hpp"

namespace gnnplan {

// Goal distance of a state that cannot reach any goal.
inline constexpr std::int64_t kUnsolvable = -1;

struct Edge {
  std::size_t action = 0;
  std::size_t target = 0;
};

struct TransitionSystem {
  std::vector<State> states;  // BFS discovery order; states[init] is the initial state
  std::size_t init = 0;
  std::vector<std::vector<Edge>> edges;
  std::vector<bool> goal;
  std::vector<std::int64_t> vstar;  // empty until compute_vstar

  std::size_t size() const { return states.size(); }
  std::optional<std::size_t> index_of(const State& state) const;

 private:
  friend TransitionSystem expand(const GroundTask&, std::size_t);
  std::unordered_map<State, std::size_t, StateHash> index_;
};

class StateCapExceeded : public std::runtime_error {
 public:
  StateCapExceeded(std::string instance, std::size_t cap);
  std::size_t cap() const { return cap_; }

 private:
  std::size_t cap_;
};

// Breadth-first expansion of all states reachable from the initial state.
// Throws StateCapExceeded once more than `state_cap` states are discovered.
TransitionSystem expand(const GroundTask& task, std::size_t state_cap);

// Backward BFS from every goal state over reversed edges.
TransitionSystem compute_vstar(TransitionSystem ts);

// Exhaustive check that vstar is 0 exactly on goals and 1 + min over
// successors elsewhere. Returns the index of the first offending state.
std::optional<std::size_t> find_bellman_violation(const TransitionSystem& ts);

enum class OracleStatus { solved, unsolvable, timeout };

struct PlanLengthResult {
  OracleStatus status = OracleStatus::timeout;
  std::int64_t length = 0;
  std::size_t generated = 0;
};

// Uninformed breadth-first search for a shortest plan. `node_budget` bounds
// the number of generated states (the initial state included), so a budget
// of 0 always times out.
PlanLengthResult optimal_plan_length(const GroundTask& task, std::size_t node_budget, double time_budget_seconds);

enum class Partition { train, validation, test };

std::string_view to_string(Partition partition);
Partition parse_partition(std::string_view text);

// One instance's contribution to a dataset. `pool` holds the sampled states
// and all of their successors; entries refer to pool indices.
struct DatasetInstance {
  std::string id;
  Instance instance;
  std::vector<State> pool;
};

struct DatasetEntry {
  std::size_t instance = 0;
  std::size_t state = 0;  // pool index
  std::int64_t vstar = 0;
  bool goal = false;
  std::vector<std::size_t> successors;  // pool indices, one per applicable action; self-loops left out
};

struct Dataset {
  Partition partition = Partition::train;
  std::size_t sample_cap = 0;
  std::uint64_t seed = 0;
  std::vector<DatasetInstance> instances;
  std::vector<DatasetEntry> entries;

  double goal_ratio() const;
};

struct LabeledSystem {
  std::string id;
  const GroundTask* task = nullptr;
  const TransitionSystem* ts = nullptr;  // vstar computed
};

inline constexpr std::size_t kDefaultSampleCap = 40000;

// Per instance: all solvable states when there are at most `cap` of them,
// otherwise a seeded uniform sample without replacement of size `cap`.
Dataset sample_dataset(std::span<const LabeledSystem> systems, std::size_t cap, std::uint64_t seed,
                       Partition partition);

// Key used to enforce that no instance appears in two partitions.
std::uint64_t instance_key(const Instance& instance);

// Throws std::invalid_argument naming the first instance found in two partitions.
void check_disjoint(std::span<const Dataset* const> datasets);

// Line-oriented, versioned text format. See the README for the grammar.
void write_dataset(std::ostream& out, const Dataset& dataset, const Domain& domain);
Dataset read_dataset(std::istream& in, const Domain& domain);

}  // namespace gnnplan
