#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <unordered_set>
#include <vector>

#include "gnnplan/derived.hpp"
#include "gnnplan/gnn.hpp"
#include "gnnplan/state_space.hpp"

namespace gnnplan {

enum class ExecMode { plain, cycle_avoid };
enum class Outcome { solved, step_limit, stuck, cycle };

std::string_view to_string(ExecMode mode);
std::string_view to_string(Outcome outcome);
ExecMode parse_exec_mode(std::string_view text);  // "plain", "cycle-avoid"

using ValueFunction = std::function<double(const State&)>;

struct TraceStep {
  State state;             // state the action was applied in
  std::size_t action = 0;  // index into GroundTask::actions()
  double value = 0.0;      // V of the chosen successor
};

struct PolicyTrace {
  std::string domain;
  std::string instance_id;
  ExecMode mode = ExecMode::plain;
  std::uint64_t eval_seed = 0;
  std::vector<TraceStep> steps;
  State final_state;
  Outcome outcome = Outcome::step_limit;
  std::size_t plan_length = 0;
};

enum class StepStatus { chosen, stuck, all_visited };

struct StepResult {
  StepStatus status = StepStatus::stuck;
  Successor successor;
  double value = 0.0;
};

// Successor with the lowest value, first one on ties. With `visited`, only
// unvisited successors are eligible.
StepResult greedy_step(const ValueFunction& value, const GroundTask& task, const State& state,
                       const std::unordered_set<State, StateHash>* visited = nullptr);

struct ExecOptions {
  ExecMode mode = ExecMode::plain;
  std::size_t step_limit = 1000;
  // Plain mode with a deterministic value function loops forever once a state
  // repeats; stop right there and report step-limit.
  bool stop_on_repeat = true;
  std::uint64_t eval_seed = 0;  // recorded in the trace
};

PolicyTrace execute(const ValueFunction& value, const GroundTask& task, const ExecOptions& options,
                    std::string instance_id = {});

// Learned value on the augmented state, fixed-seed embeddings.
ValueFunction gnn_value_function(const GnnParams& params, const Augmenter& augmenter, const Instance& instance,
                                 std::uint64_t eval_seed);

// V* read from an expanded system; +inf for unknown or unsolvable states.
ValueFunction vstar_value_function(const TransitionSystem& ts);

// One header line, one line per step with the action (and the state's atoms
// when `with_states`), and a closing outcome line.
void write_trace(std::ostream& out, const PolicyTrace& trace, const GroundTask& task, bool with_states = false);

}  // namespace gnnplan
