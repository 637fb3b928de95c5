#include "gnnplan/policy.hpp"

#include <limits>
#include <ostream>

namespace gnnplan {

std::string_view to_string(ExecMode mode) { return mode == ExecMode::plain ? "plain" : "cycle-avoid"; }

std::string_view to_string(Outcome outcome) {
  switch (outcome) {
    case Outcome::solved: return "solved";
    case Outcome::step_limit: return "step-limit";
    case Outcome::stuck: return "stuck";
    case Outcome::cycle: return "cycle";
  }
  return "?";
}

ExecMode parse_exec_mode(std::string_view text) {
  if (text == "plain") return ExecMode::plain;
  if (text == "cycle-avoid") return ExecMode::cycle_avoid;
  throw std::invalid_argument("unknown execution mode '" + std::string(text) + "'");
}

StepResult greedy_step(const ValueFunction& value, const GroundTask& task, const State& state,
                       const std::unordered_set<State, StateHash>* visited) {
  StepResult result;
  auto successors = task.successors(state);
  if (successors.empty()) return result;
  result.status = StepStatus::all_visited;
  bool found = false;
  for (auto& s : successors) {
    if (visited && visited->contains(s.state)) continue;
    const double v = value(s.state);
    if (!found || v < result.value) {
      found = true;
      result.status = StepStatus::chosen;
      result.value = v;
      result.successor = std::move(s);
    }
  }
  return result;
}

PolicyTrace execute(const ValueFunction& value, const GroundTask& task, const ExecOptions& options,
                    std::string instance_id) {
  PolicyTrace trace;
  trace.domain = task.domain().name;
  trace.instance_id = instance_id.empty() ? task.instance().name : std::move(instance_id);
  trace.mode = options.mode;
  trace.eval_seed = options.eval_seed;

  const bool avoid = options.mode == ExecMode::cycle_avoid;
  std::unordered_set<State, StateHash> visited;
  State current = task.initial_state();
  visited.insert(current);
  while (true) {
    if (task.is_goal(current)) {
      trace.outcome = Outcome::solved;
      break;
    }
    if (trace.steps.size() >= options.step_limit) {
      trace.outcome = Outcome::step_limit;
      break;
    }
    StepResult step = greedy_step(value, task, current, avoid ? &visited : nullptr);
    if (step.status == StepStatus::stuck) {
      trace.outcome = Outcome::stuck;
      break;
    }
    if (step.status == StepStatus::all_visited) {
      trace.outcome = Outcome::cycle;
      break;
    }
    trace.steps.push_back({current, step.successor.action, step.value});
    current = std::move(step.successor.state);
    if (!visited.insert(current).second && options.stop_on_repeat) {
      // only reachable in plain mode
      trace.outcome = Outcome::step_limit;
      break;
    }
  }
  trace.final_state = current;
  trace.plan_length = trace.steps.size();
  return trace;
}

ValueFunction gnn_value_function(const GnnParams& params, const Augmenter& augmenter, const Instance& instance,
                                 std::uint64_t eval_seed) {
  params.check_signature(augmenter.domain());
  return [&params, &augmenter, &instance, eval_seed](const State& state) {
    return value_of(params, instance.objects.size(), augmenter.augment(state, instance), RngMode::fixed_seed,
                    eval_seed);
  };
}

ValueFunction vstar_value_function(const TransitionSystem& ts) {
  if (ts.vstar.size() != ts.size()) throw std::invalid_argument("transition system has no V* labels");
  return [&ts](const State& state) {
    auto i = ts.index_of(state);
    if (!i || ts.vstar[*i] == kUnsolvable) return std::numeric_limits<double>::infinity();
    return static_cast<double>(ts.vstar[*i]);
  };
}

void write_trace(std::ostream& out, const PolicyTrace& trace, const GroundTask& task, bool with_states) {
  out << "trace " << trace.domain << ' ' << trace.instance_id << " mode " << to_string(trace.mode) << " eval-seed "
      << trace.eval_seed << '\n';
  for (std::size_t i = 0; i < trace.steps.size(); ++i) {
    const auto& s = trace.steps[i];
    out << "step " << i << ' ' << task.action_name(s.action) << " value " << s.value;
    if (with_states) out << " state " << task.state_string(s.state);
    out << '\n';
  }
  out << "outcome " << to_string(trace.outcome) << " length " << trace.plan_length << '\n';
}

}  // namespace gnnplan
