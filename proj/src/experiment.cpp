#include "gnnplan/experiment.hpp"

#include <atomic>
#include <thread>

namespace gnnplan {

void TaskSet::add(std::string id, const Instance& instance) {
  ids.push_back(std::move(id));
  tasks.push_back(std::make_unique<GroundTask>(domain, instance));
}

void TaskSet::add_pddl(std::string id, std::string_view problem_text) {
  add(id, parse_instance(problem_text, domain, id));
}

LabeledSet label_tasks(const TaskSet& set, std::size_t state_cap, std::size_t sample_cap, std::uint64_t seed,
                       Partition partition) {
  LabeledSet out;
  out.systems.reserve(set.size());
  for (const auto& t : set.tasks) out.systems.push_back(compute_vstar(expand(*t, state_cap)));
  std::vector<LabeledSystem> labeled;
  for (std::size_t i = 0; i < set.size(); ++i) labeled.push_back({set.ids[i], set.tasks[i].get(), &out.systems[i]});
  out.dataset = sample_dataset(labeled, sample_cap, seed, partition);
  return out;
}

OracleLengths optimal_lengths(const TaskSet& set, const OracleOptions& options) {
  OracleLengths out;
  for (std::size_t i = 0; i < set.size(); ++i) {
    auto r = optimal_plan_length(*set.tasks[i], options.node_budget, options.time_seconds);
    out[set.ids[i]] = r.status == OracleStatus::solved ? std::optional<std::int64_t>(r.length) : std::nullopt;
  }
  return out;
}

std::vector<PolicyTrace> run_policy(const GnnParams& params, const Augmenter& augmenter, const TaskSet& set,
                                    const PolicyRunOptions& options) {
  const std::size_t n = set.size();
  std::vector<PolicyTrace> traces(options.modes.size() * n);
  auto work = [&](std::size_t slot) {
    const ExecMode mode = options.modes[slot / n];
    const std::size_t i = slot % n;
    const GroundTask& task = *set.tasks[i];
    auto value = gnn_value_function(params, augmenter, task.instance(), options.eval_seed);
    ExecOptions exec;
    exec.mode = mode;
    exec.step_limit = options.step_limit;
    exec.eval_seed = options.eval_seed;
    traces[slot] = execute(value, task, exec, set.ids[i]);
  };
  const std::size_t jobs = std::max<std::size_t>(1, std::min(options.jobs, traces.size()));
  if (jobs == 1) {
    for (std::size_t s = 0; s < traces.size(); ++s) work(s);
    return traces;
  }
  // each slot is written by exactly one worker, so the result is order independent
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t j = 0; j < jobs; ++j) {
    pool.emplace_back([&] {
      for (std::size_t s = next++; s < traces.size(); s = next++) work(s);
    });
  }
  for (auto& t : pool) t.join();
  return traces;
}

Coverage coverage(std::span<const PolicyTrace> traces, ExecMode mode) {
  Coverage c;
  for (const auto& t : traces) {
    if (t.mode != mode) continue;
    ++c.total;
    c.solved += t.outcome == Outcome::solved;
  }
  return c;
}

}  // namespace gnnplan
