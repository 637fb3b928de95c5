#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "gnnplan/policy.hpp"
#include "gnnplan/report.hpp"
#include "gnnplan/training.hpp"

namespace gnnplan {

// Grounded instances of one domain. Tasks are held by pointer so references
// handed out to datasets and value functions stay valid.
struct TaskSet {
  Domain domain;
  std::vector<std::string> ids;
  std::vector<std::unique_ptr<GroundTask>> tasks;

  void add(std::string id, const Instance& instance);
  void add_pddl(std::string id, std::string_view problem_text);
  std::size_t size() const { return tasks.size(); }
};

struct LabeledSet {
  std::vector<TransitionSystem> systems;
  Dataset dataset;
};

// Expands and labels every task; throws StateCapExceeded on an oversized one.
LabeledSet label_tasks(const TaskSet& set, std::size_t state_cap, std::size_t sample_cap, std::uint64_t seed,
                       Partition partition);

struct OracleOptions {
  std::size_t node_budget = 2000000;
  double time_seconds = 60.0;
};

OracleLengths optimal_lengths(const TaskSet& set, const OracleOptions& options);

struct PolicyRunOptions {
  std::vector<ExecMode> modes{ExecMode::plain};
  std::size_t step_limit = 1000;
  std::uint64_t eval_seed = 0;
  std::size_t jobs = 1;
};

// One trace per (mode, task), mode-major.
std::vector<PolicyTrace> run_policy(const GnnParams& params, const Augmenter& augmenter, const TaskSet& set,
                                    const PolicyRunOptions& options);

struct Coverage {
  std::size_t solved = 0;
  std::size_t total = 0;
};

Coverage coverage(std::span<const PolicyTrace> traces, ExecMode mode);

}  // namespace gnnplan
