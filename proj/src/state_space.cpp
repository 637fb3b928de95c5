#include "gnnplan/state_space.hpp"

#include <algorithm>
#include <chrono>
#include <deque>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <unordered_set>

namespace gnnplan {

std::optional<std::size_t> TransitionSystem::index_of(const State& state) const {
  if (!index_.empty()) {
    auto it = index_.find(state);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (states[i] == state) return i;
  }
  return std::nullopt;
}

StateCapExceeded::StateCapExceeded(std::string instance, std::size_t cap)
    : std::runtime_error("state cap exceeded: instance '" + instance + "' has more than " + std::to_string(cap) +
                         " reachable states"),
      cap_(cap) {}

TransitionSystem expand(const GroundTask& task, std::size_t state_cap) {
  TransitionSystem ts;
  auto discover = [&](State s) -> std::size_t {
    auto [it, inserted] = ts.index_.try_emplace(s, ts.states.size());
    if (inserted) {
      if (ts.states.size() + 1 > state_cap) throw StateCapExceeded(task.instance().name, state_cap);
      ts.states.push_back(std::move(s));
      ts.edges.emplace_back();
    }
    return it->second;
  };
  ts.init = discover(task.initial_state());
  for (std::size_t i = 0; i < ts.states.size(); ++i) {
    auto succ = task.successors(ts.states[i]);
    std::vector<Edge> edges;
    edges.reserve(succ.size());
    for (auto& s : succ) edges.push_back({s.action, discover(std::move(s.state))});
    ts.edges[i] = std::move(edges);
  }
  ts.goal.resize(ts.states.size());
  for (std::size_t i = 0; i < ts.states.size(); ++i) ts.goal[i] = task.is_goal(ts.states[i]);
  return ts;
}

TransitionSystem compute_vstar(TransitionSystem ts) {
  const std::size_t n = ts.states.size();
  std::vector<std::vector<std::size_t>> reverse(n);
  for (std::size_t s = 0; s < n; ++s) {
    for (const auto& e : ts.edges[s]) reverse[e.target].push_back(s);
  }
  ts.vstar.assign(n, kUnsolvable);
  std::deque<std::size_t> queue;
  for (std::size_t s = 0; s < n; ++s) {
    if (ts.goal[s]) {
      ts.vstar[s] = 0;
      queue.push_back(s);
    }
  }
  while (!queue.empty()) {
    std::size_t s = queue.front();
    queue.pop_front();
    for (auto p : reverse[s]) {
      if (ts.vstar[p] == kUnsolvable) {
        ts.vstar[p] = ts.vstar[s] + 1;
        queue.push_back(p);
      }
    }
  }
  return ts;
}

std::optional<std::size_t> find_bellman_violation(const TransitionSystem& ts) {
  if (ts.vstar.size() != ts.states.size()) return 0;
  for (std::size_t s = 0; s < ts.states.size(); ++s) {
    if (ts.goal[s]) {
      if (ts.vstar[s] != 0) return s;
      continue;
    }
    std::int64_t best = kUnsolvable;
    for (const auto& e : ts.edges[s]) {
      auto v = ts.vstar[e.target];
      if (v != kUnsolvable && (best == kUnsolvable || v < best)) best = v;
    }
    std::int64_t expected = best == kUnsolvable ? kUnsolvable : best + 1;
    if (ts.vstar[s] != expected) return s;
  }
  return std::nullopt;
}

PlanLengthResult optimal_plan_length(const GroundTask& task, std::size_t node_budget, double time_budget_seconds) {
  PlanLengthResult result;
  if (node_budget == 0) return result;
  const auto start = std::chrono::steady_clock::now();
  auto out_of_time = [&] {
    std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    return elapsed.count() > time_budget_seconds;
  };

  State init = task.initial_state();
  result.generated = 1;
  if (task.is_goal(init)) {
    result.status = OracleStatus::solved;
    return result;
  }
  std::unordered_set<State, StateHash> seen;
  std::deque<std::pair<State, std::int64_t>> queue;
  seen.insert(init);
  queue.emplace_back(std::move(init), 0);
  while (!queue.empty()) {
    auto [state, depth] = std::move(queue.front());
    queue.pop_front();
    for (auto& succ : task.successors(state)) {
      if (seen.contains(succ.state)) continue;
      if (++result.generated > node_budget || ((result.generated & 255U) == 0 && out_of_time())) {
        result.status = OracleStatus::timeout;
        return result;
      }
      if (task.is_goal(succ.state)) {
        result.status = OracleStatus::solved;
        result.length = depth + 1;
        return result;
      }
      seen.insert(succ.state);
      queue.emplace_back(std::move(succ.state), depth + 1);
    }
  }
  result.status = OracleStatus::unsolvable;
  return result;
}

std::string_view to_string(Partition partition) {
  switch (partition) {
    case Partition::train: return "train";
    case Partition::validation: return "validation";
    case Partition::test: return "test";
  }
  return "train";
}

Partition parse_partition(std::string_view text) {
  if (text == "train") return Partition::train;
  if (text == "validation") return Partition::validation;
  if (text == "test") return Partition::test;
  throw std::invalid_argument("unknown partition '" + std::string(text) + "'");
}

double Dataset::goal_ratio() const {
  if (entries.empty()) return 0.0;
  auto goals = std::count_if(entries.begin(), entries.end(), [](const auto& e) { return e.goal; });
  return static_cast<double>(goals) / static_cast<double>(entries.size());
}

Dataset sample_dataset(std::span<const LabeledSystem> systems, std::size_t cap, std::uint64_t seed,
                       Partition partition) {
  Dataset ds;
  ds.partition = partition;
  ds.sample_cap = cap;
  ds.seed = seed;
  for (std::size_t k = 0; k < systems.size(); ++k) {
    const auto& sys = systems[k];
    const TransitionSystem& ts = *sys.ts;
    if (ts.vstar.size() != ts.states.size()) {
      throw std::invalid_argument("sample_dataset: goal distances not computed for '" + sys.id + "'");
    }
    std::vector<std::size_t> chosen;
    for (std::size_t s = 0; s < ts.size(); ++s) {
      if (ts.vstar[s] != kUnsolvable) chosen.push_back(s);
    }
    if (chosen.size() > cap) {
      std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ULL + k);
      std::shuffle(chosen.begin(), chosen.end(), rng);
      chosen.resize(cap);
      std::sort(chosen.begin(), chosen.end());
    }

    DatasetInstance di;
    di.id = sys.id;
    di.instance = sys.task->instance();
    std::unordered_map<std::size_t, std::size_t> pool_index;
    auto pooled = [&](std::size_t s) {
      auto [it, inserted] = pool_index.try_emplace(s, di.pool.size());
      if (inserted) di.pool.push_back(ts.states[s]);
      return it->second;
    };
    for (auto s : chosen) pooled(s);
    const std::size_t instance_index = ds.instances.size();
    for (auto s : chosen) {
      DatasetEntry e;
      e.instance = instance_index;
      e.state = pool_index.at(s);
      e.vstar = ts.vstar[s];
      e.goal = ts.goal[s];
      for (const auto& edge : ts.edges[s]) {
        if (edge.target != s) e.successors.push_back(pooled(edge.target));
      }
      ds.entries.push_back(std::move(e));
    }
    ds.instances.push_back(std::move(di));
  }
  return ds;
}

std::uint64_t instance_key(const Instance& instance) {
  std::uint64_t h = State(instance.init).hash();
  h ^= State(instance.goal).hash() * 0x9E3779B97F4A7C15ULL;
  h ^= instance.objects.size() + 0x7f4a7c15ULL + (h << 6) + (h >> 2);
  return h;
}

void check_disjoint(std::span<const Dataset* const> datasets) {
  std::unordered_map<std::uint64_t, std::string> seen;
  for (const Dataset* ds : datasets) {
    for (const auto& di : ds->instances) {
      auto key = instance_key(di.instance);
      auto [it, inserted] = seen.try_emplace(key, std::string(to_string(ds->partition)) + "/" + di.id);
      if (!inserted) {
        throw std::invalid_argument("instance '" + di.id + "' in " + std::string(to_string(ds->partition)) +
                                    " duplicates " + it->second);
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

constexpr const char* kDatasetMagic = "gnnplan-dataset";
constexpr int kDatasetVersion = 1;

std::string atom_token(const Domain& domain, const Instance& instance, const GroundAtom& a) {
  return format_atom(domain, instance, a);
}

GroundAtom parse_atom_token(const std::string& tok, const Domain& domain, const Instance& instance) {
  auto open = tok.find('(');
  if (open == std::string::npos || tok.back() != ')') throw std::runtime_error("dataset: malformed atom '" + tok + "'");
  auto pid = domain.find_predicate(tok.substr(0, open));
  if (!pid) throw std::runtime_error("dataset: unknown predicate in '" + tok + "'");
  GroundAtom atom{*pid, {}};
  std::string args = tok.substr(open + 1, tok.size() - open - 2);
  std::stringstream ss(args);
  std::string name;
  while (!args.empty() && std::getline(ss, name, ',')) {
    auto oid = instance.find_object(name);
    if (!oid) throw std::runtime_error("dataset: unknown object in '" + tok + "'");
    atom.args.push_back(*oid);
  }
  if (atom.args.size() != domain.predicates[*pid].arity) throw std::runtime_error("dataset: arity mismatch in '" + tok + "'");
  return atom;
}

void expect(std::istream& in, const std::string& word) {
  std::string got;
  if (!(in >> got) || got != word) throw std::runtime_error("dataset: expected '" + word + "', got '" + got + "'");
}

template <typename T>
T read_value(std::istream& in, const char* what) {
  T v{};
  if (!(in >> v)) throw std::runtime_error(std::string("dataset: cannot read ") + what);
  return v;
}

}  // namespace

void write_dataset(std::ostream& out, const Dataset& dataset, const Domain& domain) {
  out << kDatasetMagic << ' ' << kDatasetVersion << '\n';
  out << "domain " << domain.name << '\n';
  out << "partition " << to_string(dataset.partition) << '\n';
  out << "sample-cap " << dataset.sample_cap << '\n';
  out << "seed " << dataset.seed << '\n';
  out << "instances " << dataset.instances.size() << '\n';
  for (const auto& di : dataset.instances) {
    const Instance& inst = di.instance;
    out << "instance " << di.id << ' ' << inst.name << " objects " << inst.objects.size();
    for (const auto& o : inst.objects) out << ' ' << o;
    out << '\n' << "init " << inst.init.size();
    for (const auto& a : inst.init) out << ' ' << atom_token(domain, inst, a);
    out << '\n' << "goal " << inst.goal.size();
    for (const auto& a : inst.goal) out << ' ' << atom_token(domain, inst, a);
    out << '\n' << "pool " << di.pool.size() << '\n';
    for (const auto& s : di.pool) {
      out << "s " << s.size();
      for (const auto& a : s.atoms()) out << ' ' << atom_token(domain, inst, a);
      out << '\n';
    }
  }
  out << "entries " << dataset.entries.size() << '\n';
  for (const auto& e : dataset.entries) {
    out << "e " << e.instance << ' ' << e.state << ' ' << e.vstar << ' ' << (e.goal ? 1 : 0) << ' '
        << e.successors.size();
    for (auto s : e.successors) out << ' ' << s;
    out << '\n';
  }
  out << "end\n";
}

Dataset read_dataset(std::istream& in, const Domain& domain) {
  Dataset ds;
  expect(in, kDatasetMagic);
  if (read_value<int>(in, "version") != kDatasetVersion) throw std::runtime_error("dataset: unsupported version");
  expect(in, "domain");
  if (read_value<std::string>(in, "domain name") != domain.name) throw std::runtime_error("dataset: domain mismatch");
  expect(in, "partition");
  ds.partition = parse_partition(read_value<std::string>(in, "partition"));
  expect(in, "sample-cap");
  ds.sample_cap = read_value<std::size_t>(in, "sample cap");
  expect(in, "seed");
  ds.seed = read_value<std::uint64_t>(in, "seed");
  expect(in, "instances");
  auto n_instances = read_value<std::size_t>(in, "instance count");
  auto read_atoms = [&](const Instance& inst) {
    auto n = read_value<std::size_t>(in, "atom count");
    std::vector<GroundAtom> atoms;
    for (std::size_t i = 0; i < n; ++i) atoms.push_back(parse_atom_token(read_value<std::string>(in, "atom"), domain, inst));
    return atoms;
  };
  for (std::size_t k = 0; k < n_instances; ++k) {
    DatasetInstance di;
    expect(in, "instance");
    di.id = read_value<std::string>(in, "instance id");
    di.instance.name = read_value<std::string>(in, "instance name");
    di.instance.domain_name = domain.name;
    expect(in, "objects");
    auto n_obj = read_value<std::size_t>(in, "object count");
    for (std::size_t i = 0; i < n_obj; ++i) di.instance.objects.push_back(read_value<std::string>(in, "object"));
    expect(in, "init");
    di.instance.init = read_atoms(di.instance);
    expect(in, "goal");
    di.instance.goal = read_atoms(di.instance);
    expect(in, "pool");
    auto n_pool = read_value<std::size_t>(in, "pool size");
    for (std::size_t i = 0; i < n_pool; ++i) {
      expect(in, "s");
      di.pool.emplace_back(read_atoms(di.instance));
    }
    ds.instances.push_back(std::move(di));
  }
  expect(in, "entries");
  auto n_entries = read_value<std::size_t>(in, "entry count");
  for (std::size_t k = 0; k < n_entries; ++k) {
    DatasetEntry e;
    expect(in, "e");
    e.instance = read_value<std::size_t>(in, "entry instance");
    e.state = read_value<std::size_t>(in, "entry state");
    e.vstar = read_value<std::int64_t>(in, "entry vstar");
    e.goal = read_value<int>(in, "entry goal flag") != 0;
    auto n_succ = read_value<std::size_t>(in, "successor count");
    for (std::size_t i = 0; i < n_succ; ++i) e.successors.push_back(read_value<std::size_t>(in, "successor"));
    if (e.instance >= ds.instances.size() || e.state >= ds.instances[e.instance].pool.size()) {
      throw std::runtime_error("dataset: entry refers to a missing state");
    }
    for (auto s : e.successors) {
      if (s >= ds.instances[e.instance].pool.size()) throw std::runtime_error("dataset: successor refers to a missing state");
    }
    ds.entries.push_back(std::move(e));
  }
  expect(in, "end");
  return ds;
}

}  // namespace gnnplan
