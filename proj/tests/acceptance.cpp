// Acceptance run: one PASS/FAIL line per criterion.
//   acceptance [--only 1,4,9]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <deque>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "gnnplan/benchmarks.hpp"
#include "gnnplan/derived.hpp"
#include "gnnplan/experiment.hpp"
#include "gnnplan/gnn.hpp"
#include "gnnplan/gradcheck.hpp"
#include "gnnplan/suites.hpp"

using namespace gnnplan;

namespace {

// tolerances
constexpr double kGradTolerance = 1e-4;
constexpr double kGradSeconds = 120.0;
constexpr double kOracleSeconds = 60.0;
constexpr double kLossZero = 1e-9;
constexpr double kEquivarianceTolerance = 1e-9;
constexpr double kQualityTolerance = 0.02;
constexpr double kGripperSeconds = 3600.0;

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

struct Verdict {
  bool pass = false;
  std::string detail;
};

// Gripper up to 3 balls, Blocks up to 4 blocks, Delivery up to 2 packages.
TaskSet tiny_corpus(const std::string& domain) {
  TaskSet set{parse_domain(bench::domain_pddl(domain))};
  if (domain == "gripper") {
    for (std::size_t b = 1; b <= 3; ++b) set.add_pddl("gripper-" + std::to_string(b), bench::gripper_instance(b));
  } else if (domain == "blocks") {
    for (std::size_t n = 2; n <= 4; ++n) {
      for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        set.add_pddl("blocks-" + std::to_string(n) + "-" + std::to_string(seed), bench::blocks_instance(n, seed));
      }
    }
  } else {
    for (std::size_t p = 1; p <= 2; ++p) {
      for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        set.add_pddl("delivery-3-" + std::to_string(p) + "-" + std::to_string(seed), bench::delivery_instance(3, p, seed));
      }
    }
  }
  return set;
}

const std::vector<std::string> kTinyDomains{"gripper", "blocks", "delivery"};

// Shortest goal distance by a plain forward search from the initial state.
std::int64_t forward_bfs(const GroundTask& task) {
  std::map<State, std::int64_t> dist{{task.initial_state(), 0}};
  std::deque<State> queue{task.initial_state()};
  while (!queue.empty()) {
    State s = queue.front();
    queue.pop_front();
    if (task.is_goal(s)) return dist[s];
    for (const auto& x : task.successors(s)) {
      if (dist.emplace(x.state, dist[s] + 1).second) queue.push_back(x.state);
    }
  }
  return kUnsolvable;
}

Verdict gradients() {
  auto r = gradient_check_suite(2024);
  return {r.max_error < kGradTolerance && r.seconds < kGradSeconds,
          fmt("max relative error %.3e over %zu cases, %.1fs", r.max_error, r.cases, r.seconds)};
}

Verdict vstar_oracle() {
  const auto t0 = Clock::now();
  std::size_t instances = 0, states = 0, bad = 0;
  for (const auto& domain : kTinyDomains) {
    TaskSet set = tiny_corpus(domain);
    for (std::size_t i = 0; i < set.size(); ++i) {
      const GroundTask& task = *set.tasks[i];
      TransitionSystem ts = compute_vstar(expand(task, 100000));
      ++instances;
      states += ts.size();
      if (find_bellman_violation(ts) || ts.vstar[0] != forward_bfs(task)) {
        ++bad;
        std::printf("  mismatch on %s\n", set.ids[i].c_str());
      }
    }
  }
  const double secs = since(t0);
  return {bad == 0 && secs < kOracleSeconds,
          fmt("%zu instances, %zu states, %zu mismatches, %.1fs", instances, states, bad, secs)};
}

Verdict loss_zeros() {
  double worst = 0.0;
  std::size_t entries = 0;
  for (const auto& domain : kTinyDomains) {
    TaskSet set = tiny_corpus(domain);
    LabeledSet labeled = label_tasks(set, 100000, std::numeric_limits<std::size_t>::max(), 0, Partition::train);
    entries += labeled.dataset.entries.size();
    PoolValue lookup = [&](std::size_t instance, std::size_t pool) {
      const auto& ts = labeled.systems[instance];
      auto i = ts.index_of(labeled.dataset.instances[instance].pool[pool]);
      if (!i || ts.vstar[*i] == kUnsolvable) return std::numeric_limits<double>::infinity();
      return static_cast<double>(ts.vstar[*i]);
    };
    for (LossKind kind : {LossKind::l0, LossKind::l1}) {
      worst = std::max(worst, dataset_loss(labeled.dataset, LossConfig{kind, 2.0, true}, lookup));
    }
  }
  return {worst < kLossZero, fmt("largest total loss %.3e over %zu entries", worst, entries)};
}

Verdict greedy_vstar() {
  std::size_t solved = 0, total = 0, optimal = 0;
  for (const auto& domain : kTinyDomains) {
    TaskSet set = tiny_corpus(domain);
    for (std::size_t i = 0; i < set.size(); ++i) {
      const GroundTask& task = *set.tasks[i];
      TransitionSystem ts = compute_vstar(expand(task, 100000));
      ExecOptions options;
      options.mode = ExecMode::plain;
      PolicyTrace trace = execute(vstar_value_function(ts), task, options);
      ++total;
      if (trace.outcome == Outcome::solved) {
        ++solved;
        if (static_cast<std::int64_t>(trace.plan_length) == ts.vstar[0]) ++optimal;
      }
    }
  }
  return {solved == total && optimal == total, fmt("solved %zu/%zu, optimal length %zu/%zu", solved, total, optimal, total)};
}

Verdict equivariance() {
  std::vector<TaskSet> sets;
  for (const auto& domain : kTinyDomains) sets.push_back(tiny_corpus(domain));
  std::mt19937_64 rng(50);
  double worst = 0.0;
  for (int pair = 0; pair < 50; ++pair) {
    const TaskSet& set = sets[pair % sets.size()];
    const GroundTask& task = *set.tasks[rng() % set.size()];
    // random walk to a random reachable state
    State s = task.initial_state();
    for (int step = static_cast<int>(rng() % 12); step > 0; --step) {
      auto next = task.successors(s);
      if (next.empty()) break;
      s = next[rng() % next.size()].state;
    }
    GnnHyper hyper;
    hyper.embedding = 16;
    hyper.layers = 4;
    hyper.seed = rng();
    GnnParams params = init_params(task.domain(), hyper);
    const std::size_t n = task.instance().objects.size();
    std::vector<ObjectId> pi(n);
    std::iota(pi.begin(), pi.end(), 0);
    std::shuffle(pi.begin(), pi.end(), rng);
    std::vector<GroundAtom> moved;
    for (auto a : s.atoms()) {
      for (auto& o : a.args) o = pi[o];
      moved.push_back(a);
    }
    EmbeddingFrame frame = initial_embeddings(n, hyper, rng);
    EmbeddingFrame permuted{Eigen::MatrixXd(frame.embeddings.rows(), frame.embeddings.cols())};
    for (std::size_t o = 0; o < n; ++o) permuted.embeddings.col(pi[o]) = frame.embeddings.col(o);
    ForwardTape t1, t2;
    const double v1 = forward(params, n, s.atoms(), frame, t1);
    State ps(moved);
    const double v2 = forward(params, n, ps.atoms(), permuted, t2);
    worst = std::max(worst, std::abs(v1 - v2));
  }
  return {worst < kEquivarianceTolerance, fmt("largest difference %.3e over 50 pairs", worst)};
}

struct Prepared {
  bench::Suite suite;
  Domain domain;
  TaskSet train, validation, test;
  LabeledSet labeled_train, labeled_validation;
  Augmenter augmenter;
};

Prepared prepare(const std::string& name) {
  bench::Suite s = bench::suite(name);
  Domain d = parse_domain(bench::domain_pddl(s.domain));
  TaskSet tr{d}, va{d}, te{d};
  for (const auto& i : s.train) tr.add_pddl(i.id, i.pddl);
  for (const auto& i : s.validation) va.add_pddl(i.id, i.pddl);
  for (const auto& i : s.test) te.add_pddl(i.id, i.pddl);
  const auto& c = s.config;
  LabeledSet ltr = label_tasks(tr, c.state_cap, c.sample_cap, c.dataset_seed, Partition::train);
  LabeledSet lva = label_tasks(va, c.state_cap, c.sample_cap, c.dataset_seed, Partition::validation);
  Augmenter aug(d, c.augmentation);
  return {std::move(s), d, std::move(tr), std::move(va), std::move(te), std::move(ltr), std::move(lva), std::move(aug)};
}

std::vector<PolicyTrace> plain_traces(const Prepared& p, const GnnParams& params) {
  PolicyRunOptions options;
  options.modes = {ExecMode::plain};
  options.step_limit = p.suite.config.step_limit;
  options.eval_seed = p.suite.config.training.eval_seed;
  return run_policy(params, p.augmenter, p.test, options);
}

// Plain coverage of each seed trained on its own.
std::vector<std::size_t> per_seed_coverage(const Prepared& p, TrainConfig config) {
  std::vector<std::size_t> out;
  for (std::uint64_t seed : p.suite.config.training.seeds) {
    config.seeds = {seed};
    TrainResult r = train(p.labeled_train.dataset, p.labeled_validation.dataset, p.augmenter, config);
    auto traces = plain_traces(p, r.best.params);
    out.push_back(coverage(traces, ExecMode::plain).solved);
  }
  return out;
}

std::string join(const std::vector<std::size_t>& v) {
  std::string s;
  for (auto x : v) s += (s.empty() ? "" : "+") + std::to_string(x);
  return s;
}

std::size_t sum(const std::vector<std::size_t>& v) { return std::accumulate(v.begin(), v.end(), std::size_t{0}); }

Verdict gripper_generalization() {
  const auto t0 = Clock::now();
  Prepared p = prepare("gripper");
  TrainResult r = train(p.labeled_train.dataset, p.labeled_validation.dataset, p.augmenter, p.suite.config.training);
  auto traces = plain_traces(p, r.best.params);
  Coverage cov = coverage(traces, ExecMode::plain);
  EvalReport report = build_report(traces, optimal_lengths(p.test, p.suite.config.oracle));
  auto pq = report.sections.back().total.plan_quality();
  const double secs = since(t0);
  const bool pass = cov.solved == cov.total && pq && std::abs(*pq - 1.0) <= kQualityTolerance && secs <= kGripperSeconds;
  return {pass, fmt("plain coverage %zu/%zu, PQ %s, seed %llu selected, %.0fs", cov.solved, cov.total,
                    pq ? fmt("%.4f", *pq).c_str() : "---", static_cast<unsigned long long>(r.best.seed), secs)};
}

Verdict blocks_losses() {
  const auto t0 = Clock::now();
  Prepared p = prepare("blocks");
  TrainConfig l1 = p.suite.config.training, l0 = l1;
  l1.loss.kind = LossKind::l1;
  l0.loss.kind = LossKind::l0;
  auto c1 = per_seed_coverage(p, l1);
  auto c0 = per_seed_coverage(p, l0);
  const long gap = static_cast<long>(sum(c1)) - static_cast<long>(sum(c0));
  return {sum(c1) >= sum(c0), fmt("plain coverage over %zu seeds of %zu tests: L1 %s=%zu, L0 %s=%zu, gap %+ld, %.0fs",
                                  c1.size(), p.test.size(), join(c1).c_str(), sum(c1), join(c0).c_str(), sum(c0), gap,
                                  since(t0))};
}

Verdict spanner_atoms() {
  const auto t0 = Clock::now();
  Prepared with = prepare("spanner-linkplus");
  Prepared without = prepare("spanner");
  auto cw = per_seed_coverage(with, with.suite.config.training);
  auto co = per_seed_coverage(without, without.suite.config.training);
  return {sum(cw) > sum(co), fmt("plain coverage over %zu seeds of %zu tests at L=%zu: link+ %s=%zu, without %s=%zu, %.0fs",
                                 cw.size(), with.test.size(), with.suite.config.training.hyper.layers, join(cw).c_str(),
                                 sum(cw), join(co).c_str(), sum(co), since(t0))};
}

Verdict report_arithmetic() {
  struct Row {
    std::size_t pl, ol;
    const char* printed;
  };
  const Row rows[] = {{440, 422, "1.0427"}, {400, 400, "1.0000"}, {3665, 377, "9.7215"}};
  std::string detail;
  bool pass = true;
  for (const auto& r : rows) {
    const std::string got = fmt("%.4f", *plan_quality(r.pl, r.ol, 1));
    pass = pass && got == r.printed;
    detail += fmt("%zu/%zu=%s ", r.pl, r.ol, got.c_str());
  }
  return {pass, detail};
}

using Pairs = std::set<std::pair<ObjectId, ObjectId>>;

Pairs pairs_of(const State& s, PredicateId p) {
  Pairs out;
  for (const auto& a : s.atoms()) {
    if (a.predicate == p) out.emplace(a.args[0], a.args[1]);
  }
  return out;
}

// Depth-first reachability from every node.
Pairs paths_oracle(const Pairs& edges, std::size_t n) {
  std::vector<std::vector<ObjectId>> adj(n);
  for (auto [x, y] : edges) adj[x].push_back(y);
  Pairs out;
  for (ObjectId src = 0; src < n; ++src) {
    std::vector<bool> seen(n, false);
    std::vector<ObjectId> stack(adj[src].begin(), adj[src].end());
    while (!stack.empty()) {
      ObjectId v = stack.back();
      stack.pop_back();
      if (seen[v]) continue;
      seen[v] = true;
      out.emplace(src, v);
      for (auto w : adj[v]) stack.push_back(w);
    }
  }
  return out;
}

Pairs join_oracle(const Pairs& a, const Pairs& b) {
  Pairs out;
  for (auto [x, y] : a)
    for (auto [y2, z] : b)
      if (y == y2) out.emplace(x, z);
  return out;
}

Verdict closures() {
  Domain base = parse_domain("(define (domain rel) (:predicates (r ?x ?y) (s ?x ?y) (t ?x ?y)))");
  Domain d = augment_domain(base, AugmentationSpec{{{"r", "r+"}}, {{{"r", "s", "t"}, "r-o-s-o-t"}}, false});
  const auto plus = *d.find_predicate("r+"), rst = *d.find_predicate("r-o-s-o-t");
  const std::vector<PredicateId> chain{0, 1, 2};
  std::mt19937_64 rng(200);
  std::size_t closure_bad = 0, join_bad = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const ObjectId n = 1 + rng() % 12;
    std::bernoulli_distribution edge(0.05 + 0.3 * (rng() % 100) / 100.0);
    std::vector<GroundAtom> atoms;
    for (PredicateId p = 0; p < 3; ++p)
      for (ObjectId x = 0; x < n; ++x)
        for (ObjectId y = 0; y < n; ++y)
          if (edge(rng)) atoms.push_back({p, {x, y}});
    State s(atoms);
    if (pairs_of(transitive_closure(d, s, 0, plus), plus) != paths_oracle(pairs_of(s, 0), n)) ++closure_bad;
    if (pairs_of(compose_roles(d, s, chain, rst), rst) != join_oracle(join_oracle(pairs_of(s, 0), pairs_of(s, 1)), pairs_of(s, 2)))
      ++join_bad;
  }
  return {closure_bad == 0 && join_bad == 0,
          fmt("200 cases, closure mismatches %zu, composition mismatches %zu", closure_bad, join_bad)};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Verdict()> run;
};

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only;
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--only") {
      std::stringstream ss(argv[i + 1]);
      for (std::string tok; std::getline(ss, tok, ',');) only.insert(std::stoi(tok));
    }
  }
  const std::vector<Criterion> criteria{
      {1, "gradient check", gradients},
      {2, "vstar oracle", vstar_oracle},
      {3, "loss zeros at vstar", loss_zeros},
      {4, "greedy optimality with vstar", greedy_vstar},
      {5, "permutation equivariance", equivariance},
      {6, "gripper generalization", gripper_generalization},
      {7, "blocks L1 vs L0", blocks_losses},
      {8, "spanner derived atoms", spanner_atoms},
      {9, "report arithmetic", report_arithmetic},
      {10, "closure and composition", closures},
  };
  std::ofstream report("acceptance-report.txt");
  int failed = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && !only.count(c.id)) continue;
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    if (!v.pass) ++failed;
    std::printf("%s criterion %d (%s): %s\n", v.pass ? "PASS" : "FAIL", c.id, c.name, v.detail.c_str());
    std::fflush(stdout);
    report << (v.pass ? "PASS" : "FAIL") << " criterion " << c.id << " (" << c.name << "): " << v.detail << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
