#include "gnnplan/cli.hpp"

#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "gnnplan/benchmarks.hpp"
#include "gnnplan/config.hpp"
#include "gnnplan/experiment.hpp"
#include "gnnplan/gradcheck.hpp"
#include "gnnplan/suites.hpp"
#include "json.hpp"

namespace gnnplan {

namespace {

using nlohmann::json;

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string mode;
  std::string loss;
  std::string out;
  std::optional<std::size_t> jobs;
  std::string format = "text";
  std::string partition = "all";
  std::string checkpoint;
  std::string suite;
  bool atoms = false;
};

class RuntimeFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::create_directories(path.parent_path().empty() ? "." : path.parent_path());
  std::ofstream out(path);
  out << text;
  if (!out) throw RuntimeFailure(path.string() + ": cannot write");
}

RunConfig load(const Flags& flags, bool needs_config) {
  RunConfig c;
  if (!flags.config.empty()) {
    c = load_config(flags.config);
  } else if (needs_config) {
    throw ConfigError({"--config is required for this command"});
  }
  if (!flags.mode.empty()) c.mode = flags.mode;
  if (!flags.loss.empty()) {
    try {
      c.training.loss.kind = parse_loss_kind(flags.loss);
    } catch (const std::exception& e) {
      throw ConfigError({std::string("--loss: ") + e.what()});
    }
  }
  if (!flags.out.empty()) c.out = flags.out;
  if (flags.jobs) c.jobs = *flags.jobs;
  if (!flags.checkpoint.empty()) c.checkpoint = flags.checkpoint;
  c.validate();
  if (needs_config && c.domain.empty()) throw ConfigError({"domain: required"});
  return c;
}

void snapshot(const RunConfig& c, std::string_view command) {
  write_file(c.out / (std::string(command) + ".config.json"), config_to_json(c));
}

// Domain plus the three partitions, ids taken from the file stems.
struct Workspace {
  Domain domain;
  TaskSet train;
  TaskSet validation;
  TaskSet test;
};

void load_partition(const std::vector<std::filesystem::path>& files, const Domain& domain, TaskSet& set) {
  std::set<std::string> ids;
  for (const auto& f : files) {
    const std::string id = f.stem().string();
    if (!ids.insert(id).second) throw ConfigError({f.string() + ": duplicate instance id '" + id + "'"});
    set.add(id, load_instance(f.string(), domain));
  }
}

Workspace load_workspace(const RunConfig& c) {
  Workspace w;
  w.domain = load_domain(c.domain.string());
  std::vector<Diagnostic> problems = validate(w.domain);
  w.train.domain = w.validation.domain = w.test.domain = w.domain;
  load_partition(c.train, w.domain, w.train);
  load_partition(c.validation, w.domain, w.validation);
  load_partition(c.test, w.domain, w.test);
  for (const TaskSet* s : {&w.train, &w.validation, &w.test}) {
    for (const auto& t : s->tasks) {
      auto d = validate(w.domain, t->instance());
      problems.insert(problems.end(), d.begin(), d.end());
    }
  }
  if (!problems.empty()) {
    std::vector<std::string> lines;
    for (const auto& d : problems) lines.push_back(d.str());
    throw ConfigError(std::move(lines));
  }
  return w;
}

std::vector<std::pair<std::string, const TaskSet*>> selected(const Workspace& w, const std::string& partition) {
  std::vector<std::pair<std::string, const TaskSet*>> out;
  if (partition == "all" || partition == "train") out.emplace_back("train", &w.train);
  if (partition == "all" || partition == "validation") out.emplace_back("validation", &w.validation);
  if (partition == "all" || partition == "test") out.emplace_back("test", &w.test);
  if (out.empty()) throw ConfigError({"--partition: expected train, validation, test or all"});
  return out;
}

// Instances only, for the disjointness check across all three partitions.
Dataset instances_only(const TaskSet& set, Partition p) {
  Dataset d;
  d.partition = p;
  for (std::size_t i = 0; i < set.size(); ++i) d.instances.push_back({set.ids[i], set.tasks[i]->instance(), {}});
  return d;
}

void require_disjoint(const Workspace& w) {
  Dataset a = instances_only(w.train, Partition::train);
  Dataset b = instances_only(w.validation, Partition::validation);
  Dataset c = instances_only(w.test, Partition::test);
  const Dataset* all[] = {&a, &b, &c};
  try {
    check_disjoint(all);
  } catch (const std::invalid_argument& e) {
    throw ConfigError({e.what()});
  }
}

// ---------------------------------------------------------------------------

int cmd_parse(const Flags& flags, std::ostream& out) {
  RunConfig c = load(flags, true);
  snapshot(c, "parse");
  Workspace w = load_workspace(c);
  if (flags.format == "json") {
    json j;
    j["domain"] = w.domain.name;
    for (const auto& p : w.domain.predicates) j["predicates"].push_back({{"name", p.name}, {"arity", p.arity}});
    for (const auto& s : w.domain.schemas) j["schemas"].push_back({{"name", s.name}, {"parameters", s.parameters.size()}});
    for (const auto& [name, set] : selected(w, "all")) {
      for (std::size_t i = 0; i < set->size(); ++i) {
        const auto& inst = set->tasks[i]->instance();
        j["instances"].push_back({{"id", set->ids[i]},
                                  {"partition", name},
                                  {"objects", inst.objects.size()},
                                  {"init", inst.init.size()},
                                  {"goal", inst.goal.size()},
                                  {"ground_actions", set->tasks[i]->actions().size()}});
      }
    }
    out << j.dump(2) << '\n';
    return kExitOk;
  }
  out << "domain " << w.domain.name << ": " << w.domain.predicates.size() << " predicates, " << w.domain.schemas.size()
      << " schemas\n";
  for (const auto& p : w.domain.predicates) out << "  predicate " << p.name << '/' << p.arity << '\n';
  for (const auto& s : w.domain.schemas) out << "  schema " << s.name << '/' << s.parameters.size() << '\n';
  for (const auto& [name, set] : selected(w, "all")) {
    for (std::size_t i = 0; i < set->size(); ++i) {
      const auto& inst = set->tasks[i]->instance();
      out << name << ' ' << set->ids[i] << ": " << inst.objects.size() << " objects, " << inst.init.size()
          << " init atoms, " << inst.goal.size() << " goal atoms, " << set->tasks[i]->actions().size()
          << " ground actions\n";
    }
  }
  return kExitOk;
}

int cmd_expand(const Flags& flags, std::ostream& out) {
  RunConfig c = load(flags, true);
  snapshot(c, "expand");
  Workspace w = load_workspace(c);
  json j = json::array();
  for (const auto& [name, set] : selected(w, flags.partition)) {
    if (set->size() == 0) continue;
    LabeledSet labeled;
    try {
      labeled = label_tasks(*set, c.state_cap, c.sample_cap, c.dataset_seed, parse_partition(name));
    } catch (const StateCapExceeded& e) {
      throw RuntimeFailure(e.what());
    }
    for (std::size_t i = 0; i < set->size(); ++i) {
      const auto& ts = labeled.systems[i];
      std::size_t edges = 0, goals = 0, unsolvable = 0;
      for (std::size_t s = 0; s < ts.size(); ++s) {
        edges += ts.edges[s].size();
        goals += ts.goal[s];
        unsolvable += ts.vstar[s] == kUnsolvable;
      }
      if (flags.format == "json") {
        j.push_back({{"partition", name},
                     {"id", set->ids[i]},
                     {"states", ts.size()},
                     {"transitions", edges},
                     {"goals", goals},
                     {"unsolvable", unsolvable},
                     {"vstar_init", ts.vstar[ts.init]}});
      } else {
        out << name << ' ' << set->ids[i] << ": " << ts.size() << " states, " << edges << " transitions, " << goals
            << " goal, " << unsolvable << " unsolvable, V*(init) = " << ts.vstar[ts.init] << '\n';
      }
    }
    std::ostringstream ds;
    write_dataset(ds, labeled.dataset, w.domain);
    write_file(c.out / (name + ".dataset"), ds.str());
  }
  if (flags.format == "json") out << j.dump(2) << '\n';
  return kExitOk;
}

int cmd_augment(const Flags& flags, std::ostream& out) {
  RunConfig c = load(flags, true);
  snapshot(c, "augment");
  Workspace w = load_workspace(c);
  Augmenter aug(w.domain, c.augmentation);
  const Domain& d = aug.domain();
  out << "augmented domain " << d.name << ": " << d.predicates.size() << " predicates ("
      << aug.base_predicate_count() << " base)\n";
  for (std::size_t p = aug.base_predicate_count(); p < d.predicates.size(); ++p) {
    out << "  " << to_string(d.predicates[p].origin) << ' ' << d.predicates[p].name << '/' << d.predicates[p].arity
        << '\n';
  }
  for (const auto& [name, set] : selected(w, flags.partition)) {
    for (std::size_t i = 0; i < set->size(); ++i) {
      const GroundTask& t = *set->tasks[i];
      State s = aug.augment(t.initial_state(), t.instance());
      std::vector<std::size_t> per_origin(3, 0);
      for (const auto& a : s.atoms()) ++per_origin[static_cast<std::size_t>(d.predicates[a.predicate].origin)];
      out << name << ' ' << set->ids[i] << ": init " << per_origin[0] << " base, " << per_origin[1]
          << " goal-version, " << per_origin[2] << " derived atoms\n";
      if (flags.atoms) {
        for (const auto& a : s.atoms()) {
          if (a.predicate >= aug.base_predicate_count()) out << "  " << format_atom(d, t.instance(), a) << '\n';
        }
      }
    }
  }
  return kExitOk;
}

int cmd_train(const Flags& flags, std::ostream& out, std::ostream& err) {
  RunConfig c = load(flags, true);
  if (flags.seed) c.training.seeds = {*flags.seed};
  snapshot(c, "train");
  Workspace w = load_workspace(c);
  require_disjoint(w);
  if (w.train.size() == 0) throw ConfigError({"train: at least one instance is required"});
  LabeledSet tr, va;
  try {
    tr = label_tasks(w.train, c.state_cap, c.sample_cap, c.dataset_seed, Partition::train);
    va = label_tasks(w.validation, c.state_cap, c.sample_cap, c.dataset_seed, Partition::validation);
  } catch (const StateCapExceeded& e) {
    throw RuntimeFailure(e.what());
  }
  Augmenter aug(w.domain, c.augmentation);
  std::optional<TrainResult> trained;
  try {
    trained = train(tr.dataset, va.dataset, aug, c.training, [&](const EpochLog& e) {
      err << "seed " << e.seed << " epoch " << e.epoch << " train " << e.train_loss << " validation "
          << e.validation_loss << '\n';
    });
  } catch (const NonFiniteGradient& e) {
    throw RuntimeFailure(e.what());
  }
  const TrainResult& r = *trained;
  write_training_run(c.out, r);
  for (const auto& wmsg : r.warnings) err << "warning: " << wmsg << '\n';
  if (flags.format == "json") {
    json j;
    j["selected"] = {{"seed", r.best.seed}, {"epoch", r.best.epoch}, {"validation_loss", r.best.validation_loss}};
    for (const auto& s : r.per_seed) {
      j["seeds"].push_back({{"seed", s.seed}, {"epoch", s.epoch}, {"validation_loss", s.validation_loss}});
    }
    j["checkpoint"] = (c.out / "checkpoint.txt").string();
    out << j.dump(2) << '\n';
  } else {
    for (const auto& s : r.per_seed) {
      out << "seed " << s.seed << ": best epoch " << s.epoch << ", validation loss " << s.validation_loss << '\n';
    }
    out << "selected seed " << r.best.seed << " epoch " << r.best.epoch << "; checkpoint "
        << (c.out / "checkpoint.txt").string() << '\n';
  }
  return kExitOk;
}

struct Executed {
  Workspace workspace;
  std::vector<PolicyTrace> traces;
};

Executed execute_test_set(RunConfig& c, const Flags& flags, std::string_view command) {
  if (flags.seed) c.training.eval_seed = *flags.seed;
  const auto checkpoint_path = c.checkpoint.value_or(c.out / "checkpoint.txt");
  c.checkpoint = checkpoint_path;
  snapshot(c, command);
  Executed e{load_workspace(c), {}};
  std::ifstream in(checkpoint_path);
  if (!in) throw RuntimeFailure(checkpoint_path.string() + ": cannot open checkpoint");
  Checkpoint cp = read_checkpoint(in);
  Augmenter aug(e.workspace.domain, c.augmentation);
  try {
    cp.params.check_signature(aug.domain());
  } catch (const std::exception& ex) {
    throw ConfigError({std::string("checkpoint does not match the configured domain/augmentation: ") + ex.what()});
  }
  PolicyRunOptions po;
  po.modes = c.modes();
  po.step_limit = c.step_limit;
  po.eval_seed = c.training.eval_seed;
  po.jobs = c.jobs;
  e.traces = run_policy(cp.params, aug, e.workspace.test, po);
  std::ostringstream traces;
  for (std::size_t i = 0; i < e.traces.size(); ++i) {
    write_trace(traces, e.traces[i], *e.workspace.test.tasks[i % e.workspace.test.size()]);
  }
  write_file(c.out / "traces.txt", traces.str());
  return e;
}

int cmd_exec(const Flags& flags, std::ostream& out) {
  RunConfig c = load(flags, true);
  Executed e = execute_test_set(c, flags, "exec");
  json j = json::array();
  for (const auto& t : e.traces) {
    if (flags.format == "json") {
      j.push_back({{"id", t.instance_id},
                   {"mode", std::string(to_string(t.mode))},
                   {"outcome", std::string(to_string(t.outcome))},
                   {"length", t.plan_length}});
    } else {
      out << t.instance_id << ' ' << to_string(t.mode) << ' ' << to_string(t.outcome) << ' ' << t.plan_length << '\n';
    }
  }
  if (flags.format == "json") out << j.dump(2) << '\n';
  return kExitOk;
}

int cmd_eval(const Flags& flags, std::ostream& out) {
  RunConfig c = load(flags, true);
  Executed e = execute_test_set(c, flags, "eval");
  OracleLengths oracle = optimal_lengths(e.workspace.test, c.oracle);
  EvalReport report = build_report(e.traces, oracle);
  write_file(c.out / "report.txt", render_text(report));
  write_file(c.out / "report.tsv", render_tsv(report));
  if (flags.format == "json") {
    json j;
    for (const auto& s : report.sections) {
      json rows = json::array();
      auto row = [](const ReportRow& r) {
        json x = {{"domain", r.domain},   {"instances", r.instances},       {"solved", r.solved},
                  {"length", r.length},   {"pl", r.policy_length},          {"ol", r.optimal_length},
                  {"common", r.common},   {"coverage_percent", r.coverage_percent()}};
        auto pq = r.plan_quality();
        x["pq"] = pq ? json(*pq) : json(nullptr);
        return x;
      };
      for (const auto& r : s.rows) rows.push_back(row(r));
      rows.push_back(row(s.total));
      j[std::string(to_string(s.mode))] = rows;
    }
    out << j.dump(2) << '\n';
  } else if (flags.format == "tsv") {
    out << render_tsv(report);
  } else {
    out << render_text(report);
  }
  return kExitOk;
}

int cmd_gradcheck(const Flags& flags, std::ostream& out) {
  RunConfig c = load(flags, false);
  const std::uint64_t seed = flags.seed.value_or(c.training.hyper.seed);
  c.training.hyper.seed = seed;
  snapshot(c, "gradcheck");
  GradcheckReport r = gradient_check_suite(seed);
  const bool pass = r.max_error < 1e-4;
  if (flags.format == "json") {
    out << json{{"seed", seed},
                {"max_relative_error", r.max_error},
                {"cases", r.cases},
                {"parameters", r.parameters},
                {"seconds", r.seconds},
                {"pass", pass}}
               .dump(2)
        << '\n';
  } else {
    out << "max relative error " << std::scientific << std::setprecision(3) << r.max_error << std::defaultfloat
        << " over " << r.cases << " cases (" << r.parameters << " parameters each): " << (pass ? "PASS" : "FAIL")
        << " (threshold 1e-4)\n";
  }
  return pass ? kExitOk : kExitRuntime;
}

int cmd_generate(const Flags& flags, std::ostream& out) {
  if (flags.suite.empty()) throw ConfigError({"--suite is required"});
  const std::filesystem::path dir = flags.out.empty() ? std::filesystem::path("data") / flags.suite : std::filesystem::path(flags.out);
  bench::Suite s;
  try {
    s = bench::suite(flags.suite);
  } catch (const std::invalid_argument& e) {
    throw ConfigError({e.what()});
  }
  RunConfig c = s.config;
  c.domain = dir / "domain.pddl";
  write_file(c.domain, bench::domain_pddl(s.domain));
  auto emit = [&](const std::vector<bench::SuiteInstance>& list, const std::string& sub,
                  std::vector<std::filesystem::path>& paths) {
    paths.clear();
    for (const auto& inst : list) {
      auto p = dir / sub / (inst.id + ".pddl");
      write_file(p, inst.pddl);
      paths.push_back(p);
    }
  };
  emit(s.train, "train", c.train);
  emit(s.validation, "validation", c.validation);
  emit(s.test, "test", c.test);
  c.out = dir / "run";
  write_file(dir / "config.json", config_to_json(c, dir));
  out << "wrote suite " << s.name << " to " << dir.string() << " (" << s.train.size() << " train, "
      << s.validation.size() << " validation, " << s.test.size() << " test)\n";
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"GNN value functions and greedy policies for classical planning", "gnnplan"};
  app.require_subcommand(1);
  Flags flags;

  auto common = [&](CLI::App* sub, bool with_partition) {
    sub->add_option("--config", flags.config, "run configuration file (JSON)");
    sub->add_option("--seed", flags.seed, "seed override");
    sub->add_option("--mode", flags.mode, "execution mode")->check(CLI::IsMember({"plain", "cycle-avoid", "both"}));
    sub->add_option("--loss", flags.loss, "loss override")->check(CLI::IsMember({"l0", "l1", "supervised"}));
    sub->add_option("--out", flags.out, "output directory");
    sub->add_option("--jobs", flags.jobs, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--format", flags.format, "output format")->check(CLI::IsMember({"text", "json", "tsv"}));
    if (with_partition) {
      sub->add_option("--partition", flags.partition, "train, validation, test or all")
          ->check(CLI::IsMember({"train", "validation", "test", "all"}));
    }
  };
  auto* parse = app.add_subcommand("parse", "parse and validate the domain and all instances");
  common(parse, false);
  auto* expand = app.add_subcommand("expand", "expand state spaces, label V* and write datasets");
  common(expand, true);
  auto* augment = app.add_subcommand("augment", "show derived atoms added to initial states");
  common(augment, true);
  augment->add_flag("--atoms", flags.atoms, "list the added atoms");
  auto* train_cmd = app.add_subcommand("train", "train value networks and keep the best checkpoint");
  common(train_cmd, false);
  auto* exec = app.add_subcommand("exec", "run the greedy policy on the test instances");
  common(exec, false);
  exec->add_option("--checkpoint", flags.checkpoint, "checkpoint file");
  auto* eval = app.add_subcommand("eval", "run the policy and report coverage and plan quality");
  common(eval, false);
  eval->add_option("--checkpoint", flags.checkpoint, "checkpoint file");
  auto* gradcheck = app.add_subcommand("gradcheck", "finite-difference gradient suite");
  common(gradcheck, false);
  auto* generate = app.add_subcommand("generate", "write a benchmark suite with its run configuration");
  generate->add_option("--suite", flags.suite, "suite name")->required();
  generate->add_option("--out", flags.out, "target directory (default data/<suite>)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (parse->parsed()) return cmd_parse(flags, out);
    if (expand->parsed()) return cmd_expand(flags, out);
    if (augment->parsed()) return cmd_augment(flags, out);
    if (train_cmd->parsed()) return cmd_train(flags, out, err);
    if (exec->parsed()) return cmd_exec(flags, out);
    if (eval->parsed()) return cmd_eval(flags, out);
    if (gradcheck->parsed()) return cmd_gradcheck(flags, out);
    if (generate->parsed()) return cmd_generate(flags, out);
  } catch (const ConfigError& e) {
    for (const auto& d : e.diagnostics()) err << "error: " << d << '\n';
    return kExitConfig;
  } catch (const PddlError& e) {
    err << e.diagnostic().str() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace gnnplan
