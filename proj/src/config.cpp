#include "gnnplan/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace gnnplan {

using nlohmann::json;

ConfigError::ConfigError(std::vector<std::string> diagnostics)
    : std::runtime_error(diagnostics.empty() ? "invalid configuration" : diagnostics.front()),
      diagnostics_(std::move(diagnostics)) {}

std::vector<ExecMode> RunConfig::modes() const {
  if (mode == "both") return {ExecMode::cycle_avoid, ExecMode::plain};
  return {parse_exec_mode(mode)};
}

void RunConfig::validate() const {
  std::vector<std::string> errors;
  auto check = [&](auto&& fn) {
    try {
      fn();
    } catch (const std::exception& e) {
      errors.push_back(e.what());
    }
  };
  check([&] { training.validate(); });
  check([&] { (void)modes(); });
  if (state_cap == 0) errors.push_back("dataset.state_cap: must be positive");
  if (sample_cap == 0) errors.push_back("dataset.sample_cap: must be positive");
  if (jobs == 0) errors.push_back("jobs: must be positive");
  if (!errors.empty()) throw ConfigError(std::move(errors));
}

namespace {

// Walks one JSON object, remembers which keys were read and reports the rest.
class Reader {
 public:
  Reader(const json& node, std::string where, std::vector<std::string>& errors)
      : node_(node), where_(std::move(where)), errors_(errors) {
    if (!node_.is_object()) errors_.push_back(where_ + ": expected an object");
  }

  ~Reader() {
    if (!node_.is_object()) return;
    for (const auto& [key, value] : node_.items()) {
      if (!seen_.contains(key)) errors_.push_back(path(key) + ": unknown key");
    }
  }

  template <typename T>
  void get(const std::string& key, T& out) {
    const json* v = find(key);
    if (!v) return;
    try {
      out = v->get<T>();
    } catch (const json::exception&) {
      errors_.push_back(path(key) + ": wrong type");
    }
  }

  const json* find(const std::string& key) {
    seen_.insert(key);
    if (!node_.is_object() || !node_.contains(key)) return nullptr;
    return &node_.at(key);
  }

  std::string path(const std::string& key) const { return where_.empty() ? key : where_ + "." + key; }

 private:
  const json& node_;
  std::string where_;
  std::vector<std::string>& errors_;
  std::set<std::string> seen_;
};

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  if (path.is_relative() && !base.empty()) path = base / path;
  return path.lexically_normal();
}

void read_paths(Reader& r, const std::string& key, const std::filesystem::path& base,
                std::vector<std::filesystem::path>& out, std::vector<std::string>& errors) {
  std::vector<std::string> raw;
  r.get(key, raw);
  if (r.find(key) && !r.find(key)->is_array()) return;
  out.clear();
  for (const auto& p : raw) {
    if (p.empty()) errors.push_back(r.path(key) + ": empty path");
    out.push_back(resolve(base, p));
  }
}

AugmentationSpec read_custom_augmentation(const json& node, std::vector<std::string>& errors) {
  AugmentationSpec spec;
  Reader r(node, "augmentation", errors);
  r.get("goal_versions", spec.goal_versions);
  if (const json* closures = r.find("closures")) {
    if (!closures->is_array()) errors.push_back("augmentation.closures: expected an array");
    else
      for (const auto& c : *closures) {
        ClosureSpec cs;
        Reader cr(c, "augmentation.closures[]", errors);
        cr.get("predicate", cs.predicate);
        cr.get("derived", cs.derived);
        spec.closures.push_back(cs);
      }
  }
  if (const json* comps = r.find("compositions")) {
    if (!comps->is_array()) errors.push_back("augmentation.compositions: expected an array");
    else
      for (const auto& c : *comps) {
        CompositionSpec cs;
        Reader cr(c, "augmentation.compositions[]", errors);
        cr.get("chain", cs.chain);
        cr.get("derived", cs.derived);
        if (cs.derived.empty() && !cs.chain.empty()) cs.derived = composition_name(cs.chain);
        spec.compositions.push_back(cs);
      }
  }
  return spec;
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  json root;
  try {
    root = json::parse(text, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ConfigError({std::string("syntax: ") + e.what()});
  }
  RunConfig c;
  std::vector<std::string> errors;
  {
    Reader r(root, "", errors);
    std::string domain;
    r.get("domain", domain);
    if (!domain.empty()) c.domain = resolve(base_dir, domain);
    read_paths(r, "train", base_dir, c.train, errors);
    read_paths(r, "validation", base_dir, c.validation, errors);
    read_paths(r, "test", base_dir, c.test, errors);

    if (const json* aug = r.find("augmentation")) {
      if (aug->is_string()) {
        c.augmentation_preset = aug->get<std::string>();
        try {
          c.augmentation = augmentation_preset(c.augmentation_preset);
        } catch (const std::exception& e) {
          errors.push_back(std::string("augmentation: ") + e.what());
        }
      } else {
        c.augmentation_preset = "custom";
        c.augmentation = read_custom_augmentation(*aug, errors);
      }
    }

    if (const json* h = r.find("hyper")) {
      Reader hr(*h, "hyper", errors);
      hr.get("embedding", c.training.hyper.embedding);
      hr.get("layers", c.training.hyper.layers);
      hr.get("alpha", c.training.hyper.alpha);
      hr.get("seed", c.training.hyper.seed);
    }
    if (const json* l = r.find("loss")) {
      Reader lr(*l, "loss", errors);
      std::string kind = std::string(to_string(c.training.loss.kind));
      lr.get("kind", kind);
      try {
        c.training.loss.kind = parse_loss_kind(kind);
      } catch (const std::exception& e) {
        errors.push_back(std::string("loss.kind: ") + e.what());
      }
      lr.get("delta", c.training.loss.delta);
      lr.get("regularizers", c.training.loss.regularizers);
    }
    if (const json* t = r.find("training")) {
      Reader tr(*t, "training", errors);
      tr.get("learning_rate", c.training.learning_rate);
      tr.get("beta1", c.training.beta1);
      tr.get("beta2", c.training.beta2);
      tr.get("epsilon", c.training.epsilon);
      tr.get("batch_size", c.training.batch_size);
      tr.get("max_epochs", c.training.max_epochs);
      tr.get("budget_seconds", c.training.budget_seconds);
      tr.get("seeds", c.training.seeds);
      tr.get("eval_seed", c.training.eval_seed);
      std::string random_half = std::string(to_string(c.training.random_half));
      tr.get("random_half", random_half);
      try {
        c.training.random_half = parse_random_half(random_half);
      } catch (const std::exception& e) {
        errors.push_back(std::string("training.random_half: ") + e.what());
      }
    }
    if (const json* d = r.find("dataset")) {
      Reader dr(*d, "dataset", errors);
      dr.get("state_cap", c.state_cap);
      dr.get("sample_cap", c.sample_cap);
      dr.get("seed", c.dataset_seed);
    }
    if (const json* e = r.find("eval")) {
      Reader er(*e, "eval", errors);
      er.get("mode", c.mode);
      er.get("step_limit", c.step_limit);
      er.get("oracle_node_budget", c.oracle.node_budget);
      er.get("oracle_seconds", c.oracle.time_seconds);
      std::string checkpoint;
      er.get("checkpoint", checkpoint);
      if (!checkpoint.empty()) c.checkpoint = resolve(base_dir, checkpoint);
    }
    r.get("jobs", c.jobs);
    std::string out;
    r.get("out", out);
    if (!out.empty()) c.out = resolve(base_dir, out);
  }
  if (!errors.empty()) throw ConfigError(std::move(errors));
  c.validate();
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({path.string() + ": cannot open configuration"});
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config(ss.str(), path.parent_path());
  } catch (ConfigError& e) {
    std::vector<std::string> d;
    for (const auto& m : e.diagnostics()) d.push_back(path.string() + ": " + m);
    throw ConfigError(std::move(d));
  }
}

std::string config_to_json(const RunConfig& c, const std::filesystem::path& relative_to) {
  auto abs = [&](const std::filesystem::path& p) {
    auto a = std::filesystem::absolute(p).lexically_normal();
    if (relative_to.empty()) return a.string();
    return a.lexically_relative(std::filesystem::absolute(relative_to).lexically_normal()).string();
  };
  auto abs_list = [&](const std::vector<std::filesystem::path>& ps) {
    json a = json::array();
    for (const auto& p : ps) a.push_back(abs(p));
    return a;
  };
  json root;
  root["domain"] = c.domain.empty() ? std::string() : abs(c.domain);
  root["train"] = abs_list(c.train);
  root["validation"] = abs_list(c.validation);
  root["test"] = abs_list(c.test);
  if (c.augmentation_preset == "custom") {
    json aug;
    aug["goal_versions"] = c.augmentation.goal_versions;
    aug["closures"] = json::array();
    for (const auto& cl : c.augmentation.closures) aug["closures"].push_back({{"predicate", cl.predicate}, {"derived", cl.derived}});
    aug["compositions"] = json::array();
    for (const auto& cm : c.augmentation.compositions) aug["compositions"].push_back({{"chain", cm.chain}, {"derived", cm.derived}});
    root["augmentation"] = aug;
  } else {
    root["augmentation"] = c.augmentation_preset;
  }
  const auto& t = c.training;
  root["hyper"] = {{"embedding", t.hyper.embedding}, {"layers", t.hyper.layers}, {"alpha", t.hyper.alpha},
                   {"seed", t.hyper.seed}};
  root["loss"] = {{"kind", std::string(to_string(t.loss.kind))}, {"delta", t.loss.delta},
                  {"regularizers", t.loss.regularizers}};
  root["training"] = {{"learning_rate", t.learning_rate}, {"beta1", t.beta1},           {"beta2", t.beta2},
                      {"epsilon", t.epsilon},             {"batch_size", t.batch_size}, {"max_epochs", t.max_epochs},
                      {"budget_seconds", t.budget_seconds}, {"seeds", t.seeds},         {"eval_seed", t.eval_seed},
                      {"random_half", std::string(to_string(t.random_half))}};
  root["dataset"] = {{"state_cap", c.state_cap}, {"sample_cap", c.sample_cap}, {"seed", c.dataset_seed}};
  json eval = {{"mode", c.mode},
               {"step_limit", c.step_limit},
               {"oracle_node_budget", c.oracle.node_budget},
               {"oracle_seconds", c.oracle.time_seconds}};
  if (c.checkpoint) eval["checkpoint"] = abs(*c.checkpoint);
  root["eval"] = eval;
  root["jobs"] = c.jobs;
  root["out"] = abs(c.out);
  return root.dump(2) + "\n";
}

}  // namespace gnnplan
