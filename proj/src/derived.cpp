#include "gnnplan/derived.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

namespace gnnplan {

std::string goal_version_name(std::string_view predicate) { return std::string(predicate) + "@"; }

std::string composition_name(std::span<const std::string> chain) {
  std::string name;
  for (const auto& p : chain) name += (name.empty() ? "" : "-o-") + p;
  return name;
}

std::vector<std::string> augmentation_preset_names() {
  return {"none", "goal-versions", "blocks-above", "logistics-4comp", "spanner-linkplus"};
}

AugmentationSpec augmentation_preset(std::string_view name) {
  AugmentationSpec spec;
  if (name == "none") return spec;
  spec.goal_versions = true;
  if (name == "goal-versions") return spec;
  if (name == "blocks-above") {
    spec.closures.push_back({"on", "above"});
    return spec;
  }
  if (name == "logistics-4comp") {
    for (std::vector<std::string> chain : {std::vector<std::string>{"at", "in-city"}, {"at@", "in-city"},
                                           {"in", "at"}, {"in", "at", "in-city"}}) {
      std::string derived = composition_name(chain);
      spec.compositions.push_back({std::move(chain), std::move(derived)});
    }
    return spec;
  }
  if (name == "spanner-linkplus") {
    spec.closures.push_back({"link", "link+"});
    return spec;
  }
  throw std::invalid_argument("unknown augmentation preset '" + std::string(name) + "'");
}

namespace {

PredicateId require_binary(const Domain& domain, const std::string& name, const char* role) {
  auto id = domain.find_predicate(name);
  if (!id) throw std::invalid_argument(std::string(role) + " refers to undeclared predicate '" + name + "'");
  if (domain.predicates[*id].arity != 2) {
    throw std::invalid_argument(std::string(role) + " predicate '" + name + "' is not binary");
  }
  return *id;
}

void add_predicate(Domain& domain, std::string name, std::size_t arity, PredicateOrigin origin) {
  if (domain.find_predicate(name)) throw std::invalid_argument("derived predicate '" + name + "' clashes with an existing predicate");
  domain.predicates.push_back({std::move(name), arity, origin});
}

void check_binary(const Domain& domain, PredicateId p) {
  if (p >= domain.predicates.size() || domain.predicates[p].arity != 2) {
    throw std::invalid_argument("derived atoms need binary predicates");
  }
}

State with_atoms(const State& state, std::vector<GroundAtom> extra) {
  std::vector<GroundAtom> atoms = state.atoms();
  atoms.insert(atoms.end(), std::make_move_iterator(extra.begin()), std::make_move_iterator(extra.end()));
  return State(std::move(atoms));
}

std::vector<GroundAtom> closure_atoms(const State& state, PredicateId p, PredicateId plus) {
  std::map<ObjectId, std::vector<ObjectId>> next;
  for (const auto& a : state.atoms()) {
    if (a.predicate == p) next[a.args[0]].push_back(a.args[1]);
  }
  std::vector<GroundAtom> out;
  for (const auto& [source, targets] : next) {
    std::set<ObjectId> reached;
    std::vector<ObjectId> stack(targets.begin(), targets.end());
    while (!stack.empty()) {
      ObjectId v = stack.back();
      stack.pop_back();
      if (!reached.insert(v).second) continue;
      auto it = next.find(v);
      if (it != next.end()) stack.insert(stack.end(), it->second.begin(), it->second.end());
    }
    for (auto v : reached) out.push_back({plus, {source, v}});
  }
  return out;
}

std::vector<GroundAtom> composition_atoms(const State& state, std::span<const PredicateId> chain, PredicateId result) {
  std::set<std::pair<ObjectId, ObjectId>> current;
  for (const auto& a : state.atoms()) {
    if (a.predicate == chain[0]) current.emplace(a.args[0], a.args[1]);
  }
  for (std::size_t step = 1; step < chain.size() && !current.empty(); ++step) {
    std::map<ObjectId, std::vector<ObjectId>> relation;
    for (const auto& a : state.atoms()) {
      if (a.predicate == chain[step]) relation[a.args[0]].push_back(a.args[1]);
    }
    std::set<std::pair<ObjectId, ObjectId>> joined;
    for (const auto& [x, y] : current) {
      auto it = relation.find(y);
      if (it == relation.end()) continue;
      for (auto z : it->second) joined.emplace(x, z);
    }
    current = std::move(joined);
  }
  std::vector<GroundAtom> out;
  for (const auto& [x, z] : current) out.push_back({result, {x, z}});
  return out;
}

}  // namespace

Domain augment_domain(const Domain& domain, const AugmentationSpec& spec) {
  Domain out = domain;
  if (spec.goal_versions) {
    for (const auto& p : domain.predicates) {
      if (p.origin != PredicateOrigin::base) continue;
      add_predicate(out, goal_version_name(p.name), p.arity, PredicateOrigin::goal_version);
    }
  }
  for (const auto& c : spec.closures) {
    require_binary(out, c.predicate, "closure");
    add_predicate(out, c.derived, 2, PredicateOrigin::derived);
  }
  for (const auto& c : spec.compositions) {
    if (c.chain.size() < 2) throw std::invalid_argument("composition '" + c.derived + "' needs a chain of at least two predicates");
    for (const auto& p : c.chain) require_binary(out, p, "composition");
    add_predicate(out, c.derived, 2, PredicateOrigin::derived);
  }
  return out;
}

State add_goal_versions(const Domain& domain, const State& state, const Instance& instance) {
  std::vector<GroundAtom> extra;
  for (const auto& g : instance.goal) {
    auto id = domain.find_predicate(goal_version_name(domain.predicates.at(g.predicate).name));
    if (!id) throw std::invalid_argument("domain has no goal version of '" + domain.predicates[g.predicate].name + "'");
    extra.push_back({*id, g.args});
  }
  return with_atoms(state, std::move(extra));
}

State transitive_closure(const Domain& domain, const State& state, PredicateId p, PredicateId plus) {
  check_binary(domain, p);
  check_binary(domain, plus);
  return with_atoms(state, closure_atoms(state, p, plus));
}

State compose_roles(const Domain& domain, const State& state, std::span<const PredicateId> chain, PredicateId result) {
  if (chain.size() < 2) throw std::invalid_argument("compose_roles needs a chain of at least two predicates");
  for (auto p : chain) check_binary(domain, p);
  check_binary(domain, result);
  return with_atoms(state, composition_atoms(state, chain, result));
}

Augmenter::Augmenter(const Domain& base, AugmentationSpec spec)
    : spec_(std::move(spec)), domain_(augment_domain(base, spec_)), base_count_(base.predicates.size()) {
  for (const auto& c : spec_.closures) {
    closures_.push_back({*domain_.find_predicate(c.predicate), *domain_.find_predicate(c.derived)});
  }
  for (const auto& c : spec_.compositions) {
    ResolvedComposition r{{}, *domain_.find_predicate(c.derived)};
    for (const auto& p : c.chain) r.chain.push_back(*domain_.find_predicate(p));
    compositions_.push_back(std::move(r));
  }
}

State Augmenter::augment(const State& state, const Instance& instance) const {
  std::vector<GroundAtom> base;
  base.reserve(state.size());
  for (const auto& a : state.atoms()) {
    if (a.predicate < base_count_) base.push_back(a);
  }
  State out(std::move(base));
  if (spec_.goal_versions) out = add_goal_versions(domain_, out, instance);
  for (const auto& c : closures_) out = with_atoms(out, closure_atoms(out, c.p, c.plus));
  for (const auto& c : compositions_) out = with_atoms(out, composition_atoms(out, c.chain, c.result));
  return out;
}

}  // namespace gnnplan
