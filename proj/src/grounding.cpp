#include "gnnplan/grounding.hpp"

#include <algorithm>
#include <iterator>
#include <stdexcept>

namespace gnnplan {

State::State(std::vector<GroundAtom> atoms) : atoms_(std::move(atoms)) { normalize_atoms(atoms_); }

bool State::contains(const GroundAtom& atom) const {
  return std::binary_search(atoms_.begin(), atoms_.end(), atom);
}

bool State::contains_all(std::span<const GroundAtom> sorted_atoms) const {
  return std::includes(atoms_.begin(), atoms_.end(), sorted_atoms.begin(), sorted_atoms.end());
}

std::uint64_t State::hash() const {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](std::uint64_t v) {
    for (int i = 0; i < 4; ++i) {
      h ^= (v >> (8 * i)) & 0xffU;
      h *= 1099511628211ULL;
    }
  };
  for (const auto& a : atoms_) {
    mix(a.predicate);
    mix(a.args.size());
    for (auto o : a.args) mix(o);
  }
  return h;
}

namespace {

std::vector<GroundAtom> instantiate(const std::vector<LiftedAtom>& atoms, const std::vector<ObjectId>& binding) {
  std::vector<GroundAtom> out;
  out.reserve(atoms.size());
  for (const auto& a : atoms) {
    GroundAtom g{a.predicate, {}};
    g.args.reserve(a.params.size());
    for (auto p : a.params) g.args.push_back(binding[p]);
    out.push_back(std::move(g));
  }
  normalize_atoms(out);
  return out;
}

// Odometer over bindings, last parameter fastest.
bool next_binding(std::vector<ObjectId>& binding, ObjectId n) {
  for (std::size_t pos = binding.size(); pos-- > 0;) {
    if (++binding[pos] < n) return true;
    binding[pos] = 0;
  }
  return false;
}

}  // namespace

std::vector<GroundAction> ground_actions(const Domain& domain, const Instance& instance) {
  std::vector<GroundAction> out;
  const auto n = static_cast<ObjectId>(instance.objects.size());
  for (std::size_t s = 0; s < domain.schemas.size(); ++s) {
    const auto& schema = domain.schemas[s];
    const std::size_t arity = schema.parameters.size();
    if (arity > 0 && n == 0) continue;
    std::vector<ObjectId> binding(arity, 0);
    do {
      GroundAction action;
      action.schema = s;
      action.binding = binding;
      action.precondition = instantiate(schema.precondition, binding);
      action.add = instantiate(schema.add_effects, binding);
      auto del = instantiate(schema.delete_effects, binding);
      std::set_difference(del.begin(), del.end(), action.add.begin(), action.add.end(),
                          std::back_inserter(action.del));
      out.push_back(std::move(action));
    } while (next_binding(binding, n));
  }
  return out;
}

bool applicable(const State& state, const GroundAction& action) {
  return state.contains_all(action.precondition);
}

State apply(const State& state, const GroundAction& action) {
  if (!applicable(state, action)) {
    throw std::invalid_argument("apply: action preconditions do not hold in the state");
  }
  std::vector<GroundAtom> kept;
  kept.reserve(state.size() + action.add.size());
  std::set_difference(state.atoms().begin(), state.atoms().end(), action.del.begin(), action.del.end(),
                      std::back_inserter(kept));
  std::vector<GroundAtom> next;
  next.reserve(kept.size() + action.add.size());
  std::set_union(kept.begin(), kept.end(), action.add.begin(), action.add.end(), std::back_inserter(next));
  return State(std::move(next));
}

bool is_goal(const State& state, const Instance& instance) { return state.contains_all(instance.goal); }

GroundTask::GroundTask(Domain domain, Instance instance)
    : domain_(std::move(domain)), instance_(std::move(instance)) {
  normalize_atoms(instance_.init);
  normalize_atoms(instance_.goal);
  actions_ = ground_actions(domain_, instance_);
}

std::vector<Successor> GroundTask::successors(const State& state) const {
  std::vector<Successor> out;
  for (std::size_t i = 0; i < actions_.size(); ++i) {
    if (applicable(state, actions_[i])) out.push_back({i, apply(state, actions_[i])});
  }
  return out;
}

std::string GroundTask::action_name(std::size_t action) const {
  const auto& a = actions_.at(action);
  std::string s = "(" + domain_.schemas[a.schema].name;
  for (auto o : a.binding) s += " " + instance_.objects[o];
  return s + ")";
}

std::string GroundTask::state_string(const State& state) const {
  std::string s;
  for (const auto& a : state.atoms()) {
    if (!s.empty()) s += ' ';
    s += format_atom(domain_, instance_, a);
  }
  return s;
}

}  // namespace gnnplan
