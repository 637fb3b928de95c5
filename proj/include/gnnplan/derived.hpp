#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gnnplan/grounding.hpp"

namespace gnnplan {

struct ClosureSpec {
  std::string predicate;
  std::string derived;

  bool operator==(const ClosureSpec&) const = default;
};

// Relational join along the chain: r(x, z) holds when chain[0](x, y1),
// chain[1](y1, y2), ..., chain[n-1](y_{n-1}, z) for some witnesses.
struct CompositionSpec {
  std::vector<std::string> chain;
  std::string derived;

  bool operator==(const CompositionSpec&) const = default;
};

struct AugmentationSpec {
  std::vector<ClosureSpec> closures;
  std::vector<CompositionSpec> compositions;
  bool goal_versions = false;

  bool operator==(const AugmentationSpec&) const = default;
};

// Named presets: "none", "goal-versions", "blocks-above", "logistics-4comp",
// "spanner-linkplus". All but "none" include goal versions.
AugmentationSpec augmentation_preset(std::string_view name);
std::vector<std::string> augmentation_preset_names();

std::string goal_version_name(std::string_view predicate);
std::string composition_name(std::span<const std::string> chain);

// New domain with goal-version predicates (one per base predicate, when
// requested), then closures, then compositions appended after the existing
// predicates. Schemas are untouched. Throws std::invalid_argument on dangling
// or non-binary references and on name clashes.
Domain augment_domain(const Domain& domain, const AugmentationSpec& spec);

// The state plus p@(o...) for every goal atom p(o...). `domain` must hold the
// goal-version predicates.
State add_goal_versions(const Domain& domain, const State& state, const Instance& instance);

// The state plus plus(x, y) for every pair joined by a directed path of
// p-atoms of length at least one. Throws std::invalid_argument unless both
// predicates are binary.
State transitive_closure(const Domain& domain, const State& state, PredicateId p, PredicateId plus);

State compose_roles(const Domain& domain, const State& state, std::span<const PredicateId> chain, PredicateId result);

// Resolved augmentation for one base domain. Derived atoms are recomputed
// from the base atoms on every call; atoms over derived predicates already
// present in the input are discarded first.
class Augmenter {
 public:
  Augmenter(const Domain& base, AugmentationSpec spec);

  const Domain& domain() const { return domain_; }
  const AugmentationSpec& spec() const { return spec_; }
  std::size_t base_predicate_count() const { return base_count_; }

  State augment(const State& state, const Instance& instance) const;

 private:
  struct ResolvedClosure {
    PredicateId p, plus;
  };
  struct ResolvedComposition {
    std::vector<PredicateId> chain;
    PredicateId result;
  };

  AugmentationSpec spec_;
  Domain domain_;
  std::size_t base_count_ = 0;
  std::vector<ResolvedClosure> closures_;
  std::vector<ResolvedComposition> compositions_;
};

}  // namespace gnnplan
