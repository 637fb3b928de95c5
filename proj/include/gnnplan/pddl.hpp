#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace gnnplan {

using PredicateId = std::uint32_t;
using ObjectId = std::uint32_t;

enum class PredicateOrigin { base, goal_version, derived };

std::string_view to_string(PredicateOrigin origin);

struct PredicateSymbol {
  std::string name;
  std::size_t arity = 0;
  PredicateOrigin origin = PredicateOrigin::base;

  bool operator==(const PredicateSymbol&) const = default;
};

// An atom inside an action schema. Arguments are indices into the schema's
// parameter list.
struct LiftedAtom {
  PredicateId predicate = 0;
  std::vector<std::size_t> params;

  bool operator==(const LiftedAtom&) const = default;
};

struct ActionSchema {
  std::string name;
  std::vector<std::string> parameters;  // without the leading '?'
  std::vector<LiftedAtom> precondition;
  std::vector<LiftedAtom> add_effects;
  std::vector<LiftedAtom> delete_effects;

  bool operator==(const ActionSchema&) const = default;
};

// A declared type. Every type other than "object" is also a unary predicate.
struct TypeDecl {
  std::string name;
  std::string parent = "object";

  bool operator==(const TypeDecl&) const = default;
};

struct Domain {
  std::string name;
  std::vector<TypeDecl> types;
  std::vector<PredicateSymbol> predicates;
  std::vector<ActionSchema> schemas;

  std::optional<PredicateId> find_predicate(std::string_view name) const;
  const PredicateSymbol& predicate(PredicateId id) const { return predicates.at(id); }
  const TypeDecl* find_type(std::string_view name) const;

  bool operator==(const Domain&) const = default;
};

struct GroundAtom {
  PredicateId predicate = 0;
  std::vector<ObjectId> args;

  auto operator<=>(const GroundAtom&) const = default;
  bool operator==(const GroundAtom&) const = default;
};

struct Instance {
  std::string name;
  std::string domain_name;
  std::vector<std::string> objects;
  std::vector<GroundAtom> init;  // sorted, duplicate free
  std::vector<GroundAtom> goal;  // sorted, duplicate free

  std::optional<ObjectId> find_object(std::string_view name) const;

  bool operator==(const Instance&) const = default;
};

// A positioned finding. `line`/`column` are 1-based and 0 when the finding
// concerns an in-memory structure; `location` then names the offending part.
struct Diagnostic {
  std::string file;
  std::size_t line = 0;
  std::size_t column = 0;
  std::string category;
  std::string message;
  std::string location;

  // file:line:col: category: message
  std::string str() const;
};

class PddlError : public std::runtime_error {
 public:
  explicit PddlError(Diagnostic diagnostic);
  const Diagnostic& diagnostic() const { return diagnostic_; }

 private:
  Diagnostic diagnostic_;
};

// Positive STRIPS with optional typing. Types are compiled into unary
// predicates: typed parameters gain a precondition, typed objects gain init
// atoms. Names are normalized to lower case.
Domain parse_domain(std::string_view text, std::string_view file = "<domain>");
Instance parse_instance(std::string_view text, const Domain& domain,
                        std::string_view file = "<problem>");

Domain load_domain(const std::string& path);
Instance load_instance(const std::string& path, const Domain& domain);

std::vector<Diagnostic> validate(const Domain& domain);
std::vector<Diagnostic> validate(const Domain& domain, const Instance& instance);

std::string to_pddl(const Domain& domain);
std::string to_pddl(const Domain& domain, const Instance& instance);

// "on(a,b)"; nullary atoms render as "handempty()".
std::string format_atom(const Domain& domain, const Instance& instance, const GroundAtom& atom);

void normalize_atoms(std::vector<GroundAtom>& atoms);

}  // namespace gnnplan
