#include "gnnplan/pddl.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

namespace gnnplan {

std::string_view to_string(PredicateOrigin origin) {
  switch (origin) {
    case PredicateOrigin::base: return "base";
    case PredicateOrigin::goal_version: return "goal-version";
    case PredicateOrigin::derived: return "derived";
  }
  return "base";
}

std::optional<PredicateId> Domain::find_predicate(std::string_view name) const {
  for (std::size_t i = 0; i < predicates.size(); ++i) {
    if (predicates[i].name == name) return static_cast<PredicateId>(i);
  }
  return std::nullopt;
}

const TypeDecl* Domain::find_type(std::string_view name) const {
  for (const auto& t : types) {
    if (t.name == name) return &t;
  }
  return nullptr;
}

std::optional<ObjectId> Instance::find_object(std::string_view name) const {
  for (std::size_t i = 0; i < objects.size(); ++i) {
    if (objects[i] == name) return static_cast<ObjectId>(i);
  }
  return std::nullopt;
}

std::string Diagnostic::str() const {
  std::ostringstream out;
  out << (file.empty() ? "<input>" : file) << ':' << line << ':' << column << ": " << category
      << ": " << message;
  if (!location.empty()) out << " [" << location << ']';
  return out.str();
}

PddlError::PddlError(Diagnostic diagnostic)
    : std::runtime_error(diagnostic.str()), diagnostic_(std::move(diagnostic)) {}

void normalize_atoms(std::vector<GroundAtom>& atoms) {
  std::sort(atoms.begin(), atoms.end());
  atoms.erase(std::unique(atoms.begin(), atoms.end()), atoms.end());
}

namespace {

// ---------------------------------------------------------------------------
// Tokenizer and s-expressions

struct Token {
  std::string text;
  std::size_t line = 1;
  std::size_t column = 1;
};

struct SExpr {
  bool is_list = false;
  std::string atom;
  std::vector<SExpr> items;
  std::size_t line = 1;
  std::size_t column = 1;
};

class Reader {
 public:
  Reader(std::string_view text, std::string_view file) : text_(text), file_(file) {}

  SExpr read_document() {
    tokenize();
    std::size_t pos = 0;
    if (tokens_.empty()) fail(1, 1, "syntax", "empty input");
    SExpr root = read(pos);
    if (pos != tokens_.size()) {
      fail(tokens_[pos].line, tokens_[pos].column, "syntax", "trailing input after definition");
    }
    return root;
  }

  [[noreturn]] void fail(std::size_t line, std::size_t column, std::string category,
                         std::string message) const {
    Diagnostic d;
    d.file = std::string(file_);
    d.line = line;
    d.column = column;
    d.category = std::move(category);
    d.message = std::move(message);
    throw PddlError(std::move(d));
  }

  [[noreturn]] void fail(const SExpr& at, std::string category, std::string message) const {
    fail(at.line, at.column, std::move(category), std::move(message));
  }

 private:
  void tokenize() {
    std::size_t line = 1, column = 1;
    std::size_t i = 0;
    auto advance = [&](char c) {
      if (c == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    };
    while (i < text_.size()) {
      char c = text_[i];
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance(c);
        ++i;
        continue;
      }
      if (c == ';') {
        while (i < text_.size() && text_[i] != '\n') {
          advance(text_[i]);
          ++i;
        }
        continue;
      }
      if (c == '(' || c == ')') {
        tokens_.push_back({std::string(1, c), line, column});
        advance(c);
        ++i;
        continue;
      }
      Token tok{"", line, column};
      while (i < text_.size()) {
        char d = text_[i];
        if (std::isspace(static_cast<unsigned char>(d)) || d == '(' || d == ')' || d == ';') break;
        tok.text.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(d))));
        advance(d);
        ++i;
      }
      tokens_.push_back(std::move(tok));
    }
  }

  SExpr read(std::size_t& pos) {
    const Token& tok = tokens_[pos];
    if (tok.text == ")") fail(tok.line, tok.column, "syntax", "unexpected ')'");
    if (tok.text != "(") {
      ++pos;
      return SExpr{false, tok.text, {}, tok.line, tok.column};
    }
    SExpr list{true, "", {}, tok.line, tok.column};
    ++pos;
    while (true) {
      if (pos >= tokens_.size()) fail(tok.line, tok.column, "syntax", "unbalanced '(' (missing ')')");
      if (tokens_[pos].text == ")") {
        ++pos;
        return list;
      }
      list.items.push_back(read(pos));
    }
  }

  std::string_view text_;
  std::string_view file_;
  std::vector<Token> tokens_;
};

bool is_variable(const SExpr& e) { return !e.is_list && !e.atom.empty() && e.atom[0] == '?'; }

bool head_is(const SExpr& e, std::string_view head) {
  return e.is_list && !e.items.empty() && !e.items[0].is_list && e.items[0].atom == head;
}

bool valid_identifier(std::string_view name) {
  if (name.empty()) return false;
  if (!std::isalpha(static_cast<unsigned char>(name[0]))) return false;
  return std::all_of(name.begin(), name.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '@' ||
           c == '+';
  });
}

// A typed list such as "a b - t c - u d". Names without a type get "object".
struct TypedName {
  const SExpr* node;
  std::string name;
  std::string type;
};

std::vector<TypedName> read_typed_list(const Reader& reader, const std::vector<SExpr>& items,
                                       std::size_t first) {
  std::vector<TypedName> out;
  std::size_t pending = 0;
  for (std::size_t i = first; i < items.size(); ++i) {
    const SExpr& e = items[i];
    if (e.is_list) reader.fail(e, "syntax", "expected a name in typed list");
    if (e.atom == "-") {
      if (i + 1 >= items.size()) reader.fail(e, "syntax", "missing type after '-'");
      const SExpr& t = items[i + 1];
      if (head_is(t, "either")) reader.fail(t, "unsupported", "'either' types are not supported");
      if (t.is_list) reader.fail(t, "syntax", "expected a type name");
      for (std::size_t j = out.size() - pending; j < out.size(); ++j) out[j].type = t.atom;
      pending = 0;
      ++i;
      continue;
    }
    out.push_back({&e, e.atom, "object"});
    ++pending;
  }
  return out;
}

class DomainBuilder {
 public:
  DomainBuilder(const Reader& reader) : reader_(reader) {}

  Domain build(const SExpr& root) {
    if (!head_is(root, "define")) reader_.fail(root, "syntax", "expected (define ...)");
    if (root.items.size() < 2 || !head_is(root.items[1], "domain") ||
        root.items[1].items.size() != 2 || root.items[1].items[1].is_list) {
      reader_.fail(root, "syntax", "expected (domain <name>)");
    }
    domain_.name = root.items[1].items[1].atom;

    const SExpr* predicates = nullptr;
    const SExpr* types = nullptr;
    std::vector<const SExpr*> actions;
    for (std::size_t i = 2; i < root.items.size(); ++i) {
      const SExpr& section = root.items[i];
      if (!section.is_list || section.items.empty() || section.items[0].is_list) {
        reader_.fail(section, "syntax", "expected a domain section");
      }
      const std::string& key = section.items[0].atom;
      if (key == ":requirements") {
        check_requirements(section);
      } else if (key == ":types") {
        types = &section;
      } else if (key == ":predicates") {
        predicates = &section;
      } else if (key == ":action") {
        actions.push_back(&section);
      } else if (key == ":constants") {
        reader_.fail(section, "unsupported", "domain constants are not supported");
      } else if (key == ":functions") {
        reader_.fail(section, "unsupported", "numeric fluents are not supported");
      } else if (key == ":derived") {
        reader_.fail(section, "unsupported", "derived axioms are not supported");
      } else {
        reader_.fail(section, "syntax", "unknown domain section '" + key + "'");
      }
    }
    if (types) read_types(*types);
    if (predicates) read_predicates(*predicates);
    for (const SExpr* a : actions) read_action(*a);
    return std::move(domain_);
  }

 private:
  void check_requirements(const SExpr& section) {
    for (std::size_t i = 1; i < section.items.size(); ++i) {
      const SExpr& flag = section.items[i];
      if (flag.is_list) reader_.fail(flag, "syntax", "expected a requirement flag");
      if (flag.atom != ":strips" && flag.atom != ":typing") {
        reader_.fail(flag, "unsupported", "unsupported requirement " + flag.atom);
      }
    }
  }

  void read_types(const SExpr& section) {
    auto list = read_typed_list(reader_, section.items, 1);
    for (const auto& t : list) {
      if (t.name == "object") continue;
      if (!valid_identifier(t.name)) reader_.fail(*t.node, "syntax", "invalid type name '" + t.name + "'");
      if (domain_.find_type(t.name)) reader_.fail(*t.node, "duplicate", "type '" + t.name + "' declared twice");
      domain_.types.push_back({t.name, t.type});
      domain_.predicates.push_back({t.name, 1, PredicateOrigin::base});
    }
    for (const auto& t : list) {
      if (t.type != "object" && !domain_.find_type(t.type)) {
        reader_.fail(*t.node, "type", "unknown parent type '" + t.type + "'");
      }
    }
  }

  void read_predicates(const SExpr& section) {
    for (std::size_t i = 1; i < section.items.size(); ++i) {
      const SExpr& decl = section.items[i];
      if (!decl.is_list || decl.items.empty() || decl.items[0].is_list) {
        reader_.fail(decl, "syntax", "expected a predicate declaration");
      }
      const std::string& name = decl.items[0].atom;
      if (!valid_identifier(name)) reader_.fail(decl, "syntax", "invalid predicate name '" + name + "'");
      if (domain_.find_predicate(name)) {
        reader_.fail(decl, "duplicate", "predicate '" + name + "' declared twice");
      }
      auto params = read_typed_list(reader_, decl.items, 1);
      for (const auto& p : params) {
        if (!is_variable(*p.node)) reader_.fail(*p.node, "syntax", "predicate arguments must be variables");
        check_type(*p.node, p.type);
      }
      domain_.predicates.push_back({name, params.size(), PredicateOrigin::base});
    }
  }

  void check_type(const SExpr& at, const std::string& type) const {
    if (type != "object" && !domain_.find_type(type)) {
      reader_.fail(at, "type", "unknown type '" + type + "'");
    }
  }

  void read_action(const SExpr& section) {
    if (section.items.size() < 2 || section.items[1].is_list) {
      reader_.fail(section, "syntax", "expected an action name");
    }
    ActionSchema schema;
    schema.name = section.items[1].atom;
    for (const auto& other : domain_.schemas) {
      if (other.name == schema.name) reader_.fail(section, "duplicate", "action '" + schema.name + "' declared twice");
    }
    const SExpr* params = nullptr;
    const SExpr* pre = nullptr;
    const SExpr* eff = nullptr;
    for (std::size_t i = 2; i < section.items.size(); i += 2) {
      const SExpr& key = section.items[i];
      if (key.is_list || i + 1 >= section.items.size()) {
        reader_.fail(key, "syntax", "expected :parameters, :precondition or :effect");
      }
      const SExpr& value = section.items[i + 1];
      if (key.atom == ":parameters") {
        params = &value;
      } else if (key.atom == ":precondition") {
        pre = &value;
      } else if (key.atom == ":effect") {
        eff = &value;
      } else {
        reader_.fail(key, "syntax", "unknown action keyword '" + key.atom + "'");
      }
    }

    std::vector<std::pair<std::size_t, std::string>> typed_params;
    if (params) {
      if (!params->is_list) reader_.fail(*params, "syntax", "expected a parameter list");
      for (const auto& p : read_typed_list(reader_, params->items, 0)) {
        if (!is_variable(*p.node)) reader_.fail(*p.node, "syntax", "parameters must be variables");
        std::string name = p.name.substr(1);
        if (std::find(schema.parameters.begin(), schema.parameters.end(), name) != schema.parameters.end()) {
          reader_.fail(*p.node, "duplicate", "parameter ?" + name + " declared twice");
        }
        check_type(*p.node, p.type);
        if (p.type != "object") typed_params.emplace_back(schema.parameters.size(), p.type);
        schema.parameters.push_back(std::move(name));
      }
    }

    for (const auto& [index, type] : typed_params) {
      schema.precondition.push_back({*domain_.find_predicate(type), {index}});
    }
    if (pre) read_precondition(*pre, schema);
    if (eff) read_effect(*eff, schema, false);

    dedupe(schema.precondition);
    dedupe(schema.add_effects);
    dedupe(schema.delete_effects);
    for (const auto& a : schema.add_effects) {
      if (std::find(schema.delete_effects.begin(), schema.delete_effects.end(), a) != schema.delete_effects.end()) {
        reader_.fail(section, "effect-conflict",
                     "action '" + schema.name + "' adds and deletes " + domain_.predicates[a.predicate].name);
      }
    }
    domain_.schemas.push_back(std::move(schema));
  }

  static void dedupe(std::vector<LiftedAtom>& atoms) {
    std::vector<LiftedAtom> out;
    for (auto& a : atoms) {
      if (std::find(out.begin(), out.end(), a) == out.end()) out.push_back(std::move(a));
    }
    atoms = std::move(out);
  }

  void read_precondition(const SExpr& f, ActionSchema& schema) {
    if (f.is_list && f.items.empty()) return;
    if (head_is(f, "and")) {
      for (std::size_t i = 1; i < f.items.size(); ++i) read_precondition(f.items[i], schema);
      return;
    }
    if (head_is(f, "not")) reader_.fail(f, "unsupported", "negative preconditions are not supported");
    if (head_is(f, "=")) reader_.fail(f, "unsupported", "equality preconditions are not supported");
    for (const char* kw : {"or", "imply", "forall", "exists", "when"}) {
      if (head_is(f, kw)) reader_.fail(f, "unsupported", std::string("'") + kw + "' is not supported in STRIPS");
    }
    schema.precondition.push_back(read_atom(f, schema));
  }

  void read_effect(const SExpr& f, ActionSchema& schema, bool negated) {
    if (f.is_list && f.items.empty()) return;
    if (head_is(f, "and") && !negated) {
      for (std::size_t i = 1; i < f.items.size(); ++i) read_effect(f.items[i], schema, false);
      return;
    }
    if (head_is(f, "not") && !negated) {
      if (f.items.size() != 2) reader_.fail(f, "syntax", "(not ...) takes one atom");
      read_effect(f.items[1], schema, true);
      return;
    }
    for (const char* kw : {"increase", "decrease", "assign"}) {
      if (head_is(f, kw)) reader_.fail(f, "unsupported", "action costs and numeric effects are not supported");
    }
    for (const char* kw : {"when", "forall"}) {
      if (head_is(f, kw)) reader_.fail(f, "unsupported", "conditional and quantified effects are not supported");
    }
    auto atom = read_atom(f, schema);
    (negated ? schema.delete_effects : schema.add_effects).push_back(std::move(atom));
  }

  LiftedAtom read_atom(const SExpr& f, const ActionSchema& schema) {
    if (!f.is_list || f.items.empty() || f.items[0].is_list) reader_.fail(f, "syntax", "expected an atom");
    const std::string& name = f.items[0].atom;
    auto pid = domain_.find_predicate(name);
    if (!pid) reader_.fail(f, "unknown-predicate", "unknown predicate '" + name + "'");
    const auto& sym = domain_.predicates[*pid];
    if (sym.arity != f.items.size() - 1) {
      reader_.fail(f, "arity", "predicate '" + name + "' expects " + std::to_string(sym.arity) +
                                   " arguments, got " + std::to_string(f.items.size() - 1));
    }
    LiftedAtom atom{*pid, {}};
    for (std::size_t i = 1; i < f.items.size(); ++i) {
      const SExpr& arg = f.items[i];
      if (arg.is_list) reader_.fail(arg, "syntax", "nested terms are not supported");
      if (!is_variable(arg)) reader_.fail(arg, "unsupported", "constant '" + arg.atom + "' in action schema");
      auto it = std::find(schema.parameters.begin(), schema.parameters.end(), arg.atom.substr(1));
      if (it == schema.parameters.end()) {
        reader_.fail(arg, "unbound-variable", "variable " + arg.atom + " is not a parameter of '" + schema.name + "'");
      }
      atom.params.push_back(static_cast<std::size_t>(it - schema.parameters.begin()));
    }
    return atom;
  }

  const Reader& reader_;
  Domain domain_;
};

class InstanceBuilder {
 public:
  InstanceBuilder(const Reader& reader, const Domain& domain) : reader_(reader), domain_(domain) {}

  Instance build(const SExpr& root) {
    if (!head_is(root, "define")) reader_.fail(root, "syntax", "expected (define ...)");
    if (root.items.size() < 2 || !head_is(root.items[1], "problem") ||
        root.items[1].items.size() != 2 || root.items[1].items[1].is_list) {
      reader_.fail(root, "syntax", "expected (problem <name>)");
    }
    instance_.name = root.items[1].items[1].atom;
    instance_.domain_name = domain_.name;
    bool seen_goal = false;
    for (std::size_t i = 2; i < root.items.size(); ++i) {
      const SExpr& section = root.items[i];
      if (!section.is_list || section.items.empty() || section.items[0].is_list) {
        reader_.fail(section, "syntax", "expected a problem section");
      }
      const std::string& key = section.items[0].atom;
      if (key == ":domain") {
        if (section.items.size() != 2 || section.items[1].is_list) reader_.fail(section, "syntax", "expected (:domain <name>)");
        if (section.items[1].atom != domain_.name) {
          reader_.fail(section.items[1], "domain-mismatch",
                       "problem is for domain '" + section.items[1].atom + "', not '" + domain_.name + "'");
        }
      } else if (key == ":requirements") {
        continue;
      } else if (key == ":objects") {
        read_objects(section);
      } else if (key == ":init") {
        for (std::size_t j = 1; j < section.items.size(); ++j) {
          const SExpr& a = section.items[j];
          if (head_is(a, "=")) reader_.fail(a, "unsupported", "numeric fluents are not supported");
          if (head_is(a, "not")) reader_.fail(a, "unsupported", "negated init atoms are not supported");
          instance_.init.push_back(read_atom(a));
        }
      } else if (key == ":goal") {
        if (section.items.size() != 2) reader_.fail(section, "syntax", "expected (:goal <formula>)");
        read_goal(section.items[1]);
        seen_goal = true;
      } else if (key == ":metric") {
        reader_.fail(section, "unsupported", "plan metrics are not supported");
      } else {
        reader_.fail(section, "syntax", "unknown problem section '" + key + "'");
      }
    }
    if (!seen_goal) reader_.fail(root, "syntax", "problem has no :goal");
    instance_.init.insert(instance_.init.end(), type_atoms_.begin(), type_atoms_.end());
    normalize_atoms(instance_.init);
    normalize_atoms(instance_.goal);
    return std::move(instance_);
  }

 private:
  void read_objects(const SExpr& section) {
    for (const auto& o : read_typed_list(reader_, section.items, 1)) {
      if (!valid_identifier(o.name)) reader_.fail(*o.node, "syntax", "invalid object name '" + o.name + "'");
      if (instance_.find_object(o.name)) reader_.fail(*o.node, "duplicate", "object '" + o.name + "' declared twice");
      auto id = static_cast<ObjectId>(instance_.objects.size());
      instance_.objects.push_back(o.name);
      std::string type = o.type;
      std::set<std::string> seen;
      while (type != "object") {
        if (!seen.insert(type).second) reader_.fail(*o.node, "type", "cyclic type hierarchy at '" + type + "'");
        auto pid = domain_.find_predicate(type);
        if (!pid || domain_.predicates[*pid].arity != 1) {
          reader_.fail(*o.node, "type", "unknown type '" + type + "'");
        }
        type_atoms_.push_back({*pid, {id}});
        const TypeDecl* decl = domain_.find_type(type);
        type = decl ? decl->parent : "object";
      }
    }
  }

  void read_goal(const SExpr& f) {
    if (f.is_list && f.items.empty()) return;
    if (head_is(f, "and")) {
      for (std::size_t i = 1; i < f.items.size(); ++i) read_goal(f.items[i]);
      return;
    }
    if (head_is(f, "not")) reader_.fail(f, "unsupported", "negative goals are not supported");
    for (const char* kw : {"or", "imply", "forall", "exists", "="}) {
      if (head_is(f, kw)) reader_.fail(f, "unsupported", std::string("'") + kw + "' is not supported in STRIPS goals");
    }
    instance_.goal.push_back(read_atom(f));
  }

  GroundAtom read_atom(const SExpr& f) {
    if (!f.is_list || f.items.empty() || f.items[0].is_list) reader_.fail(f, "syntax", "expected a ground atom");
    const std::string& name = f.items[0].atom;
    auto pid = domain_.find_predicate(name);
    if (!pid) reader_.fail(f, "unknown-predicate", "unknown predicate '" + name + "'");
    const auto& sym = domain_.predicates[*pid];
    if (sym.arity != f.items.size() - 1) {
      reader_.fail(f, "arity", "predicate '" + name + "' expects " + std::to_string(sym.arity) +
                                   " arguments, got " + std::to_string(f.items.size() - 1));
    }
    GroundAtom atom{*pid, {}};
    for (std::size_t i = 1; i < f.items.size(); ++i) {
      const SExpr& arg = f.items[i];
      if (arg.is_list || is_variable(arg)) reader_.fail(arg, "syntax", "expected an object name");
      auto oid = instance_.find_object(arg.atom);
      if (!oid) reader_.fail(arg, "unknown-object", "object '" + arg.atom + "' is not declared in :objects");
      atom.args.push_back(*oid);
    }
    return atom;
  }

  const Reader& reader_;
  const Domain& domain_;
  Instance instance_;
  std::vector<GroundAtom> type_atoms_;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    Diagnostic d;
    d.file = path;
    d.category = "io";
    d.message = "cannot open file";
    throw PddlError(std::move(d));
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string lifted_to_string(const Domain& domain, const ActionSchema& schema, const LiftedAtom& atom) {
  std::string out = "(" + domain.predicates.at(atom.predicate).name;
  for (auto p : atom.params) out += " ?" + schema.parameters.at(p);
  return out + ")";
}

}  // namespace

Domain parse_domain(std::string_view text, std::string_view file) {
  Reader reader(text, file);
  SExpr root = reader.read_document();
  DomainBuilder builder(reader);
  return builder.build(root);
}

Instance parse_instance(std::string_view text, const Domain& domain, std::string_view file) {
  Reader reader(text, file);
  SExpr root = reader.read_document();
  InstanceBuilder builder(reader, domain);
  return builder.build(root);
}

Domain load_domain(const std::string& path) { return parse_domain(read_file(path), path); }

Instance load_instance(const std::string& path, const Domain& domain) {
  return parse_instance(read_file(path), domain, path);
}

namespace {

Diagnostic finding(std::string category, std::string message, std::string location) {
  Diagnostic d;
  d.category = std::move(category);
  d.message = std::move(message);
  d.location = std::move(location);
  return d;
}

void check_lifted(const Domain& domain, const ActionSchema& schema, const std::vector<LiftedAtom>& atoms,
                  const std::string& part, std::vector<Diagnostic>& out) {
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const auto& atom = atoms[i];
    std::string where = "schema " + schema.name + ", " + part + "[" + std::to_string(i) + "]";
    if (atom.predicate >= domain.predicates.size()) {
      out.push_back(finding("unknown-predicate", "predicate id " + std::to_string(atom.predicate) + " is not declared", where));
      continue;
    }
    const auto& sym = domain.predicates[atom.predicate];
    if (sym.arity != atom.params.size()) {
      out.push_back(finding("arity", "predicate '" + sym.name + "' expects " + std::to_string(sym.arity) +
                                         " arguments, got " + std::to_string(atom.params.size()), where));
    }
    for (auto p : atom.params) {
      if (p >= schema.parameters.size()) {
        out.push_back(finding("unbound-variable", "argument index " + std::to_string(p) + " is not a parameter", where));
      }
    }
  }
}

void check_ground(const Domain& domain, const Instance& instance, const std::vector<GroundAtom>& atoms,
                  const std::string& part, std::vector<Diagnostic>& out) {
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const auto& atom = atoms[i];
    std::string where = part + "[" + std::to_string(i) + "]";
    if (atom.predicate >= domain.predicates.size()) {
      out.push_back(finding("unknown-predicate", "predicate id " + std::to_string(atom.predicate) + " is not declared", where));
      continue;
    }
    const auto& sym = domain.predicates[atom.predicate];
    if (sym.arity != atom.args.size()) {
      out.push_back(finding("arity", "predicate '" + sym.name + "' expects " + std::to_string(sym.arity) +
                                         " arguments, got " + std::to_string(atom.args.size()), where));
    }
    for (auto o : atom.args) {
      if (o >= instance.objects.size()) {
        out.push_back(finding("unknown-object", "object id " + std::to_string(o) + " is not in the universe", where));
      }
    }
  }
}

}  // namespace

std::vector<Diagnostic> validate(const Domain& domain) {
  std::vector<Diagnostic> out;
  for (std::size_t i = 0; i < domain.predicates.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (domain.predicates[i].name == domain.predicates[j].name) {
        out.push_back(finding("duplicate", "predicate '" + domain.predicates[i].name + "' declared twice",
                              "predicate[" + std::to_string(i) + "]"));
      }
    }
  }
  for (const auto& schema : domain.schemas) {
    check_lifted(domain, schema, schema.precondition, "precondition", out);
    check_lifted(domain, schema, schema.add_effects, "add", out);
    check_lifted(domain, schema, schema.delete_effects, "delete", out);
    for (const auto& a : schema.add_effects) {
      if (std::find(schema.delete_effects.begin(), schema.delete_effects.end(), a) != schema.delete_effects.end()) {
        out.push_back(finding("effect-conflict", "atom is both added and deleted", "schema " + schema.name));
      }
    }
  }
  return out;
}

std::vector<Diagnostic> validate(const Domain& domain, const Instance& instance) {
  std::vector<Diagnostic> out = validate(domain);
  if (!instance.domain_name.empty() && instance.domain_name != domain.name) {
    out.push_back(finding("domain-mismatch", "instance is for domain '" + instance.domain_name + "'", "instance"));
  }
  for (std::size_t i = 0; i < instance.objects.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (instance.objects[i] == instance.objects[j]) {
        out.push_back(finding("duplicate", "object '" + instance.objects[i] + "' declared twice",
                              "objects[" + std::to_string(i) + "]"));
      }
    }
  }
  check_ground(domain, instance, instance.init, "init", out);
  check_ground(domain, instance, instance.goal, "goal", out);
  return out;
}

std::string to_pddl(const Domain& domain) {
  std::ostringstream out;
  out << "(define (domain " << domain.name << ")\n";
  out << "  (:requirements :strips" << (domain.types.empty() ? "" : " :typing") << ")\n";
  if (!domain.types.empty()) {
    out << "  (:types";
    for (const auto& t : domain.types) out << ' ' << t.name << " - " << t.parent;
    out << ")\n";
  }
  out << "  (:predicates";
  for (const auto& p : domain.predicates) {
    if (domain.find_type(p.name)) continue;
    out << "\n    (" << p.name;
    for (std::size_t i = 0; i < p.arity; ++i) out << " ?x" << i;
    out << ')';
  }
  out << ")\n";
  for (const auto& schema : domain.schemas) {
    out << "  (:action " << schema.name << "\n    :parameters (";
    for (std::size_t i = 0; i < schema.parameters.size(); ++i) {
      out << (i ? " ?" : "?") << schema.parameters[i];
    }
    out << ")\n    :precondition (and";
    for (const auto& a : schema.precondition) out << ' ' << lifted_to_string(domain, schema, a);
    out << ")\n    :effect (and";
    for (const auto& a : schema.add_effects) out << ' ' << lifted_to_string(domain, schema, a);
    for (const auto& a : schema.delete_effects) out << " (not " << lifted_to_string(domain, schema, a) << ')';
    out << "))\n";
  }
  out << ")\n";
  return out.str();
}

std::string to_pddl(const Domain& domain, const Instance& instance) {
  auto atom_sexpr = [&](const GroundAtom& a) {
    std::string s = "(" + domain.predicates.at(a.predicate).name;
    for (auto o : a.args) s += " " + instance.objects.at(o);
    return s + ")";
  };
  std::ostringstream out;
  out << "(define (problem " << instance.name << ")\n  (:domain " << domain.name << ")\n  (:objects";
  for (const auto& o : instance.objects) out << ' ' << o;
  out << ")\n  (:init";
  for (const auto& a : instance.init) out << "\n    " << atom_sexpr(a);
  out << ")\n  (:goal (and";
  for (const auto& a : instance.goal) out << "\n    " << atom_sexpr(a);
  out << ")))\n";
  return out.str();
}

std::string format_atom(const Domain& domain, const Instance& instance, const GroundAtom& atom) {
  std::string s = domain.predicates.at(atom.predicate).name + "(";
  for (std::size_t i = 0; i < atom.args.size(); ++i) {
    if (i) s += ",";
    s += instance.objects.at(atom.args[i]);
  }
  return s + ")";
}

}  // namespace gnnplan
