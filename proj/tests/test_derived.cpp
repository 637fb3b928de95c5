#include "doctest.h"
#include "support.hpp"

#include <random>
#include <set>

#include "gnnplan/derived.hpp"

using namespace gnnplan;

namespace {

Domain relations() {
  return parse_domain(R"((define (domain rel) (:predicates (r ?x ?y) (s ?x ?y) (t ?x ?y) (u ?x))))");
}

using Pairs = std::set<std::pair<ObjectId, ObjectId>>;

Pairs pairs_of(const State& s, PredicateId p) {
  Pairs out;
  for (const auto& a : s.atoms()) {
    if (a.predicate == p) out.emplace(a.args[0], a.args[1]);
  }
  return out;
}

// Warshall over a boolean matrix.
Pairs closure_oracle(const Pairs& edges, std::size_t n) {
  std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
  for (auto [x, y] : edges) reach[x][y] = true;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (reach[i][k] && reach[k][j]) reach[i][j] = true;
  Pairs out;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (reach[i][j]) out.emplace(i, j);
  return out;
}

Pairs join_oracle(const Pairs& a, const Pairs& b) {
  Pairs out;
  for (auto [x, y] : a)
    for (auto [y2, z] : b)
      if (y == y2) out.emplace(x, z);
  return out;
}

}  // namespace

TEST_CASE("closure of a two-step chain") {
  Domain d = augment_domain(parse_domain(bench::domain_pddl("blocks")), augmentation_preset("blocks-above"));
  const auto on = *d.find_predicate("on"), above = *d.find_predicate("above");
  State s({{on, {0, 1}}, {on, {1, 2}}});
  State c = transitive_closure(d, s, on, above);
  CHECK(pairs_of(c, above) == Pairs{{0, 1}, {1, 2}, {0, 2}});
  CHECK(transitive_closure(d, c, on, above) == c);
  CHECK(pairs_of(transitive_closure(d, State{}, on, above), above).empty());
  CHECK_THROWS_AS(transitive_closure(d, s, *d.find_predicate("clear"), above), std::invalid_argument);
}

TEST_CASE("spanner link closure counts locations to the right") {
  auto task = testing::bench_task("spanner", bench::spanner_instance(4, 1, 1, 0));
  Augmenter aug(task.domain(), augmentation_preset("spanner-linkplus"));
  State s = aug.augment(task.initial_state(), task.instance());
  const auto& d = aug.domain();
  const auto link = *d.find_predicate("link"), plus = *d.find_predicate("link+");
  // shed, location1..4, gate: 6 locations on a chain
  CHECK(pairs_of(s, plus).size() == 15);
  const auto& inst = task.instance();
  std::vector<std::string> chain{"shed", "location1", "location2", "location3", "location4", "gate"};
  for (std::size_t i = 0; i < chain.size(); ++i) {
    const ObjectId c = *inst.find_object(chain[i]);
    std::size_t right = 0;
    for (auto [x, y] : pairs_of(s, plus)) right += x == c;
    // BFS distance to the gate along link
    std::size_t dist = 0;
    ObjectId at = c;
    while (at != *inst.find_object("gate")) {
      for (auto [x, y] : pairs_of(s, link)) {
        if (x == at) {
          at = y;
          break;
        }
      }
      ++dist;
    }
    CHECK(right == dist);
  }
}

TEST_CASE("closure over an n-chain adds n(n-1)/2 atoms") {
  Domain d = augment_domain(relations(), AugmentationSpec{{{"r", "r+"}}, {}, false});
  for (ObjectId n = 1; n <= 12; ++n) {
    std::vector<GroundAtom> atoms;
    for (ObjectId i = 0; i + 1 < n; ++i) atoms.push_back({0, {i, i + 1}});
    State s(atoms);
    State c = transitive_closure(d, s, 0, *d.find_predicate("r+"));
    CHECK(c.size() - s.size() == n * (n - 1) / 2);
  }
}

TEST_CASE("composition") {
  Domain base = parse_domain(bench::domain_pddl("logistics"));
  Domain d = augment_domain(base, AugmentationSpec{{}, {{{"in", "at"}, "in-o-at"}}, false});
  const auto in = *d.find_predicate("in"), at = *d.find_predicate("at"), r = *d.find_predicate("in-o-at");
  std::vector<PredicateId> chain{in, at};
  State s({{in, {0, 1}}, {at, {1, 3}}});
  CHECK(pairs_of(compose_roles(d, s, chain, r), r) == Pairs{{0, 3}});
  State disjoint({{in, {0, 1}}, {at, {2, 3}}});
  CHECK(pairs_of(compose_roles(d, disjoint, chain, r), r).empty());
  std::vector<PredicateId> short_chain{in};
  CHECK_THROWS_AS(compose_roles(d, s, short_chain, r), std::invalid_argument);
}

TEST_CASE("logistics preset") {
  Domain base = parse_domain(bench::domain_pddl("logistics"));
  auto spec = augmentation_preset("logistics-4comp");
  std::vector<std::string> names;
  for (const auto& c : spec.compositions) names.push_back(c.derived);
  CHECK(names == std::vector<std::string>{"at-o-in-city", "at@-o-in-city", "in-o-at", "in-o-at-o-in-city"});
  CHECK(spec.closures.empty());

  Domain d = augment_domain(base, spec);
  CHECK(d.predicates.size() == 2 * base.predicates.size() + 4);
  for (const char* p : {"at@", "in@", "in-city@"}) {
    auto id = d.find_predicate(p);
    REQUIRE(id);
    CHECK(d.predicate(*id).origin == PredicateOrigin::goal_version);
  }
  CHECK(d.schemas == base.schemas);

  // a package in a truck standing in city c1 is located in c1
  auto task = testing::bench_task("logistics", bench::logistics_instance(2, 2, 2, 1, 11));
  Augmenter aug(base, spec);
  const auto& inst = task.instance();
  State s = aug.augment(task.initial_state(), inst);
  const auto at = *d.find_predicate("at"), in_city = *d.find_predicate("in-city");
  const auto at_city = *d.find_predicate("at-o-in-city");
  CHECK(pairs_of(s, at_city) == join_oracle(pairs_of(s, at), pairs_of(s, in_city)));
  CHECK(pairs_of(s, *d.find_predicate("at@-o-in-city")) ==
        join_oracle(pairs_of(s, *d.find_predicate("at@")), pairs_of(s, in_city)));
}

TEST_CASE("goal versions") {
  Domain base = parse_domain(bench::domain_pddl("blocks"));
  Domain d = augment_domain(base, augmentation_preset("goal-versions"));
  CHECK(d.predicates.size() == 10);

  Instance inst = parse_instance(R"((define (problem p) (:domain blocks) (:objects a b)
    (:init (ontable a) (ontable b) (clear a) (clear b) (handempty)) (:goal (on a b))))", base);
  State s(inst.init);
  State g = add_goal_versions(d, s, inst);
  CHECK(g.size() == s.size() + 1);
  CHECK(g.contains({*d.find_predicate("on@"), {0, 1}}));
  CHECK(add_goal_versions(d, g, inst) == g);

  Instance no_goal = inst;
  no_goal.goal.clear();
  CHECK(add_goal_versions(d, s, no_goal) == s);
}

TEST_CASE("augment_domain errors") {
  Domain base = relations();
  CHECK_THROWS_AS(augment_domain(base, AugmentationSpec{{{"missing", "m+"}}, {}, false}), std::invalid_argument);
  CHECK_THROWS_AS(augment_domain(base, AugmentationSpec{{{"u", "u+"}}, {}, false}), std::invalid_argument);
  CHECK_THROWS_AS(augment_domain(base, AugmentationSpec{{{"r", "s"}}, {}, false}), std::invalid_argument);
  CHECK_THROWS_AS(augment_domain(base, AugmentationSpec{{}, {{{"r"}, "rr"}}, false}), std::invalid_argument);
  CHECK_THROWS_AS(augmentation_preset("nope"), std::invalid_argument);
  CHECK(augment_domain(base, AugmentationSpec{{{"r", "r+"}}, {}, false}).predicates.size() == base.predicates.size() + 1);
}

TEST_CASE("augmentation is idempotent and monotone on random states") {
  Domain base = relations();
  AugmentationSpec spec{{{"r", "r+"}}, {{{"r", "s"}, "r-o-s"}, {{"s", "t", "r"}, "s-o-t-o-r"}}, true};
  Augmenter aug(base, spec);
  Instance inst{"p", "rel", {"a", "b", "c", "d", "e"}, {}, {{0, {0, 1}}, {3, {2}}}};
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<GroundAtom> atoms;
    for (int k = 0; k < 8; ++k) {
      PredicateId p = rng() % 3;
      atoms.push_back({p, {static_cast<ObjectId>(rng() % 5), static_cast<ObjectId>(rng() % 5)}});
    }
    State s(atoms);
    State once = aug.augment(s, inst);
    CHECK(aug.augment(once, inst) == once);
    for (const auto& a : s.atoms()) CHECK(once.contains(a));
  }
}

TEST_CASE("closure and composition match path and join oracles on random relations") {
  Domain base = relations();
  Domain d = augment_domain(base, AugmentationSpec{{{"r", "r+"}}, {{{"r", "s", "t"}, "rst"}}, false});
  const auto plus = *d.find_predicate("r+"), rst = *d.find_predicate("rst");
  std::vector<PredicateId> chain{0, 1, 2};
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    const ObjectId n = 1 + rng() % 12;
    std::vector<GroundAtom> atoms;
    const int edges = static_cast<int>(rng() % (2 * n + 1));
    for (PredicateId p = 0; p < 3; ++p) {
      for (int k = 0; k < edges; ++k) atoms.push_back({p, {static_cast<ObjectId>(rng() % n), static_cast<ObjectId>(rng() % n)}});
    }
    State s(atoms);
    CHECK(pairs_of(transitive_closure(d, s, 0, plus), plus) == closure_oracle(pairs_of(s, 0), n));
    CHECK(pairs_of(compose_roles(d, s, chain, rst), rst) ==
          join_oracle(join_oracle(pairs_of(s, 0), pairs_of(s, 1)), pairs_of(s, 2)));
  }
}

TEST_CASE("closure is irreflexive unless a cycle exists") {
  Domain d = augment_domain(relations(), AugmentationSpec{{{"r", "r+"}}, {}, false});
  const auto plus = *d.find_predicate("r+");
  State acyclic({{0, {0, 1}}, {0, {1, 2}}});
  for (auto [x, y] : pairs_of(transitive_closure(d, acyclic, 0, plus), plus)) CHECK(x != y);
  State cyclic({{0, {0, 1}}, {0, {1, 0}}});
  CHECK(pairs_of(transitive_closure(d, cyclic, 0, plus), plus).count({0, 0}) == 1);
}
