#pragma once

#include <string>

#include "gnnplan/benchmarks.hpp"
#include "gnnplan/grounding.hpp"
#include "gnnplan/pddl.hpp"

namespace testing {

// Untyped IPC Gripper with the room/ball/gripper unary predicates.
inline const char* kGripperUntyped = R"(
(define (domain gripper-strips)
  (:requirements :strips)
  (:predicates (room ?r) (ball ?b) (gripper ?g) (at-robby ?r) (at ?b ?r) (free ?g) (carry ?o ?g))
  (:action move
    :parameters (?from ?to)
    :precondition (and (room ?from) (room ?to) (at-robby ?from))
    :effect (and (at-robby ?to) (not (at-robby ?from))))
  (:action pick
    :parameters (?obj ?room ?gripper)
    :precondition (and (ball ?obj) (room ?room) (gripper ?gripper) (at ?obj ?room) (at-robby ?room) (free ?gripper))
    :effect (and (carry ?obj ?gripper) (not (at ?obj ?room)) (not (free ?gripper))))
  (:action drop
    :parameters (?obj ?room ?gripper)
    :precondition (and (ball ?obj) (room ?room) (gripper ?gripper) (carry ?obj ?gripper) (at-robby ?room))
    :effect (and (at ?obj ?room) (free ?gripper) (not (carry ?obj ?gripper)))))
)";

inline const char* kGripperOneBall = R"(
(define (problem gripper-1)
  (:domain gripper-strips)
  (:objects roomA roomB ball1 left)
  (:init (room roomA) (room roomB) (ball ball1) (gripper left)
         (at-robby roomA) (at ball1 roomA) (free left))
  (:goal (and (at ball1 roomB))))
)";

inline gnnplan::GroundTask gripper_one_ball() {
  auto d = gnnplan::parse_domain(kGripperUntyped);
  auto i = gnnplan::parse_instance(kGripperOneBall, d);
  return gnnplan::GroundTask(d, i);
}

inline gnnplan::GroundTask bench_task(const std::string& domain, const std::string& problem) {
  auto d = gnnplan::parse_domain(gnnplan::bench::domain_pddl(domain), domain + ".pddl");
  auto i = gnnplan::parse_instance(problem, d);
  return gnnplan::GroundTask(d, i);
}

inline gnnplan::GroundAtom atom(const gnnplan::Domain& d, const gnnplan::Instance& inst, const std::string& p,
                                std::initializer_list<const char*> args) {
  gnnplan::GroundAtom a{*d.find_predicate(p), {}};
  for (auto o : args) a.args.push_back(*inst.find_object(o));
  return a;
}

}  // namespace testing
