#include "gnnplan/benchmarks.hpp"

#include <algorithm>
#include <random>
#include <sstream>
#include <stdexcept>

namespace gnnplan::bench {

namespace {

constexpr const char* kGripper = R"((define (domain gripper)
  (:requirements :strips :typing)
  (:types room ball gripper)
  (:predicates (at-robby ?r - room)
               (at ?b - ball ?r - room)
               (free ?g - gripper)
               (carry ?b - ball ?g - gripper))
  (:action move
    :parameters (?from ?to - room)
    :precondition (at-robby ?from)
    :effect (and (at-robby ?to) (not (at-robby ?from))))
  (:action pick
    :parameters (?obj - ball ?room - room ?gripper - gripper)
    :precondition (and (at ?obj ?room) (at-robby ?room) (free ?gripper))
    :effect (and (carry ?obj ?gripper) (not (at ?obj ?room)) (not (free ?gripper))))
  (:action drop
    :parameters (?obj - ball ?room - room ?gripper - gripper)
    :precondition (and (carry ?obj ?gripper) (at-robby ?room))
    :effect (and (at ?obj ?room) (free ?gripper) (not (carry ?obj ?gripper)))))
)";

constexpr const char* kBlocks = R"((define (domain blocks)
  (:requirements :strips)
  (:predicates (on ?x ?y) (ontable ?x) (clear ?x) (handempty) (holding ?x))
  (:action pick-up
    :parameters (?x)
    :precondition (and (clear ?x) (ontable ?x) (handempty))
    :effect (and (holding ?x) (not (ontable ?x)) (not (clear ?x)) (not (handempty))))
  (:action put-down
    :parameters (?x)
    :precondition (holding ?x)
    :effect (and (ontable ?x) (clear ?x) (handempty) (not (holding ?x))))
  (:action stack
    :parameters (?x ?y)
    :precondition (and (holding ?x) (clear ?y))
    :effect (and (on ?x ?y) (clear ?x) (handempty) (not (holding ?x)) (not (clear ?y))))
  (:action unstack
    :parameters (?x ?y)
    :precondition (and (on ?x ?y) (clear ?x) (handempty))
    :effect (and (holding ?x) (clear ?y) (not (on ?x ?y)) (not (clear ?x)) (not (handempty)))))
)";

constexpr const char* kDelivery = R"((define (domain delivery)
  (:requirements :strips :typing)
  (:types cell locatable - object package truck - locatable)
  (:predicates (at ?x - locatable ?c - cell)
               (adjacent ?c1 ?c2 - cell)
               (carrying ?t - truck ?p - package)
               (empty ?t - truck))
  (:action move
    :parameters (?t - truck ?from ?to - cell)
    :precondition (and (adjacent ?from ?to) (at ?t ?from))
    :effect (and (at ?t ?to) (not (at ?t ?from))))
  (:action pick-package
    :parameters (?t - truck ?p - package ?c - cell)
    :precondition (and (at ?t ?c) (at ?p ?c) (empty ?t))
    :effect (and (carrying ?t ?p) (not (empty ?t)) (not (at ?p ?c))))
  (:action drop-package
    :parameters (?t - truck ?p - package ?c - cell)
    :precondition (and (at ?t ?c) (carrying ?t ?p))
    :effect (and (at ?p ?c) (empty ?t) (not (carrying ?t ?p)))))
)";

constexpr const char* kSpanner = R"((define (domain spanner)
  (:requirements :strips :typing)
  (:types location locatable - object man nut spanner - locatable)
  (:predicates (at ?m - locatable ?l - location)
               (carrying ?m - man ?s - spanner)
               (useable ?s - spanner)
               (link ?l1 - location ?l2 - location)
               (tightened ?n - nut)
               (loose ?n - nut))
  (:action walk
    :parameters (?start ?end - location ?m - man)
    :precondition (and (at ?m ?start) (link ?start ?end))
    :effect (and (at ?m ?end) (not (at ?m ?start))))
  (:action walk-back
    :parameters (?start ?end - location ?m - man)
    :precondition (and (at ?m ?start) (link ?end ?start))
    :effect (and (at ?m ?end) (not (at ?m ?start))))
  (:action pickup-spanner
    :parameters (?l - location ?s - spanner ?m - man)
    :precondition (and (at ?m ?l) (at ?s ?l))
    :effect (and (carrying ?m ?s) (not (at ?s ?l))))
  (:action tighten-nut
    :parameters (?l - location ?s - spanner ?m - man ?n - nut)
    :precondition (and (at ?m ?l) (at ?n ?l) (carrying ?m ?s) (useable ?s) (loose ?n))
    :effect (and (tightened ?n) (not (loose ?n)) (not (useable ?s)))))
)";

constexpr const char* kLogistics = R"((define (domain logistics)
  (:requirements :strips :typing)
  (:types truck airplane - vehicle
          package vehicle - physobj
          airport location - place
          city place physobj - object)
  (:predicates (in-city ?loc - place ?city - city)
               (at ?obj - physobj ?loc - place)
               (in ?pkg - package ?veh - vehicle))
  (:action load-truck
    :parameters (?pkg - package ?truck - truck ?loc - place)
    :precondition (and (at ?truck ?loc) (at ?pkg ?loc))
    :effect (and (not (at ?pkg ?loc)) (in ?pkg ?truck)))
  (:action load-airplane
    :parameters (?pkg - package ?airplane - airplane ?loc - place)
    :precondition (and (at ?pkg ?loc) (at ?airplane ?loc))
    :effect (and (not (at ?pkg ?loc)) (in ?pkg ?airplane)))
  (:action unload-truck
    :parameters (?pkg - package ?truck - truck ?loc - place)
    :precondition (and (at ?truck ?loc) (in ?pkg ?truck))
    :effect (and (not (in ?pkg ?truck)) (at ?pkg ?loc)))
  (:action unload-airplane
    :parameters (?pkg - package ?airplane - airplane ?loc - place)
    :precondition (and (in ?pkg ?airplane) (at ?airplane ?loc))
    :effect (and (not (in ?pkg ?airplane)) (at ?pkg ?loc)))
  (:action drive-truck
    :parameters (?truck - truck ?loc-from - place ?loc-to - place ?city - city)
    :precondition (and (at ?truck ?loc-from) (in-city ?loc-from ?city) (in-city ?loc-to ?city))
    :effect (and (not (at ?truck ?loc-from)) (at ?truck ?loc-to)))
  (:action fly-airplane
    :parameters (?airplane - airplane ?loc-from - airport ?loc-to - airport)
    :precondition (at ?airplane ?loc-from)
    :effect (and (not (at ?airplane ?loc-from)) (at ?airplane ?loc-to))))
)";

std::string numbered(std::string_view prefix, std::size_t i) { return std::string(prefix) + std::to_string(i); }

// Random tower configuration: below[b] is the block under b, or -1 for the table.
std::vector<int> random_towers(std::size_t n, std::mt19937_64& rng) {
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<int> below(n, -1);
  std::vector<std::size_t> tops;
  for (auto b : order) {
    std::uniform_int_distribution<std::size_t> pick(0, tops.size());
    const std::size_t slot = pick(rng);
    if (slot == tops.size()) {
      tops.push_back(b);
    } else {
      below[b] = static_cast<int>(tops[slot]);
      tops[slot] = b;
    }
  }
  return below;
}

}  // namespace

std::vector<std::string> domain_names() { return {"gripper", "blocks", "delivery", "spanner", "logistics"}; }

std::string domain_pddl(std::string_view name) {
  if (name == "gripper") return kGripper;
  if (name == "blocks") return kBlocks;
  if (name == "delivery") return kDelivery;
  if (name == "spanner") return kSpanner;
  if (name == "logistics") return kLogistics;
  throw std::invalid_argument("unknown benchmark domain '" + std::string(name) + "'");
}

std::string gripper_instance(std::size_t balls, bool robot_in_roomb, std::size_t grippers) {
  if (grippers == 0) throw std::invalid_argument("gripper instances need at least one gripper");
  auto hand = [](std::size_t i) { return i == 0 ? std::string("left") : i == 1 ? std::string("right") : numbered("hand", i + 1); };
  std::ostringstream out;
  out << "(define (problem gripper-" << balls << (grippers != 2 ? "-h" + std::to_string(grippers) : "")
      << (robot_in_roomb ? "-b" : "") << ")\n  (:domain gripper)\n  (:objects rooma roomb - room";
  for (std::size_t i = 0; i < grippers; ++i) out << ' ' << hand(i);
  out << " - gripper";
  for (std::size_t i = 1; i <= balls; ++i) out << ' ' << numbered("ball", i);
  out << (balls > 0 ? " - ball" : "") << ")\n  (:init (at-robby " << (robot_in_roomb ? "roomb" : "rooma") << ")";
  for (std::size_t i = 0; i < grippers; ++i) out << " (free " << hand(i) << ')';
  for (std::size_t i = 1; i <= balls; ++i) out << " (at " << numbered("ball", i) << " rooma)";
  out << ")\n  (:goal (and";
  for (std::size_t i = 1; i <= balls; ++i) out << " (at " << numbered("ball", i) << " roomb)";
  out << ")))\n";
  return out.str();
}

std::string blocks_instance(std::size_t blocks, std::uint64_t seed) {
  if (blocks < 2) throw std::invalid_argument("blocks instances need at least two blocks");
  std::mt19937_64 rng(seed);
  std::vector<int> init, goal;
  do {
    init = random_towers(blocks, rng);
    goal = random_towers(blocks, rng);
  } while (init == goal);
  auto name = [](int b) { return numbered("b", static_cast<std::size_t>(b) + 1); };
  std::ostringstream out;
  out << "(define (problem blocks-" << blocks << '-' << seed << ")\n  (:domain blocks)\n  (:objects";
  for (std::size_t b = 0; b < blocks; ++b) out << ' ' << name(static_cast<int>(b));
  out << ")\n  (:init (handempty)";
  std::vector<bool> covered(blocks, false);
  for (std::size_t b = 0; b < blocks; ++b) {
    if (init[b] < 0) {
      out << " (ontable " << name(static_cast<int>(b)) << ')';
    } else {
      out << " (on " << name(static_cast<int>(b)) << ' ' << name(init[b]) << ')';
      covered[static_cast<std::size_t>(init[b])] = true;
    }
  }
  for (std::size_t b = 0; b < blocks; ++b) {
    if (!covered[b]) out << " (clear " << name(static_cast<int>(b)) << ')';
  }
  out << ")\n  (:goal (and";
  const bool flat = std::all_of(goal.begin(), goal.end(), [](int b) { return b < 0; });
  for (std::size_t b = 0; b < blocks; ++b) {
    if (flat) {
      out << " (ontable " << name(static_cast<int>(b)) << ')';
    } else if (goal[b] >= 0) {
      out << " (on " << name(static_cast<int>(b)) << ' ' << name(goal[b]) << ')';
    }
  }
  out << ")))\n";
  return out.str();
}

std::string delivery_instance(std::size_t side, std::size_t packages, std::uint64_t seed) {
  if (side == 0) throw std::invalid_argument("delivery grid needs at least one cell");
  std::mt19937_64 rng(seed);
  const std::size_t cells = side * side;
  std::uniform_int_distribution<std::size_t> cell(0, cells - 1);
  auto name = [side](std::size_t c) { return "c" + std::to_string(c / side) + "-" + std::to_string(c % side); };
  const std::size_t target = cell(rng);
  const std::size_t truck = cell(rng);
  std::vector<std::size_t> start(packages);
  for (auto& s : start) {
    do s = cell(rng);
    while (cells > 1 && s == target);
  }
  std::ostringstream out;
  out << "(define (problem delivery-" << side << '-' << packages << '-' << seed << ")\n  (:domain delivery)\n  (:objects";
  for (std::size_t c = 0; c < cells; ++c) out << ' ' << name(c);
  out << " - cell";
  for (std::size_t p = 1; p <= packages; ++p) out << ' ' << numbered("p", p);
  out << (packages > 0 ? " - package" : "") << " t1 - truck)\n  (:init (empty t1) (at t1 " << name(truck) << ')';
  for (std::size_t p = 0; p < packages; ++p) out << " (at " << numbered("p", p + 1) << ' ' << name(start[p]) << ')';
  for (std::size_t c = 0; c < cells; ++c) {
    const std::size_t r = c / side, col = c % side;
    if (r > 0) out << " (adjacent " << name(c) << ' ' << name(c - side) << ')';
    if (r + 1 < side) out << " (adjacent " << name(c) << ' ' << name(c + side) << ')';
    if (col > 0) out << " (adjacent " << name(c) << ' ' << name(c - 1) << ')';
    if (col + 1 < side) out << " (adjacent " << name(c) << ' ' << name(c + 1) << ')';
  }
  out << ")\n  (:goal (and";
  for (std::size_t p = 1; p <= packages; ++p) out << " (at " << numbered("p", p) << ' ' << name(target) << ')';
  out << ")))\n";
  return out.str();
}

std::string spanner_instance(std::size_t locations, std::size_t spanners, std::size_t nuts, std::uint64_t seed) {
  if (locations == 0) throw std::invalid_argument("spanner instances need at least one chain location");
  if (nuts > spanners) throw std::invalid_argument("spanner instances need at least as many spanners as nuts");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> where(1, locations);
  std::ostringstream out;
  out << "(define (problem spanner-" << locations << '-' << spanners << '-' << nuts << '-' << seed
      << ")\n  (:domain spanner)\n  (:objects bob - man";
  for (std::size_t s = 1; s <= spanners; ++s) out << ' ' << numbered("spanner", s);
  out << (spanners > 0 ? " - spanner" : "");
  for (std::size_t n = 1; n <= nuts; ++n) out << ' ' << numbered("nut", n);
  out << (nuts > 0 ? " - nut" : "") << " shed";
  for (std::size_t l = 1; l <= locations; ++l) out << ' ' << numbered("location", l);
  out << " gate - location)\n  (:init (at bob shed)";
  for (std::size_t s = 1; s <= spanners; ++s) {
    out << " (at " << numbered("spanner", s) << ' ' << numbered("location", where(rng)) << ") (useable "
        << numbered("spanner", s) << ')';
  }
  for (std::size_t n = 1; n <= nuts; ++n) out << " (loose " << numbered("nut", n) << ") (at " << numbered("nut", n) << " gate)";
  out << " (link shed location1)";
  for (std::size_t l = 1; l < locations; ++l) out << " (link " << numbered("location", l) << ' ' << numbered("location", l + 1) << ')';
  out << " (link " << numbered("location", locations) << " gate))\n  (:goal (and";
  for (std::size_t n = 1; n <= nuts; ++n) out << " (tightened " << numbered("nut", n) << ')';
  out << ")))\n";
  return out.str();
}

std::string logistics_instance(std::size_t cities, std::size_t locations, std::size_t packages, std::size_t airplanes,
                               std::uint64_t seed) {
  if (cities == 0 || locations == 0) throw std::invalid_argument("logistics needs at least one city and location");
  if (cities > 1 && airplanes == 0) throw std::invalid_argument("logistics with several cities needs an airplane");
  std::mt19937_64 rng(seed);
  auto place = [](std::size_t c, std::size_t l) { return "l" + std::to_string(c + 1) + "-" + std::to_string(l + 1); };
  std::uniform_int_distribution<std::size_t> city(0, cities - 1), loc(0, locations - 1);
  std::ostringstream out;
  out << "(define (problem logistics-" << cities << '-' << locations << '-' << packages << '-' << seed
      << ")\n  (:domain logistics)\n  (:objects";
  for (std::size_t c = 0; c < cities; ++c) out << ' ' << numbered("c", c + 1);
  out << " - city";
  for (std::size_t c = 0; c < cities; ++c) out << ' ' << place(c, 0);
  out << " - airport";
  if (locations > 1) {
    for (std::size_t c = 0; c < cities; ++c) {
      for (std::size_t l = 1; l < locations; ++l) out << ' ' << place(c, l);
    }
    out << " - location";
  }
  for (std::size_t c = 0; c < cities; ++c) out << ' ' << numbered("t", c + 1);
  out << " - truck";
  if (airplanes > 0) {
    for (std::size_t a = 1; a <= airplanes; ++a) out << ' ' << numbered("a", a);
    out << " - airplane";
  }
  for (std::size_t p = 1; p <= packages; ++p) out << ' ' << numbered("p", p);
  out << (packages > 0 ? " - package" : "") << ")\n  (:init";
  for (std::size_t c = 0; c < cities; ++c) {
    for (std::size_t l = 0; l < locations; ++l) out << " (in-city " << place(c, l) << ' ' << numbered("c", c + 1) << ')';
    out << " (at " << numbered("t", c + 1) << ' ' << place(c, loc(rng)) << ')';
  }
  for (std::size_t a = 1; a <= airplanes; ++a) out << " (at " << numbered("a", a) << ' ' << place(city(rng), 0) << ')';
  std::vector<std::pair<std::size_t, std::size_t>> goal;
  for (std::size_t p = 1; p <= packages; ++p) {
    const std::size_t c0 = city(rng), l0 = loc(rng);
    std::size_t c1, l1;
    do {
      c1 = city(rng);
      l1 = loc(rng);
    } while (cities * locations > 1 && c1 == c0 && l1 == l0);
    out << " (at " << numbered("p", p) << ' ' << place(c0, l0) << ')';
    goal.emplace_back(c1, l1);
  }
  out << ")\n  (:goal (and";
  for (std::size_t p = 0; p < packages; ++p) out << " (at " << numbered("p", p + 1) << ' ' << place(goal[p].first, goal[p].second) << ')';
  out << ")))\n";
  return out.str();
}

}  // namespace gnnplan::bench
