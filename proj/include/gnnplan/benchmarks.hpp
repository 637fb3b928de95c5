#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

// PDDL text for the benchmark domains and seeded instance generators.
// Instances are reconstructions of the usual IPC families, not copies.
namespace gnnplan::bench {

std::vector<std::string> domain_names();  // gripper, blocks, delivery, spanner, logistics

// Throws std::invalid_argument for an unknown name.
std::string domain_pddl(std::string_view name);

// Balls start in rooma and must reach roomb. The usual robot has two
// grippers (left, right); more are named hand3, hand4, ...
std::string gripper_instance(std::size_t balls, bool robot_in_roomb = false, std::size_t grippers = 2);

// Random initial and goal towers; the goal lists the `on` atoms (or
// `ontable` for every block when the goal tower set is flat).
std::string blocks_instance(std::size_t blocks, std::uint64_t seed);

// Square grid, one truck, packages and a shared target cell at random.
std::string delivery_instance(std::size_t side, std::size_t packages, std::uint64_t seed);

// Chain shed -> loc1 .. locN -> gate. Spanners on random chain locations,
// nuts at the gate, man at the shed. Walking works in both directions.
std::string spanner_instance(std::size_t locations, std::size_t spanners, std::size_t nuts, std::uint64_t seed);

// Cities with `locations` places each (the first is an airport), one truck
// per city, `airplanes` airplanes, packages with random start and goal.
std::string logistics_instance(std::size_t cities, std::size_t locations, std::size_t packages,
                               std::size_t airplanes, std::uint64_t seed);

}  // namespace gnnplan::bench
