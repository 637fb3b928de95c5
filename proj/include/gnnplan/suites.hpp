#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "gnnplan/config.hpp"

// Ready-made experiment suites: instance partitions plus the run
// configuration used for them. `gnnplan generate` writes them to disk.
namespace gnnplan::bench {

struct SuiteInstance {
  std::string id;
  std::string pddl;
};

struct Suite {
  std::string name;
  std::string domain;  // benchmark domain name
  RunConfig config;    // paths left empty
  std::vector<SuiteInstance> train;
  std::vector<SuiteInstance> validation;
  std::vector<SuiteInstance> test;
};

std::vector<std::string> suite_names();

// Throws std::invalid_argument for an unknown name.
Suite suite(std::string_view name);

}  // namespace gnnplan::bench
