#pragma once

#include <cstdint>
#include <string>

#include "gnnplan/gnn.hpp"

namespace gnnplan {

struct GradcheckReport {
  double max_error = 0.0;
  std::size_t cases = 0;
  std::size_t parameters = 0;  // per network
  double seconds = 0.0;
};

// Finite-difference suite on a random tiny domain (predicates of arity 0..3)
// with random states: `states` states for each of `param_seeds` parameter
// draws. Biases are randomized too so that no unit sits at a ReLU kink.
GradcheckReport gradient_check_suite(std::uint64_t seed, std::size_t states = 20, std::size_t param_seeds = 5,
                                     double step = 1e-5);

// Domain with predicates of arity 0, 1, 1, 2, 3 and no schemas.
Domain gradcheck_domain();

}  // namespace gnnplan
