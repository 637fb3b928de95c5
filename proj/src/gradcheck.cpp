#include "gnnplan/gradcheck.hpp"

#include <algorithm>
#include <chrono>

namespace gnnplan {

Domain gradcheck_domain() {
  Domain d;
  d.name = "gradcheck";
  d.predicates = {{"flag", 0}, {"red", 1}, {"blue", 1}, {"edge", 2}, {"between", 3}};
  return d;
}

GradcheckReport gradient_check_suite(std::uint64_t seed, std::size_t states, std::size_t param_seeds, double step) {
  const auto start = std::chrono::steady_clock::now();
  const Domain domain = gradcheck_domain();
  GradcheckReport report;
  std::mt19937_64 rng(seed);
  for (std::size_t p = 0; p < param_seeds; ++p) {
    GnnHyper hyper;
    hyper.embedding = 4;
    hyper.layers = 2;
    hyper.seed = rng();
    GnnParams params = init_params(domain, hyper);
    {
      std::uniform_real_distribution<double> bias(-0.5, 0.5);
      Eigen::VectorXd flat = params.weights().flatten();
      GnnWeights shape = GnnWeights::zeros_like(params.weights());
      // mark the bias slots by flattening a copy whose biases are one
      auto set_bias = [](Mlp& m) {
        m.hidden.bias.setOnes();
        m.output.bias.setOnes();
      };
      for (auto& m : shape.message) set_bias(m);
      set_bias(shape.update);
      set_bias(shape.readout_object);
      set_bias(shape.readout_value);
      const Eigen::VectorXd mask = shape.flatten();
      for (Eigen::Index i = 0; i < flat.size(); ++i) {
        if (mask(i) != 0.0) flat(i) = bias(rng);
      }
      params.mutable_weights().assign(flat);
    }
    report.parameters = params.weights().parameter_count();

    for (std::size_t s = 0; s < states; ++s) {
      const std::size_t objects = 2 + rng() % 3;
      std::vector<GroundAtom> atoms;
      if (rng() % 2) atoms.push_back({0, {}});
      const std::size_t count = 2 + rng() % 6;
      for (std::size_t a = 0; a < count; ++a) {
        const PredicateId pred = 1 + static_cast<PredicateId>(rng() % 4);
        GroundAtom atom{pred, {}};
        for (std::size_t j = 0; j < domain.predicates[pred].arity; ++j) {
          atom.args.push_back(static_cast<ObjectId>(rng() % objects));
        }
        atoms.push_back(std::move(atom));
      }
      State state(std::move(atoms));
      EmbeddingFrame frame = initial_embeddings(objects, hyper, rng);
      report.max_error =
          std::max(report.max_error, max_relative_gradient_error(params, objects, state.atoms(), frame, step));
      ++report.cases;
    }
  }
  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace gnnplan
