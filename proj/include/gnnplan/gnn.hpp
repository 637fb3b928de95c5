#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "gnnplan/grounding.hpp"

namespace gnnplan {

struct GnnHyper {
  std::size_t embedding = 64;  // k, must be even
  std::size_t layers = 30;     // L
  double alpha = 8.0;          // smooth-max sharpness
  std::uint64_t seed = 0;

  void validate() const;  // throws std::invalid_argument
  bool operator==(const GnnHyper&) const = default;
};

struct Dense {
  Eigen::MatrixXd weight;  // out x in
  Eigen::VectorXd bias;    // out
};

// Dense layer with ReLU followed by a linear dense layer.
struct Mlp {
  Dense hidden;
  Dense output;

  std::size_t input_size() const { return static_cast<std::size_t>(hidden.weight.cols()); }
  std::size_t output_size() const { return static_cast<std::size_t>(output.weight.rows()); }
};

// Weights of the whole network. Gradients use the same layout.
struct GnnWeights {
  std::vector<Mlp> message;  // one per predicate, (arity*k) -> (arity*k)
  Mlp update;                // 2k -> k
  Mlp readout_object;        // k -> k
  Mlp readout_value;         // k -> 1

  static GnnWeights zeros_like(const GnnWeights& other);
  std::size_t parameter_count() const;

  // Fixed order: message MLPs by predicate id, then update, readout_object,
  // readout_value; within an MLP hidden weight, hidden bias, output weight,
  // output bias; matrices column major.
  Eigen::VectorXd flatten() const;
  void assign(const Eigen::VectorXd& flat);

  GnnWeights& operator+=(const GnnWeights& other);
  GnnWeights& operator*=(double factor);
  bool all_finite() const;
};

using GradientSet = GnnWeights;

class GnnParams {
 public:
  GnnParams(GnnHyper hyper, std::vector<PredicateSymbol> signature, GnnWeights weights);

  const GnnHyper& hyper() const { return hyper_; }
  const std::vector<PredicateSymbol>& signature() const { return signature_; }
  const GnnWeights& weights() const { return weights_; }

  // Any mutable access invalidates outstanding forward tapes.
  GnnWeights& mutable_weights() {
    ++generation_;
    return weights_;
  }
  std::uint64_t generation() const { return generation_; }

  // Throws std::invalid_argument when the predicate names or arities differ.
  void check_signature(const Domain& domain) const;

  static constexpr const char* kInitScheme = "fan-in-uniform/zero-bias";

 private:
  GnnHyper hyper_;
  std::vector<PredicateSymbol> signature_;
  GnnWeights weights_;
  std::uint64_t generation_ = 0;
};

// Weights uniform in +-1/sqrt(fan_in), biases zero, drawn from hyper.seed.
GnnParams init_params(const Domain& domain, const GnnHyper& hyper);

// Closed-form number of trainable scalars for a predicate signature.
std::size_t expected_parameter_count(std::span<const PredicateSymbol> predicates, std::size_t k);

struct EmbeddingFrame {
  Eigen::MatrixXd embeddings;  // k x objects; column o is f(o)

  std::size_t objects() const { return static_cast<std::size_t>(embeddings.cols()); }
  std::size_t dimension() const { return static_cast<std::size_t>(embeddings.rows()); }
};

// Zero first half, i.i.d. standard normal second half.
EmbeddingFrame initial_embeddings(std::size_t num_objects, const GnnHyper& hyper, std::mt19937_64& rng);

// x* + log(sum exp(alpha (x_j - x*))) / alpha with x* = max. Throws on empty input.
double smax(std::span<const double> values, double alpha);

// Atoms of one predicate, in canonical order. args holds arity entries per atom.
struct PredicateBatch {
  PredicateId predicate = 0;
  std::size_t arity = 0;
  std::vector<ObjectId> args;

  std::size_t size() const { return arity == 0 ? 0 : args.size() / arity; }
};

// Message m_{q,o}: block `position` of column `column` in batch `batch`.
struct Incidence {
  std::uint32_t batch = 0;
  std::uint32_t column = 0;
  std::uint32_t position = 0;
};

struct LayerTape {
  std::vector<Eigen::MatrixXd> message_input;   // per batch, (arity*k) x atoms
  std::vector<Eigen::MatrixXd> message_hidden;  // pre-activations
  std::vector<Eigen::MatrixXd> message_output;
  Eigen::MatrixXd aggregate;                    // k x objects
  Eigen::MatrixXd update_input;                 // 2k x objects
  Eigen::MatrixXd update_hidden;
};

struct ForwardTape {
  const GnnParams* params = nullptr;
  std::uint64_t generation = 0;
  std::size_t num_objects = 0;
  std::vector<PredicateBatch> batches;
  std::vector<std::vector<Incidence>> incidence;  // per object, canonical atom order
  std::vector<Eigen::MatrixXd> frames;            // layers + 1 frames, k x objects
  std::vector<LayerTape> layers;
  Eigen::MatrixXd readout_hidden;                 // k x objects
  Eigen::MatrixXd readout_output;
  Eigen::VectorXd pooled;
  Eigen::VectorXd value_hidden;
  double value = 0.0;
};

class StaleTape : public std::logic_error {
 public:
  StaleTape() : std::logic_error("backward: parameters changed since the forward pass") {}
};

// Runs the message-passing network on a set of true atoms over `num_objects`
// objects. Objects in no atom receive a zero aggregate. Throws
// std::invalid_argument on atoms over unknown predicates or objects.
double forward(const GnnParams& params, std::size_t num_objects, std::span<const GroundAtom> atoms,
               const EmbeddingFrame& initial, ForwardTape& tape);

// Adds seed * dV/dparams into `grads`.
void backward(const ForwardTape& tape, const GnnParams& params, double seed, GradientSet& grads);
GradientSet backward(const ForwardTape& tape, const GnnParams& params);

enum class RngMode { stochastic, fixed_seed };

// Seed of the random half used in fixed-seed mode.
std::uint64_t frame_seed(const State& state, std::uint64_t evaluation_seed);

// stochastic: the random half is drawn from `seed` directly (callers pass a
// fresh seed per pass). fixed_seed: drawn from frame_seed(state, seed).
double value_of(const GnnParams& params, std::size_t num_objects, const State& state, RngMode mode,
                std::uint64_t seed);

// Central finite differences over every parameter; returns the largest
// |analytic - numeric| / max(|analytic|, |numeric|, 1e-6).
double max_relative_gradient_error(const GnnParams& params, std::size_t num_objects,
                                   std::span<const GroundAtom> atoms, const EmbeddingFrame& frame,
                                   double step = 1e-5);

// Text container: hyperparameters, initialization scheme, predicate
// signature and all weights at full precision.
void write_params(std::ostream& out, const GnnParams& params);
GnnParams read_params(std::istream& in);

}  // namespace gnnplan
