#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "gnnplan/derived.hpp"
#include "gnnplan/gnn.hpp"
#include "gnnplan/state_space.hpp"

namespace gnnplan {

enum class LossKind { supervised, l0, l1 };

std::string_view to_string(LossKind kind);
LossKind parse_loss_kind(std::string_view text);  // "supervised", "l0", "l1"

struct LossConfig {
  LossKind kind = LossKind::l1;
  double delta = 2.0;
  bool regularizers = true;

  void validate() const;
};

// How the random half of the initial embeddings is drawn during training.
// per_pass: fresh draw on every forward pass. per_state: the fixed-seed frame
// of each state, the same one evaluation uses.
enum class RandomHalf { per_pass, per_state };

std::string_view to_string(RandomHalf mode);
RandomHalf parse_random_half(std::string_view text);  // "per-pass", "per-state"

struct TrainConfig {
  GnnHyper hyper;
  LossConfig loss;
  double learning_rate = 0.0002;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::size_t batch_size = 32;
  std::size_t max_epochs = 100;
  double budget_seconds = 600.0;  // whole run, shared evenly between seeds
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};
  std::uint64_t eval_seed = 0;
  RandomHalf random_half = RandomHalf::per_pass;

  void validate() const;
};

double loss_supervised(double value, std::int64_t vstar);

// Goal states give |V|. Throws std::invalid_argument for a non-goal state
// without successors.
double loss_l0_prime(double value, std::span<const double> successor_values, bool is_goal);
double loss_l1_prime(double value, std::span<const double> successor_values, bool is_goal);

double loss_regularized(double base, double value, std::int64_t vstar, double delta);

// Loss of one root state together with its partial derivatives. d_successor
// applies to successor `argmin` (the first minimizer) only.
struct EntryLoss {
  double loss = 0.0;
  double d_value = 0.0;
  double d_successor = 0.0;
  std::size_t argmin = 0;
};

EntryLoss entry_loss(const LossConfig& config, double value, std::span<const double> successor_values,
                     std::int64_t vstar, bool is_goal);

// Dataset states with augmented atoms, ready for the network.
class TrainingData {
 public:
  TrainingData(const Dataset& dataset, const Augmenter& augmenter);

  const Dataset& dataset() const { return *dataset_; }
  const State& state(std::size_t instance, std::size_t pool_index) const { return pools_[instance][pool_index]; }
  std::size_t objects(std::size_t instance) const { return dataset_->instances[instance].instance.objects.size(); }
  std::size_t size() const { return dataset_->entries.size(); }

 private:
  const Dataset* dataset_;
  std::vector<std::vector<State>> pools_;
};

// Value lookup used to evaluate a loss without the network.
using PoolValue = std::function<double(std::size_t instance, std::size_t pool_index)>;

// Mean over non-goal entries plus mean over goal entries.
double dataset_loss(const Dataset& dataset, const LossConfig& config, const PoolValue& value);

struct BatchResult {
  double loss = 0.0;
  GradientSet grads;
};

// Forward and backward over the roots `entries` and their successors. With
// per_pass, random halves come from streams derived from `stream_seed`; with
// per_state, from frame_seed(state, eval_seed).
BatchResult batch_loss(const GnnParams& params, const TrainingData& data, std::span<const std::size_t> entries,
                       const LossConfig& config, std::uint64_t stream_seed,
                       RandomHalf random_half = RandomHalf::per_pass, std::uint64_t eval_seed = 0);

// Loss over the whole dataset with fixed-seed embeddings and no gradients.
double evaluation_loss(const GnnParams& params, const TrainingData& data, const LossConfig& config,
                       std::uint64_t eval_seed);

struct AdamState {
  GradientSet m;
  GradientSet v;
  std::uint64_t t = 0;

  explicit AdamState(const GnnWeights& like);
};

class NonFiniteGradient : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// One bias-corrected Adam update. Throws NonFiniteGradient (parameters
// untouched) when a gradient entry is NaN or infinite.
void optimizer_step(GnnParams& params, const GradientSet& grads, AdamState& state, const TrainConfig& config);

struct Checkpoint {
  GnnParams params;
  TrainConfig config;
  std::uint64_t seed = 0;
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double validation_loss = 0.0;
  std::uint64_t train_hash = 0;
  std::uint64_t validation_hash = 0;
};

struct EpochLog {
  std::uint64_t seed = 0;
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double validation_loss = 0.0;
  double seconds = 0.0;
};

struct TrainResult {
  Checkpoint best;
  std::vector<Checkpoint> per_seed;  // best checkpoint of each seed
  std::vector<EpochLog> log;
  std::vector<std::string> warnings;
};

// FNV-1a over the serialized dataset.
std::uint64_t dataset_hash(const Dataset& dataset, const Domain& domain);

// Multi-seed training with per-epoch validation. An empty validation set
// falls back to the fixed-seed loss on the training set. Throws
// std::invalid_argument on overlapping datasets or when the augmenter's
// domain does not cover the dataset instances.
TrainResult train(const Dataset& train_set, const Dataset& validation_set, const Augmenter& augmenter,
                  const TrainConfig& config, const std::function<void(const EpochLog&)>& on_epoch = {});

void write_checkpoint(std::ostream& out, const Checkpoint& checkpoint);
Checkpoint read_checkpoint(std::istream& in);

// log.tsv, checkpoint.txt and train-report.txt inside `dir`.
void write_training_run(const std::filesystem::path& dir, const TrainResult& result);

}  // namespace gnnplan
