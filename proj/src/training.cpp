#include "gnnplan/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

namespace gnnplan {

std::string_view to_string(LossKind kind) {
  switch (kind) {
    case LossKind::supervised: return "supervised";
    case LossKind::l0: return "l0";
    case LossKind::l1: return "l1";
  }
  return "?";
}

LossKind parse_loss_kind(std::string_view text) {
  if (text == "supervised") return LossKind::supervised;
  if (text == "l0") return LossKind::l0;
  if (text == "l1") return LossKind::l1;
  throw std::invalid_argument("unknown loss kind '" + std::string(text) + "' (expected l0, l1 or supervised)");
}

std::string_view to_string(RandomHalf mode) { return mode == RandomHalf::per_pass ? "per-pass" : "per-state"; }

RandomHalf parse_random_half(std::string_view text) {
  if (text == "per-pass") return RandomHalf::per_pass;
  if (text == "per-state") return RandomHalf::per_state;
  throw std::invalid_argument("unknown random-half mode '" + std::string(text) + "'");
}

void LossConfig::validate() const {
  if (!(delta >= 1.0)) throw std::invalid_argument("loss delta must be at least 1");
}

void TrainConfig::validate() const {
  hyper.validate();
  loss.validate();
  if (!(learning_rate > 0.0)) throw std::invalid_argument("learning rate must be positive");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
    throw std::invalid_argument("Adam moments must lie in [0, 1)");
  }
  if (!(epsilon > 0.0)) throw std::invalid_argument("Adam epsilon must be positive");
  if (batch_size == 0) throw std::invalid_argument("batch size must be positive");
  if (!(budget_seconds >= 0.0)) throw std::invalid_argument("budget must be non-negative");
  if (seeds.empty()) throw std::invalid_argument("at least one training seed is required");
}

// ---------------------------------------------------------------------------
// Losses

namespace {

double sign(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

std::size_t first_argmin(std::span<const double> values) {
  return static_cast<std::size_t>(std::min_element(values.begin(), values.end()) - values.begin());
}

void require_successors(std::span<const double> successor_values, bool is_goal) {
  if (!is_goal && successor_values.empty()) throw std::invalid_argument("non-goal state without successors");
}

}  // namespace

double loss_supervised(double value, std::int64_t vstar) { return std::abs(value - static_cast<double>(vstar)); }

double loss_l0_prime(double value, std::span<const double> successor_values, bool is_goal) {
  require_successors(successor_values, is_goal);
  if (is_goal) return std::abs(value);
  return std::abs(value - (1.0 + successor_values[first_argmin(successor_values)]));
}

double loss_l1_prime(double value, std::span<const double> successor_values, bool is_goal) {
  require_successors(successor_values, is_goal);
  if (is_goal) return std::abs(value);
  return std::max(0.0, 1.0 + successor_values[first_argmin(successor_values)] - value);
}

double loss_regularized(double base, double value, std::int64_t vstar, double delta) {
  const double v = static_cast<double>(vstar);
  return base + std::max(0.0, v - value) + std::max(0.0, value - delta * v);
}

EntryLoss entry_loss(const LossConfig& config, double value, std::span<const double> successor_values,
                     std::int64_t vstar, bool is_goal) {
  EntryLoss out;
  if (config.kind == LossKind::supervised) {
    out.loss = loss_supervised(value, vstar);
    out.d_value = sign(value - static_cast<double>(vstar));
    return out;
  }
  require_successors(successor_values, is_goal);
  if (is_goal) {
    out.loss = std::abs(value);
    out.d_value = sign(value);
    return out;
  }
  out.argmin = first_argmin(successor_values);
  const double target = 1.0 + successor_values[out.argmin];
  if (config.kind == LossKind::l0) {
    out.loss = loss_l0_prime(value, successor_values, false);
    const double s = sign(value - target);
    out.d_value = s;
    out.d_successor = -s;
  } else {
    out.loss = loss_l1_prime(value, successor_values, false);
    if (target - value > 0.0) {
      out.d_value = -1.0;
      out.d_successor = 1.0;
    }
  }
  if (config.regularizers) {
    const double v = static_cast<double>(vstar);
    out.loss = loss_regularized(out.loss, value, vstar, config.delta);
    if (v - value > 0.0) out.d_value -= 1.0;
    if (value - config.delta * v > 0.0) out.d_value += 1.0;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Data

TrainingData::TrainingData(const Dataset& dataset, const Augmenter& augmenter) : dataset_(&dataset) {
  const std::size_t base = augmenter.base_predicate_count();
  for (const auto& inst : dataset.instances) {
    if (inst.instance.domain_name != augmenter.domain().name) {
      throw std::invalid_argument("instance '" + inst.id + "' belongs to domain '" + inst.instance.domain_name +
                                  "', not '" + augmenter.domain().name + "'");
    }
    std::vector<State> pool;
    pool.reserve(inst.pool.size());
    for (const auto& s : inst.pool) {
      for (const auto& a : s.atoms()) {
        if (a.predicate >= base) throw std::invalid_argument("dataset state uses a predicate outside the base domain");
        if (std::any_of(a.args.begin(), a.args.end(), [&](ObjectId o) { return o >= inst.instance.objects.size(); })) {
          throw std::invalid_argument("dataset state of '" + inst.id + "' refers to an unknown object");
        }
      }
      pool.push_back(augmenter.augment(s, inst.instance));
    }
    pools_.push_back(std::move(pool));
  }
}

double dataset_loss(const Dataset& dataset, const LossConfig& config, const PoolValue& value) {
  double goal_sum = 0.0, other_sum = 0.0;
  std::size_t goal_count = 0, other_count = 0;
  std::vector<double> succ;
  for (const auto& e : dataset.entries) {
    succ.clear();
    if (!e.goal && config.kind != LossKind::supervised) {
      for (auto s : e.successors) succ.push_back(value(e.instance, s));
    }
    const double l = entry_loss(config, value(e.instance, e.state), succ, e.vstar, e.goal).loss;
    if (e.goal) {
      goal_sum += l;
      ++goal_count;
    } else {
      other_sum += l;
      ++other_count;
    }
  }
  double total = 0.0;
  if (other_count > 0) total += other_sum / static_cast<double>(other_count);
  if (goal_count > 0) total += goal_sum / static_cast<double>(goal_count);
  return total;
}

namespace {

std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a + 0x9E3779B97F4A7C15ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double run_forward(const GnnParams& params, const State& state, std::size_t objects, std::uint64_t stream,
                   ForwardTape& tape) {
  std::mt19937_64 rng(stream);
  EmbeddingFrame frame = initial_embeddings(objects, params.hyper(), rng);
  return forward(params, objects, state.atoms(), frame, tape);
}

}  // namespace

BatchResult batch_loss(const GnnParams& params, const TrainingData& data, std::span<const std::size_t> entries,
                       const LossConfig& config, std::uint64_t stream_seed, RandomHalf random_half,
                       std::uint64_t eval_seed) {
  if (entries.empty()) throw std::invalid_argument("batch_loss: empty batch");
  const auto& dataset = data.dataset();
  std::size_t goal_count = 0;
  for (auto i : entries) goal_count += dataset.entries.at(i).goal ? 1 : 0;
  const std::size_t other_count = entries.size() - goal_count;

  BatchResult out{0.0, GradientSet::zeros_like(params.weights())};
  ForwardTape root, scratch, best;
  std::vector<double> succ;
  for (std::size_t slot = 0; slot < entries.size(); ++slot) {
    const auto& e = dataset.entries[entries[slot]];
    const std::size_t n = data.objects(e.instance);
    const std::uint64_t stream = mix(stream_seed, entries[slot]);
    auto draw = [&](std::size_t pool_index, std::uint64_t per_pass) {
      return random_half == RandomHalf::per_pass ? per_pass : frame_seed(data.state(e.instance, pool_index), eval_seed);
    };
    const double v = run_forward(params, data.state(e.instance, e.state), n, draw(e.state, stream), root);

    succ.clear();
    if (!e.goal && config.kind != LossKind::supervised) {
      double lowest = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < e.successors.size(); ++j) {
        const double sv = run_forward(params, data.state(e.instance, e.successors[j]), n,
                                      draw(e.successors[j], mix(stream, j + 1)), scratch);
        succ.push_back(sv);
        if (sv < lowest) {
          lowest = sv;
          std::swap(best, scratch);
        }
      }
    }
    const EntryLoss l = entry_loss(config, v, succ, e.vstar, e.goal);
    const double weight = 1.0 / static_cast<double>(e.goal ? goal_count : other_count);
    out.loss += weight * l.loss;
    if (l.d_value != 0.0) backward(root, params, weight * l.d_value, out.grads);
    if (l.d_successor != 0.0) backward(best, params, weight * l.d_successor, out.grads);
  }
  return out;
}

double evaluation_loss(const GnnParams& params, const TrainingData& data, const LossConfig& config,
                       std::uint64_t eval_seed) {
  return dataset_loss(data.dataset(), config, [&](std::size_t instance, std::size_t pool_index) {
    return value_of(params, data.objects(instance), data.state(instance, pool_index), RngMode::fixed_seed, eval_seed);
  });
}

// ---------------------------------------------------------------------------
// Optimizer

AdamState::AdamState(const GnnWeights& like) : m(GradientSet::zeros_like(like)), v(GradientSet::zeros_like(like)) {}

void optimizer_step(GnnParams& params, const GradientSet& grads, AdamState& state, const TrainConfig& config) {
  const Eigen::VectorXd g = grads.flatten();
  if (!g.allFinite()) throw NonFiniteGradient("optimizer step aborted: gradient contains NaN or Inf");
  Eigen::VectorXd m = state.m.flatten();
  Eigen::VectorXd v = state.v.flatten();
  if (m.size() != g.size()) throw std::invalid_argument("optimizer step: gradient shape mismatch");
  ++state.t;
  m = config.beta1 * m + (1.0 - config.beta1) * g;
  v = config.beta2 * v + (1.0 - config.beta2) * g.cwiseProduct(g);
  const double c1 = 1.0 - std::pow(config.beta1, static_cast<double>(state.t));
  const double c2 = 1.0 - std::pow(config.beta2, static_cast<double>(state.t));
  Eigen::VectorXd step = (m / c1).array() / ((v / c2).array().sqrt() + config.epsilon);
  Eigen::VectorXd theta = params.weights().flatten() - config.learning_rate * step;
  state.m.assign(m);
  state.v.assign(v);
  params.mutable_weights().assign(theta);
  if (!params.weights().all_finite()) throw NonFiniteGradient("optimizer step produced non-finite parameters");
}

// ---------------------------------------------------------------------------
// Training loop

std::uint64_t dataset_hash(const Dataset& dataset, const Domain& domain) {
  std::ostringstream out;
  write_dataset(out, dataset, domain);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : out.str()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

TrainResult train(const Dataset& train_set, const Dataset& validation_set, const Augmenter& augmenter,
                  const TrainConfig& config, const std::function<void(const EpochLog&)>& on_epoch) {
  config.validate();
  const Dataset* both[] = {&train_set, &validation_set};
  check_disjoint(both);
  if (train_set.entries.empty()) throw std::invalid_argument("training set is empty");

  const TrainingData train_data(train_set, augmenter);
  const TrainingData valid_data(validation_set, augmenter);
  const bool has_validation = !validation_set.entries.empty();
  const TrainingData& select_data = has_validation ? valid_data : train_data;

  // The base domain is the augmenter's domain minus appended predicates.
  Domain base = augmenter.domain();
  base.predicates.resize(augmenter.base_predicate_count());
  const std::uint64_t train_hash = dataset_hash(train_set, base);
  const std::uint64_t valid_hash = dataset_hash(validation_set, base);

  using clock = std::chrono::steady_clock;
  const double per_seed_budget = config.budget_seconds / static_cast<double>(config.seeds.size());

  std::vector<Checkpoint> per_seed;
  std::vector<EpochLog> log;
  std::vector<std::string> warnings;
  if (!has_validation) warnings.push_back("validation set is empty; model selection uses the training set");

  std::vector<std::size_t> order(train_set.entries.size());
  for (auto seed : config.seeds) {
    const auto start = clock::now();
    auto elapsed = [&] { return std::chrono::duration<double>(clock::now() - start).count(); };
    GnnHyper hyper = config.hyper;
    hyper.seed = seed;
    GnnParams params = init_params(augmenter.domain(), hyper);
    AdamState adam(params.weights());

    const double train0 = evaluation_loss(params, train_data, config.loss, config.eval_seed);
    const double valid0 = evaluation_loss(params, select_data, config.loss, config.eval_seed);
    Checkpoint best{params, config, seed, 0, train0, valid0, train_hash, valid_hash};
    log.push_back({seed, 0, train0, valid0, elapsed()});
    if (on_epoch) on_epoch(log.back());

    std::size_t epoch = 1;
    for (; epoch <= config.max_epochs; ++epoch) {
      if (elapsed() >= per_seed_budget) break;
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::mt19937_64 shuffle_rng(mix(seed, epoch));
      std::shuffle(order.begin(), order.end(), shuffle_rng);
      double loss_sum = 0.0;
      std::size_t batches = 0;
      for (std::size_t offset = 0; offset < order.size(); offset += config.batch_size) {
        const std::size_t end = std::min(order.size(), offset + config.batch_size);
        std::span<const std::size_t> batch(order.data() + offset, end - offset);
        BatchResult r = batch_loss(params, train_data, batch, config.loss, mix(mix(seed, epoch), batches),
                                   config.random_half, config.eval_seed);
        optimizer_step(params, r.grads, adam, config);
        loss_sum += r.loss;
        ++batches;
      }
      const double train_loss = loss_sum / static_cast<double>(batches);
      const double valid_loss = evaluation_loss(params, select_data, config.loss, config.eval_seed);
      log.push_back({seed, epoch, train_loss, valid_loss, elapsed()});
      if (on_epoch) on_epoch(log.back());
      if (valid_loss < best.validation_loss) best = Checkpoint{params, config, seed, epoch, train_loss, valid_loss,
                                                               train_hash, valid_hash};
    }
    if (epoch == 1 && config.max_epochs > 0) {
      warnings.push_back("seed " + std::to_string(seed) + ": budget exhausted before the first epoch; keeping the "
                         "initial parameters");
    } else if (epoch <= config.max_epochs) {
      warnings.push_back("seed " + std::to_string(seed) + ": budget reached after " + std::to_string(epoch - 1) +
                         " of " + std::to_string(config.max_epochs) + " epochs");
    }
    per_seed.push_back(std::move(best));
  }

  std::size_t winner = 0;
  for (std::size_t i = 1; i < per_seed.size(); ++i) {
    if (per_seed[i].validation_loss < per_seed[winner].validation_loss) winner = i;
  }
  Checkpoint best = per_seed[winner];
  return TrainResult{std::move(best), std::move(per_seed), std::move(log), std::move(warnings)};
}

// ---------------------------------------------------------------------------
// Files

namespace {

constexpr const char* kCheckpointMagic = "gnnplan-checkpoint";
constexpr int kCheckpointVersion = 1;

template <typename T>
T read_field(std::istream& in, const std::string& key) {
  std::string got;
  T value{};
  if (!(in >> got) || got != key || !(in >> value)) throw std::runtime_error("checkpoint: expected field '" + key + "'");
  return value;
}

}  // namespace

void write_checkpoint(std::ostream& out, const Checkpoint& c) {
  const auto old_precision = out.precision(std::numeric_limits<double>::max_digits10);
  const auto& cfg = c.config;
  out << kCheckpointMagic << ' ' << kCheckpointVersion << '\n';
  out << "seed " << c.seed << "\nepoch " << c.epoch << "\ntrain-loss " << c.train_loss << "\nvalidation-loss "
      << c.validation_loss << '\n';
  out << "train-hash " << c.train_hash << "\nvalidation-hash " << c.validation_hash << '\n';
  out << "loss " << to_string(cfg.loss.kind) << "\ndelta " << cfg.loss.delta << "\nregularizers "
      << (cfg.loss.regularizers ? 1 : 0) << '\n';
  out << "learning-rate " << cfg.learning_rate << "\nbeta1 " << cfg.beta1 << "\nbeta2 " << cfg.beta2 << "\nepsilon "
      << cfg.epsilon << '\n';
  out << "batch-size " << cfg.batch_size << "\nmax-epochs " << cfg.max_epochs << "\nbudget-seconds "
      << cfg.budget_seconds << "\neval-seed " << cfg.eval_seed << "\nrandom-half " << to_string(cfg.random_half) << '\n';
  out << "seeds " << cfg.seeds.size();
  for (auto s : cfg.seeds) out << ' ' << s;
  out << '\n';
  out << "hyper " << cfg.hyper.embedding << ' ' << cfg.hyper.layers << ' ' << cfg.hyper.alpha << ' '
      << cfg.hyper.seed << '\n';
  out.precision(old_precision);
  write_params(out, c.params);
}

Checkpoint read_checkpoint(std::istream& in) {
  std::string magic;
  int version = 0;
  if (!(in >> magic >> version) || magic != kCheckpointMagic || version != kCheckpointVersion) {
    throw std::runtime_error("not a gnnplan checkpoint (version " + std::to_string(kCheckpointVersion) + ")");
  }
  const auto seed = read_field<std::uint64_t>(in, "seed");
  const auto epoch = read_field<std::size_t>(in, "epoch");
  const auto train_loss = read_field<double>(in, "train-loss");
  const auto valid_loss = read_field<double>(in, "validation-loss");
  const auto train_hash = read_field<std::uint64_t>(in, "train-hash");
  const auto valid_hash = read_field<std::uint64_t>(in, "validation-hash");
  TrainConfig cfg;
  cfg.loss.kind = parse_loss_kind(read_field<std::string>(in, "loss"));
  cfg.loss.delta = read_field<double>(in, "delta");
  cfg.loss.regularizers = read_field<int>(in, "regularizers") != 0;
  cfg.learning_rate = read_field<double>(in, "learning-rate");
  cfg.beta1 = read_field<double>(in, "beta1");
  cfg.beta2 = read_field<double>(in, "beta2");
  cfg.epsilon = read_field<double>(in, "epsilon");
  cfg.batch_size = read_field<std::size_t>(in, "batch-size");
  cfg.max_epochs = read_field<std::size_t>(in, "max-epochs");
  cfg.budget_seconds = read_field<double>(in, "budget-seconds");
  cfg.eval_seed = read_field<std::uint64_t>(in, "eval-seed");
  cfg.random_half = parse_random_half(read_field<std::string>(in, "random-half"));
  const auto nseeds = read_field<std::size_t>(in, "seeds");
  cfg.seeds.assign(nseeds, 0);
  for (auto& s : cfg.seeds) {
    if (!(in >> s)) throw std::runtime_error("checkpoint: truncated seed list");
  }
  std::string key;
  if (!(in >> key) || key != "hyper" ||
      !(in >> cfg.hyper.embedding >> cfg.hyper.layers >> cfg.hyper.alpha >> cfg.hyper.seed)) {
    throw std::runtime_error("checkpoint: expected field 'hyper'");
  }
  GnnParams params = read_params(in);
  return Checkpoint{std::move(params), cfg, seed, epoch, train_loss, valid_loss, train_hash, valid_hash};
}

void write_training_run(const std::filesystem::path& dir, const TrainResult& result) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "log.tsv");
    out << "# gnnplan-train-log 1\nseed\tepoch\ttrain_loss\tvalidation_loss\tseconds\n";
    out << std::setprecision(10);
    for (const auto& e : result.log) {
      out << e.seed << '\t' << e.epoch << '\t' << e.train_loss << '\t' << e.validation_loss << '\t' << e.seconds << '\n';
    }
  }
  {
    std::ofstream out(dir / "checkpoint.txt");
    write_checkpoint(out, result.best);
  }
  std::ofstream out(dir / "train-report.txt");
  out << "# gnnplan-train-report 1\n";
  out << "loss " << to_string(result.best.config.loss.kind) << '\n';
  for (const auto& c : result.per_seed) {
    out << "seed " << c.seed << " best-epoch " << c.epoch << " validation-loss " << c.validation_loss << '\n';
  }
  out << "selected seed " << result.best.seed << " epoch " << result.best.epoch << " validation-loss "
      << result.best.validation_loss << '\n';
  for (const auto& w : result.warnings) out << "warning " << w << '\n';
}

}  // namespace gnnplan
