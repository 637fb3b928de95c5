#include "gnnplan/gnn.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace gnnplan {

void GnnHyper::validate() const {
  if (embedding == 0 || embedding % 2 != 0) {
    throw std::invalid_argument("embedding dimension must be even and positive, got " + std::to_string(embedding));
  }
  if (layers == 0) throw std::invalid_argument("layer count must be at least 1");
  if (!(alpha > 0.0)) throw std::invalid_argument("smooth-max alpha must be positive");
}

// ---------------------------------------------------------------------------
// Weight containers

namespace {

Mlp zero_mlp(std::size_t in, std::size_t hidden, std::size_t out) {
  Mlp m;
  m.hidden.weight = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(hidden), static_cast<Eigen::Index>(in));
  m.hidden.bias = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(hidden));
  m.output.weight = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(out), static_cast<Eigen::Index>(hidden));
  m.output.bias = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(out));
  return m;
}

Mlp zeros_like(const Mlp& m) {
  return zero_mlp(m.input_size(), static_cast<std::size_t>(m.hidden.weight.rows()), m.output_size());
}

template <typename Weights, typename F>
void visit_blocks(Weights& w, F&& f) {
  auto visit_mlp = [&](auto& m) {
    f(m.hidden.weight.data(), m.hidden.weight.size());
    f(m.hidden.bias.data(), m.hidden.bias.size());
    f(m.output.weight.data(), m.output.weight.size());
    f(m.output.bias.data(), m.output.bias.size());
  };
  for (auto& m : w.message) visit_mlp(m);
  visit_mlp(w.update);
  visit_mlp(w.readout_object);
  visit_mlp(w.readout_value);
}

void add_mlp(Mlp& a, const Mlp& b) {
  a.hidden.weight += b.hidden.weight;
  a.hidden.bias += b.hidden.bias;
  a.output.weight += b.output.weight;
  a.output.bias += b.output.bias;
}

}  // namespace

GnnWeights GnnWeights::zeros_like(const GnnWeights& other) {
  GnnWeights w;
  for (const auto& m : other.message) w.message.push_back(gnnplan::zeros_like(m));
  w.update = gnnplan::zeros_like(other.update);
  w.readout_object = gnnplan::zeros_like(other.readout_object);
  w.readout_value = gnnplan::zeros_like(other.readout_value);
  return w;
}

std::size_t GnnWeights::parameter_count() const {
  std::size_t n = 0;
  visit_blocks(*this, [&](const double*, Eigen::Index size) { n += static_cast<std::size_t>(size); });
  return n;
}

Eigen::VectorXd GnnWeights::flatten() const {
  Eigen::VectorXd flat(static_cast<Eigen::Index>(parameter_count()));
  Eigen::Index pos = 0;
  visit_blocks(*this, [&](const double* data, Eigen::Index size) {
    std::copy(data, data + size, flat.data() + pos);
    pos += size;
  });
  return flat;
}

void GnnWeights::assign(const Eigen::VectorXd& flat) {
  if (static_cast<std::size_t>(flat.size()) != parameter_count()) {
    throw std::invalid_argument("GnnWeights::assign: size mismatch");
  }
  Eigen::Index pos = 0;
  visit_blocks(*this, [&](double* data, Eigen::Index size) {
    std::copy(flat.data() + pos, flat.data() + pos + size, data);
    pos += size;
  });
}

GnnWeights& GnnWeights::operator+=(const GnnWeights& other) {
  if (message.size() != other.message.size()) throw std::invalid_argument("GnnWeights: layout mismatch");
  for (std::size_t i = 0; i < message.size(); ++i) add_mlp(message[i], other.message[i]);
  add_mlp(update, other.update);
  add_mlp(readout_object, other.readout_object);
  add_mlp(readout_value, other.readout_value);
  return *this;
}

GnnWeights& GnnWeights::operator*=(double factor) {
  visit_blocks(*this, [&](double* data, Eigen::Index size) {
    for (Eigen::Index i = 0; i < size; ++i) data[i] *= factor;
  });
  return *this;
}

bool GnnWeights::all_finite() const {
  bool ok = true;
  visit_blocks(*this, [&](const double* data, Eigen::Index size) {
    for (Eigen::Index i = 0; i < size && ok; ++i) ok = std::isfinite(data[i]);
  });
  return ok;
}

GnnParams::GnnParams(GnnHyper hyper, std::vector<PredicateSymbol> signature, GnnWeights weights)
    : hyper_(hyper), signature_(std::move(signature)), weights_(std::move(weights)) {
  hyper_.validate();
  if (weights_.message.size() != signature_.size()) {
    throw std::invalid_argument("GnnParams: one message MLP per predicate expected");
  }
}

void GnnParams::check_signature(const Domain& domain) const {
  if (domain.predicates.size() != signature_.size()) {
    throw std::invalid_argument("predicate signature mismatch: network has " + std::to_string(signature_.size()) +
                                " predicates, domain has " + std::to_string(domain.predicates.size()));
  }
  for (std::size_t i = 0; i < signature_.size(); ++i) {
    if (signature_[i].name != domain.predicates[i].name || signature_[i].arity != domain.predicates[i].arity) {
      throw std::invalid_argument("predicate signature mismatch at '" + signature_[i].name + "'");
    }
  }
}

namespace {

void init_dense(Dense& d, std::mt19937_64& rng) {
  const auto fan_in = d.weight.cols();
  if (fan_in == 0) return;
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  std::uniform_real_distribution<double> dist(-bound, bound);
  for (Eigen::Index c = 0; c < d.weight.cols(); ++c) {
    for (Eigen::Index r = 0; r < d.weight.rows(); ++r) d.weight(r, c) = dist(rng);
  }
  d.bias.setZero();
}

Mlp random_mlp(std::size_t in, std::size_t hidden, std::size_t out, std::mt19937_64& rng) {
  Mlp m = zero_mlp(in, hidden, out);
  init_dense(m.hidden, rng);
  init_dense(m.output, rng);
  return m;
}

}  // namespace

GnnParams init_params(const Domain& domain, const GnnHyper& hyper) {
  hyper.validate();
  const std::size_t k = hyper.embedding;
  std::mt19937_64 rng(hyper.seed);
  GnnWeights w;
  for (const auto& p : domain.predicates) w.message.push_back(random_mlp(p.arity * k, p.arity * k, p.arity * k, rng));
  w.update = random_mlp(2 * k, 2 * k, k, rng);
  w.readout_object = random_mlp(k, k, k, rng);
  w.readout_value = random_mlp(k, k, 1, rng);
  return GnnParams(hyper, domain.predicates, std::move(w));
}

std::size_t expected_parameter_count(std::span<const PredicateSymbol> predicates, std::size_t k) {
  auto mlp = [](std::size_t in, std::size_t out) { return in * in + in + in * out + out; };
  std::size_t total = 0;
  for (const auto& p : predicates) total += mlp(p.arity * k, p.arity * k);
  return total + mlp(2 * k, k) + mlp(k, k) + mlp(k, 1);
}

EmbeddingFrame initial_embeddings(std::size_t num_objects, const GnnHyper& hyper, std::mt19937_64& rng) {
  hyper.validate();
  const auto k = static_cast<Eigen::Index>(hyper.embedding);
  EmbeddingFrame frame{Eigen::MatrixXd::Zero(k, static_cast<Eigen::Index>(num_objects))};
  std::normal_distribution<double> normal(0.0, 1.0);
  for (Eigen::Index o = 0; o < frame.embeddings.cols(); ++o) {
    for (Eigen::Index d = k / 2; d < k; ++d) frame.embeddings(d, o) = normal(rng);
  }
  return frame;
}

double smax(std::span<const double> values, double alpha) {
  if (values.empty()) throw std::invalid_argument("smax of an empty list");
  const double top = *std::max_element(values.begin(), values.end());
  double sum = 0.0;
  for (double x : values) sum += std::exp(alpha * (x - top));
  return top + std::log(sum) / alpha;
}

// ---------------------------------------------------------------------------
// Forward and backward passes

namespace {

Eigen::MatrixXd mlp_hidden(const Mlp& m, const Eigen::MatrixXd& x) {
  Eigen::MatrixXd h = m.hidden.weight * x;
  h.colwise() += m.hidden.bias;
  return h;
}

Eigen::MatrixXd mlp_output(const Mlp& m, const Eigen::MatrixXd& hidden) {
  Eigen::MatrixXd y = m.output.weight * hidden.cwiseMax(0.0);
  y.colwise() += m.output.bias;
  return y;
}

// Accumulates parameter gradients into `g` and returns d/dx.
Eigen::MatrixXd mlp_backward(const Mlp& m, const Eigen::MatrixXd& x, const Eigen::MatrixXd& hidden,
                             const Eigen::MatrixXd& dy, Mlp& g) {
  const Eigen::MatrixXd activated = hidden.cwiseMax(0.0);
  g.output.weight.noalias() += dy * activated.transpose();
  g.output.bias += dy.rowwise().sum();
  Eigen::MatrixXd dh = m.output.weight.transpose() * dy;
  dh = dh.cwiseProduct((hidden.array() > 0.0).cast<double>().matrix());
  g.hidden.weight.noalias() += dh * x.transpose();
  g.hidden.bias += dh.rowwise().sum();
  return m.hidden.weight.transpose() * dh;
}

}  // namespace

double forward(const GnnParams& params, std::size_t num_objects, std::span<const GroundAtom> atoms,
               const EmbeddingFrame& initial, ForwardTape& tape) {
  const auto& hyper = params.hyper();
  const auto& w = params.weights();
  const auto k = static_cast<Eigen::Index>(hyper.embedding);
  const auto n = static_cast<Eigen::Index>(num_objects);
  if (initial.embeddings.rows() != k || initial.embeddings.cols() != n) {
    throw std::invalid_argument("forward: initial embedding frame has the wrong shape");
  }

  tape = ForwardTape{};
  tape.params = &params;
  tape.generation = params.generation();
  tape.num_objects = num_objects;
  tape.incidence.assign(num_objects, {});

  std::vector<int> batch_of(params.signature().size(), -1);
  for (const auto& atom : atoms) {
    if (atom.predicate >= params.signature().size()) {
      throw std::invalid_argument("forward: atom over unknown predicate id " + std::to_string(atom.predicate));
    }
    const auto& sym = params.signature()[atom.predicate];
    if (sym.arity != atom.args.size()) {
      throw std::invalid_argument("forward: arity mismatch for predicate '" + sym.name + "'");
    }
    if (sym.arity == 0) continue;  // nullary atoms address no object
    int& b = batch_of[atom.predicate];
    if (b < 0) {
      b = static_cast<int>(tape.batches.size());
      tape.batches.push_back({atom.predicate, sym.arity, {}});
    }
    auto& batch = tape.batches[static_cast<std::size_t>(b)];
    const auto column = static_cast<std::uint32_t>(batch.size());
    for (std::size_t j = 0; j < atom.args.size(); ++j) {
      ObjectId o = atom.args[j];
      if (o >= num_objects) throw std::invalid_argument("forward: atom over unknown object id " + std::to_string(o));
      batch.args.push_back(o);
      tape.incidence[o].push_back({static_cast<std::uint32_t>(b), column, static_cast<std::uint32_t>(j)});
    }
  }

  tape.frames.reserve(hyper.layers + 1);
  tape.frames.push_back(initial.embeddings);
  tape.layers.resize(hyper.layers);
  const double alpha = hyper.alpha;

  for (std::size_t layer = 0; layer < hyper.layers; ++layer) {
    const Eigen::MatrixXd& f = tape.frames[layer];
    LayerTape& lt = tape.layers[layer];
    for (const auto& batch : tape.batches) {
      const auto m = static_cast<Eigen::Index>(batch.arity);
      const auto count = static_cast<Eigen::Index>(batch.size());
      Eigen::MatrixXd x(m * k, count);
      for (Eigen::Index c = 0; c < count; ++c) {
        for (Eigen::Index j = 0; j < m; ++j) x.block(j * k, c, k, 1) = f.col(batch.args[static_cast<std::size_t>(c * m + j)]);
      }
      const Mlp& mlp = w.message[batch.predicate];
      Eigen::MatrixXd h = mlp_hidden(mlp, x);
      lt.message_output.push_back(mlp_output(mlp, h));
      lt.message_input.push_back(std::move(x));
      lt.message_hidden.push_back(std::move(h));
    }

    lt.aggregate = Eigen::MatrixXd::Zero(k, n);
    Eigen::ArrayXd top(k), sum(k);
    for (Eigen::Index o = 0; o < n; ++o) {
      const auto& inc = tape.incidence[static_cast<std::size_t>(o)];
      if (inc.empty()) continue;
      top.setConstant(-std::numeric_limits<double>::infinity());
      for (const auto& e : inc) {
        top = top.max(lt.message_output[e.batch].col(e.column).segment(e.position * k, k).array());
      }
      sum.setZero();
      for (const auto& e : inc) {
        sum += (alpha * (lt.message_output[e.batch].col(e.column).segment(e.position * k, k).array() - top)).exp();
      }
      lt.aggregate.col(o) = (top + sum.log() / alpha).matrix();
    }

    lt.update_input.resize(2 * k, n);
    lt.update_input.topRows(k) = f;
    lt.update_input.bottomRows(k) = lt.aggregate;
    lt.update_hidden = mlp_hidden(w.update, lt.update_input);
    tape.frames.push_back(mlp_output(w.update, lt.update_hidden));
  }

  tape.readout_hidden = mlp_hidden(w.readout_object, tape.frames.back());
  tape.readout_output = mlp_output(w.readout_object, tape.readout_hidden);
  tape.pooled = tape.readout_output.rowwise().sum();
  tape.value_hidden = w.readout_value.hidden.weight * tape.pooled + w.readout_value.hidden.bias;
  tape.value = (w.readout_value.output.weight * tape.value_hidden.cwiseMax(0.0))(0) + w.readout_value.output.bias(0);
  return tape.value;
}

void backward(const ForwardTape& tape, const GnnParams& params, double seed, GradientSet& grads) {
  if (tape.params != &params || tape.generation != params.generation()) throw StaleTape();
  const auto& w = params.weights();
  const auto& hyper = params.hyper();
  const auto k = static_cast<Eigen::Index>(hyper.embedding);
  const auto n = static_cast<Eigen::Index>(tape.num_objects);
  const double alpha = hyper.alpha;

  Eigen::MatrixXd dvalue(1, 1);
  dvalue(0, 0) = seed;
  Eigen::MatrixXd pooled = tape.pooled;
  Eigen::MatrixXd value_hidden = tape.value_hidden;
  Eigen::MatrixXd dpooled = mlp_backward(w.readout_value, pooled, value_hidden, dvalue, grads.readout_value);

  Eigen::MatrixXd dz = dpooled.replicate(1, n);
  Eigen::MatrixXd df = mlp_backward(w.readout_object, tape.frames.back(), tape.readout_hidden, dz, grads.readout_object);

  for (std::size_t layer = hyper.layers; layer-- > 0;) {
    const LayerTape& lt = tape.layers[layer];
    Eigen::MatrixXd du = mlp_backward(w.update, lt.update_input, lt.update_hidden, df, grads.update);
    Eigen::MatrixXd dprev = du.topRows(k);
    const Eigen::MatrixXd dagg = du.bottomRows(k);

    std::vector<Eigen::MatrixXd> dmsg;
    dmsg.reserve(tape.batches.size());
    for (const auto& out : lt.message_output) dmsg.push_back(Eigen::MatrixXd::Zero(out.rows(), out.cols()));
    // d smax / d x_j = exp(alpha (x_j - smax)).
    for (Eigen::Index o = 0; o < n; ++o) {
      for (const auto& e : tape.incidence[static_cast<std::size_t>(o)]) {
        auto x = lt.message_output[e.batch].col(e.column).segment(e.position * k, k).array();
        auto weight = (alpha * (x - lt.aggregate.col(o).array())).exp();
        dmsg[e.batch].col(e.column).segment(e.position * k, k).array() += dagg.col(o).array() * weight;
      }
    }
    for (std::size_t b = 0; b < tape.batches.size(); ++b) {
      const auto& batch = tape.batches[b];
      Eigen::MatrixXd dx = mlp_backward(w.message[batch.predicate], lt.message_input[b], lt.message_hidden[b], dmsg[b],
                                        grads.message[batch.predicate]);
      const auto m = static_cast<Eigen::Index>(batch.arity);
      for (Eigen::Index c = 0; c < static_cast<Eigen::Index>(batch.size()); ++c) {
        for (Eigen::Index j = 0; j < m; ++j) {
          dprev.col(batch.args[static_cast<std::size_t>(c * m + j)]) += dx.block(j * k, c, k, 1);
        }
      }
    }
    df = std::move(dprev);
  }
}

GradientSet backward(const ForwardTape& tape, const GnnParams& params) {
  GradientSet grads = GradientSet::zeros_like(params.weights());
  backward(tape, params, 1.0, grads);
  return grads;
}

std::uint64_t frame_seed(const State& state, std::uint64_t evaluation_seed) {
  // splitmix64 finalizer over the pair
  std::uint64_t z = state.hash() ^ (evaluation_seed + 0x9E3779B97F4A7C15ULL + (state.hash() << 6));
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double value_of(const GnnParams& params, std::size_t num_objects, const State& state, RngMode mode,
                std::uint64_t seed) {
  std::mt19937_64 rng(mode == RngMode::fixed_seed ? frame_seed(state, seed) : seed);
  EmbeddingFrame frame = initial_embeddings(num_objects, params.hyper(), rng);
  ForwardTape tape;
  return forward(params, num_objects, state.atoms(), frame, tape);
}

double max_relative_gradient_error(const GnnParams& params, std::size_t num_objects,
                                   std::span<const GroundAtom> atoms, const EmbeddingFrame& frame, double step) {
  ForwardTape tape;
  forward(params, num_objects, atoms, frame, tape);
  const Eigen::VectorXd analytic = backward(tape, params).flatten();

  GnnParams probe = params;
  const Eigen::VectorXd base = params.weights().flatten();
  Eigen::VectorXd shifted = base;
  double worst = 0.0;
  for (Eigen::Index i = 0; i < base.size(); ++i) {
    shifted(i) = base(i) + step;
    probe.mutable_weights().assign(shifted);
    const double plus = forward(probe, num_objects, atoms, frame, tape);
    shifted(i) = base(i) - step;
    probe.mutable_weights().assign(shifted);
    const double minus = forward(probe, num_objects, atoms, frame, tape);
    shifted(i) = base(i);
    const double numeric = (plus - minus) / (2.0 * step);
    const double denom = std::max({std::abs(analytic(i)), std::abs(numeric), 1e-6});
    worst = std::max(worst, std::abs(analytic(i) - numeric) / denom);
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

constexpr const char* kParamsMagic = "gnnplan-params";
constexpr int kParamsVersion = 1;

void write_matrix(std::ostream& out, const char* tag, const Eigen::MatrixXd& m) {
  out << tag << ' ' << m.rows() << ' ' << m.cols();
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) out << ' ' << m(r, c);
  }
  out << '\n';
}

Eigen::MatrixXd read_matrix(std::istream& in, const char* tag) {
  std::string got;
  Eigen::Index rows = 0, cols = 0;
  if (!(in >> got >> rows >> cols) || got != tag) throw std::runtime_error(std::string("params: expected ") + tag);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c) {
    for (Eigen::Index r = 0; r < rows; ++r) {
      if (!(in >> m(r, c))) throw std::runtime_error("params: truncated matrix");
    }
  }
  return m;
}

void write_mlp(std::ostream& out, const Mlp& m) {
  write_matrix(out, "w1", m.hidden.weight);
  write_matrix(out, "b1", m.hidden.bias);
  write_matrix(out, "w2", m.output.weight);
  write_matrix(out, "b2", m.output.bias);
}

Mlp read_mlp(std::istream& in) {
  Mlp m;
  m.hidden.weight = read_matrix(in, "w1");
  m.hidden.bias = read_matrix(in, "b1");
  m.output.weight = read_matrix(in, "w2");
  m.output.bias = read_matrix(in, "b2");
  return m;
}

void expect_word(std::istream& in, const std::string& word) {
  std::string got;
  if (!(in >> got) || got != word) throw std::runtime_error("params: expected '" + word + "', got '" + got + "'");
}

PredicateOrigin parse_origin(const std::string& s) {
  if (s == "base") return PredicateOrigin::base;
  if (s == "goal-version") return PredicateOrigin::goal_version;
  if (s == "derived") return PredicateOrigin::derived;
  throw std::runtime_error("params: unknown predicate origin '" + s + "'");
}

}  // namespace

void write_params(std::ostream& out, const GnnParams& params) {
  const auto old_precision = out.precision(std::numeric_limits<double>::max_digits10);
  const auto& h = params.hyper();
  out << kParamsMagic << ' ' << kParamsVersion << '\n';
  out << "hyper " << h.embedding << ' ' << h.layers << ' ' << h.alpha << ' ' << h.seed << '\n';
  out << "init " << GnnParams::kInitScheme << '\n';
  out << "predicates " << params.signature().size() << '\n';
  for (const auto& p : params.signature()) out << "p " << p.name << ' ' << p.arity << ' ' << to_string(p.origin) << '\n';
  for (const auto& m : params.weights().message) write_mlp(out, m);
  write_mlp(out, params.weights().update);
  write_mlp(out, params.weights().readout_object);
  write_mlp(out, params.weights().readout_value);
  out << "end-params\n";
  out.precision(old_precision);
}

GnnParams read_params(std::istream& in) {
  expect_word(in, kParamsMagic);
  int version = 0;
  if (!(in >> version) || version != kParamsVersion) throw std::runtime_error("params: unsupported version");
  GnnHyper h;
  expect_word(in, "hyper");
  if (!(in >> h.embedding >> h.layers >> h.alpha >> h.seed)) throw std::runtime_error("params: bad hyperparameters");
  expect_word(in, "init");
  std::string scheme;
  in >> scheme;
  if (scheme != GnnParams::kInitScheme) throw std::runtime_error("params: unknown init scheme '" + scheme + "'");
  expect_word(in, "predicates");
  std::size_t count = 0;
  in >> count;
  std::vector<PredicateSymbol> signature;
  for (std::size_t i = 0; i < count; ++i) {
    PredicateSymbol p;
    std::string origin;
    expect_word(in, "p");
    if (!(in >> p.name >> p.arity >> origin)) throw std::runtime_error("params: bad predicate line");
    p.origin = parse_origin(origin);
    signature.push_back(std::move(p));
  }
  GnnWeights w;
  for (std::size_t i = 0; i < count; ++i) w.message.push_back(read_mlp(in));
  w.update = read_mlp(in);
  w.readout_object = read_mlp(in);
  w.readout_value = read_mlp(in);
  expect_word(in, "end-params");
  const auto k = static_cast<Eigen::Index>(h.embedding);
  for (std::size_t i = 0; i < count; ++i) {
    const auto width = static_cast<Eigen::Index>(signature[i].arity) * k;
    if (w.message[i].hidden.weight.cols() != width || w.message[i].output.weight.rows() != width) {
      throw std::runtime_error("params: message MLP shape does not match predicate '" + signature[i].name + "'");
    }
  }
  if (w.update.hidden.weight.cols() != 2 * k || w.update.output.weight.rows() != k ||
      w.readout_object.hidden.weight.cols() != k || w.readout_value.output.weight.rows() != 1) {
    throw std::runtime_error("params: update/readout shapes do not match the embedding size");
  }
  return GnnParams(h, std::move(signature), std::move(w));
}

}  // namespace gnnplan
