#include "doctest.h"
#include "support.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "gnnplan/derived.hpp"
#include "gnnplan/gnn.hpp"
#include "gnnplan/gradcheck.hpp"

using namespace gnnplan;

namespace {

GnnHyper small_hyper(std::uint64_t seed = 1) {
  GnnHyper h;
  h.embedding = 6;
  h.layers = 3;
  h.seed = seed;
  return h;
}

double run(const GnnParams& p, std::size_t n, const State& s, std::uint64_t frame_seed, ForwardTape& tape) {
  std::mt19937_64 rng(frame_seed);
  auto frame = initial_embeddings(n, p.hyper(), rng);
  return forward(p, n, s.atoms(), frame, tape);
}

}  // namespace

TEST_CASE("message MLP shapes follow predicate arity") {
  Domain d = parse_domain("(define (domain d) (:predicates (on ?x ?y)))");
  GnnHyper h;
  h.embedding = 4;
  GnnParams p = init_params(d, h);
  const Mlp& m = p.weights().message[0];
  CHECK(m.input_size() == 8);
  CHECK(m.output_size() == 8);
  CHECK(p.weights().update.input_size() == 8);
  CHECK(p.weights().update.output_size() == 4);
  CHECK(p.weights().readout_value.output_size() == 1);
  for (const Dense* dense : {&m.hidden, &m.output}) CHECK(dense->bias.isZero());
}

TEST_CASE("initialization is deterministic in the seed") {
  Domain d = parse_domain(bench::domain_pddl("blocks"));
  auto a = init_params(d, small_hyper(3)).weights().flatten();
  auto b = init_params(d, small_hyper(3)).weights().flatten();
  auto c = init_params(d, small_hyper(4)).weights().flatten();
  CHECK(a == b);
  CHECK(a != c);
}

TEST_CASE("parameter count for augmented blocks at k=64") {
  Domain d = augment_domain(parse_domain(bench::domain_pddl("blocks")), augmentation_preset("blocks-above"));
  GnnHyper h;
  h.embedding = 64;
  h.layers = 1;
  GnnParams p = init_params(d, h);
  // arities: on, on@, above -> 2; ontable, clear, holding and their goal
  // versions -> 1; handempty, handempty@ -> 0.
  // 3 * (2*128^2 + 2*128) + 6 * (2*64^2 + 2*64) + (6*64^2 + 3*64) + (2*64^2 + 2*64) + (64^2 + 2*64 + 1)
  CHECK(p.weights().parameter_count() == 186305);
  CHECK(expected_parameter_count(d.predicates, 64) == 186305);
  CHECK(p.weights().flatten().size() == 186305);
}

TEST_CASE("odd embedding size is rejected") {
  Domain d = parse_domain(bench::domain_pddl("blocks"));
  GnnHyper h;
  h.embedding = 5;
  CHECK_THROWS_AS(init_params(d, h), std::invalid_argument);
  h.embedding = 4;
  h.layers = 0;
  CHECK_THROWS_AS(init_params(d, h), std::invalid_argument);
  h.layers = 1;
  h.alpha = 0;
  CHECK_THROWS_AS(init_params(d, h), std::invalid_argument);
}

TEST_CASE("initial embeddings") {
  GnnHyper h = small_hyper();
  std::mt19937_64 rng(9), again(9);
  auto f = initial_embeddings(5, h, rng);
  CHECK(f.objects() == 5);
  CHECK(f.dimension() == 6);
  CHECK(f.embeddings.topRows(3).isZero(0.0));
  CHECK(f.embeddings == initial_embeddings(5, h, again).embeddings);

  std::mt19937_64 big(1);
  GnnHyper two;
  two.embedding = 2;
  auto many = initial_embeddings(10000, two, big);
  const double mean = many.embeddings.row(1).mean();
  CHECK(mean > -0.05);
  CHECK(mean < 0.05);
}

TEST_CASE("smooth max") {
  const double one[] = {1.7};
  CHECK(smax(one, 8.0) == doctest::Approx(1.7).epsilon(1e-15));
  const double zeros[] = {0.0, 0.0};
  CHECK(smax(zeros, 8.0) == doctest::Approx(std::log(2.0) / 8.0).epsilon(1e-14));
  CHECK(std::abs(smax(zeros, 8.0) - 0.0866434) < 1e-7);
  CHECK_THROWS_AS(smax(std::span<const double>{}, 8.0), std::invalid_argument);

  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1000.0, 1000.0);
  for (int t = 0; t < 200; ++t) {
    std::vector<double> xs(1 + rng() % 10);
    for (auto& x : xs) x = u(rng);
    const double alpha = 0.5 + (rng() % 16);
    const double m = *std::max_element(xs.begin(), xs.end());
    const double s = smax(xs, alpha);
    CHECK(s >= m);
    CHECK(s <= m + std::log(static_cast<double>(xs.size())) / alpha + 1e-12);
  }
}

TEST_CASE("objects in no atom and the empty state") {
  Domain d = parse_domain(bench::domain_pddl("blocks"));
  GnnParams p = init_params(d, small_hyper());
  ForwardTape tape;
  const double v = run(p, 1, State{}, 5, tape);
  CHECK(std::isfinite(v));
  ForwardTape tape2;
  CHECK(run(p, 1, State{}, 5, tape2) == v);
  CHECK(tape.layers[0].aggregate.isZero(0.0));

  GradientSet g = backward(tape, p);
  for (const auto& m : g.message) {
    CHECK(m.hidden.weight.isZero(0.0));
    CHECK(m.output.weight.isZero(0.0));
    CHECK(m.hidden.bias.isZero(0.0));
    CHECK(m.output.bias.isZero(0.0));
  }
  CHECK(g.readout_value.output.bias(0) == 1.0);
}

TEST_CASE("zero parameters give zero value") {
  auto task = testing::bench_task("blocks", bench::blocks_instance(4, 1));
  GnnParams p = init_params(task.domain(), small_hyper());
  p.mutable_weights() *= 0.0;
  ForwardTape tape;
  CHECK(run(p, 4, task.initial_state(), 2, tape) == 0.0);
}

TEST_CASE("gradient of V with respect to the last bias is one") {
  auto task = testing::bench_task("gripper", bench::gripper_instance(2));
  GnnParams p = init_params(task.domain(), small_hyper());
  ForwardTape tape;
  run(p, task.instance().objects.size(), task.initial_state(), 1, tape);
  CHECK(backward(tape, p).readout_value.output.bias(0) == 1.0);
}

TEST_CASE("stale tapes are rejected") {
  auto task = testing::bench_task("gripper", bench::gripper_instance(1));
  GnnParams p = init_params(task.domain(), small_hyper());
  ForwardTape tape;
  run(p, task.instance().objects.size(), task.initial_state(), 1, tape);
  p.mutable_weights();
  CHECK_THROWS_AS(backward(tape, p), StaleTape);
  GnnParams copy = p;
  CHECK_THROWS_AS(backward(tape, copy), StaleTape);
}

TEST_CASE("unknown predicates and objects are rejected") {
  auto task = testing::bench_task("gripper", bench::gripper_instance(1));
  GnnParams p = init_params(task.domain(), small_hyper());
  ForwardTape tape;
  State bad_pred(std::vector<GroundAtom>{GroundAtom{99, {0}}});
  CHECK_THROWS_AS(run(p, 3, bad_pred, 0, tape), std::invalid_argument);
  State bad_obj(std::vector<GroundAtom>{GroundAtom{*task.domain().find_predicate("free"), {7}}});
  CHECK_THROWS_AS(run(p, 3, bad_obj, 0, tape), std::invalid_argument);
}

TEST_CASE("every aggregate lies between the max and max + ln(n)/alpha") {
  auto task = testing::bench_task("blocks", bench::blocks_instance(4, 3));
  GnnParams p = init_params(task.domain(), small_hyper());
  ForwardTape tape;
  run(p, 4, task.initial_state(), 7, tape);
  const auto k = static_cast<Eigen::Index>(p.hyper().embedding);
  for (const auto& layer : tape.layers) {
    for (std::size_t o = 0; o < tape.num_objects; ++o) {
      const auto& inc = tape.incidence[o];
      if (inc.empty()) continue;
      for (Eigen::Index c = 0; c < k; ++c) {
        double m = -1e300;
        for (const auto& e : inc) m = std::max(m, layer.message_output[e.batch](e.position * k + c, e.column));
        const double agg = layer.aggregate(c, static_cast<Eigen::Index>(o));
        CHECK(agg >= m - 1e-12);
        CHECK(agg <= m + std::log(static_cast<double>(inc.size())) / p.hyper().alpha + 1e-12);
      }
    }
  }
}

TEST_CASE("jointly permuting objects and random halves leaves V unchanged") {
  auto task = testing::bench_task("delivery", bench::delivery_instance(3, 2, 4));
  GnnParams p = init_params(task.domain(), small_hyper(5));
  const std::size_t n = task.instance().objects.size();
  std::mt19937_64 rng(8);
  for (int t = 0; t < 10; ++t) {
    State s = task.initial_state();
    std::vector<ObjectId> pi(n);
    std::iota(pi.begin(), pi.end(), 0);
    std::shuffle(pi.begin(), pi.end(), rng);
    std::vector<GroundAtom> moved;
    for (auto a : s.atoms()) {
      for (auto& o : a.args) o = pi[o];
      moved.push_back(a);
    }
    auto frame = initial_embeddings(n, p.hyper(), rng);
    EmbeddingFrame permuted{Eigen::MatrixXd(frame.embeddings.rows(), frame.embeddings.cols())};
    for (std::size_t o = 0; o < n; ++o) permuted.embeddings.col(pi[o]) = frame.embeddings.col(o);
    ForwardTape t1, t2;
    const double v1 = forward(p, n, s.atoms(), frame, t1);
    State ps(moved);
    const double v2 = forward(p, n, ps.atoms(), permuted, t2);
    CHECK(std::abs(v1 - v2) < 1e-9);
  }
}

TEST_CASE("value_of modes") {
  auto task = testing::bench_task("gripper", bench::gripper_instance(2));
  GnnParams p = init_params(task.domain(), small_hyper());
  const std::size_t n = task.instance().objects.size();
  State s = task.initial_state();
  CHECK(value_of(p, n, s, RngMode::fixed_seed, 3) == value_of(p, n, s, RngMode::fixed_seed, 3));

  double sum = 0.0, sq = 0.0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const double v = value_of(p, n, s, RngMode::stochastic, seed);
    sum += v;
    sq += v * v;
  }
  const double variance = sq / 100 - (sum / 100) * (sum / 100);
  CHECK(std::isfinite(variance));
  MESSAGE("stochastic-mode variance over 100 seeds: " << variance);

  Augmenter aug(task.domain(), augmentation_preset("goal-versions"));
  GnnParams pa = init_params(aug.domain(), small_hyper());
  State plain = aug.augment(s, task.instance());
  Instance other = task.instance();
  other.goal.clear();
  State no_goal = aug.augment(s, other);
  CHECK(plain.size() > no_goal.size());
  CHECK(value_of(pa, n, plain, RngMode::fixed_seed, 0) != value_of(pa, n, no_goal, RngMode::fixed_seed, 0));
}

TEST_CASE("forward works for object counts never seen before") {
  Domain d = parse_domain(bench::domain_pddl("gripper"));
  GnnParams p = init_params(d, small_hyper());
  for (std::size_t balls : {1, 5, 20}) {
    GroundTask task(d, parse_instance(bench::gripper_instance(balls), d));
    const double v = value_of(p, task.instance().objects.size(), task.initial_state(), RngMode::fixed_seed, 0);
    CHECK(std::isfinite(v));
  }
}

TEST_CASE("parameter file round trip and signature checks") {
  Domain d = augment_domain(parse_domain(bench::domain_pddl("spanner")), augmentation_preset("spanner-linkplus"));
  GnnParams p = init_params(d, small_hyper(11));
  std::stringstream io;
  write_params(io, p);
  GnnParams q = read_params(io);
  CHECK(q.hyper() == p.hyper());
  CHECK(q.signature() == p.signature());
  CHECK(q.weights().flatten() == p.weights().flatten());
  CHECK_NOTHROW(q.check_signature(d));
  CHECK_THROWS_AS(q.check_signature(parse_domain(bench::domain_pddl("spanner"))), std::invalid_argument);

  std::stringstream bad("gnnplan-params 2\n");
  CHECK_THROWS(read_params(bad));
}

TEST_CASE("flatten and assign are inverse") {
  Domain d = parse_domain(bench::domain_pddl("blocks"));
  GnnParams p = init_params(d, small_hyper());
  Eigen::VectorXd flat = p.weights().flatten();
  GnnWeights w = GnnWeights::zeros_like(p.weights());
  w.assign(flat);
  CHECK(w.flatten() == flat);
  CHECK_THROWS_AS(w.assign(Eigen::VectorXd::Zero(3)), std::invalid_argument);
}

TEST_CASE("finite differences agree with backward on a small suite") {
  auto report = gradient_check_suite(2, 4, 2);
  CHECK(report.cases == 8);
  CHECK(report.max_error < 1e-4);
}

TEST_CASE("finite differences on a benchmark state with an unrounded network") {
  auto task = testing::bench_task("blocks", bench::blocks_instance(3, 0));
  GnnParams p = init_params(task.domain(), small_hyper(2));
  Eigen::VectorXd flat = p.weights().flatten();
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(-0.3, 0.3);
  for (Eigen::Index i = 0; i < flat.size(); ++i) flat(i) += 0.1 * u(rng);
  p.mutable_weights().assign(flat);
  auto frame = initial_embeddings(3, p.hyper(), rng);
  CHECK(max_relative_gradient_error(p, 3, task.initial_state().atoms(), frame) < 1e-4);
}
