#include "doctest.h"
#include "support.hpp"
#include "teamq/coordinator.hpp"

using namespace teamq;
using support::example;

namespace {
std::size_t pair_index(std::size_t a, std::size_t b) {
  const std::size_t v[2] = {a, b};
  return example().encode_actions(v);
}
std::size_t obs(std::size_t a, std::size_t b) {
  const std::size_t v[2] = {a, b};
  return example().encode_measurements(v);
}
}  // namespace

TEST_CASE("predictor update on the example") {
  const TeamModel& m = example();
  const Belief Z = Belief::uniform(3);
  const Belief F = predictor_update(m, Z, pair_index(0, 0), obs(0, 0));
  REQUIRE_FALSE(F.is_null());
  CHECK(F[0] == doctest::Approx(0.0));
  CHECK(F[1] == doctest::Approx(0.5));
  CHECK(F[2] == doctest::Approx(0.5));
  const auto oracle = support::path_predictor(m, {1. / 3, 1. / 3, 1. / 3}, {pair_index(0, 0)}, {obs(0, 0)});
  CHECK(support::linf(F.weights(), oracle) < 1e-15);

  // zero likelihood gives the null belief
  CHECK(predictor_update(m, Belief::point_mass(3, 1), pair_index(1, 0), obs(0, 1)).is_null());
  CHECK_THROWS(predictor_update(m, Belief::null(3), 0, 0));
}

TEST_CASE("point-mass prior with positive likelihood pushes through tau") {
  const TeamModel& m = example();
  for (std::size_t u = 0; u < 4; ++u)
    for (std::size_t y = 0; y < 4; ++y) {
      const Belief F = predictor_update(m, Belief::point_mass(3, 0), u, y);
      for (std::size_t x = 0; x < 3; ++x) CHECK(F[x] == doctest::Approx(m.transition(0, u)[x]));
    }
}

TEST_CASE("filter update") {
  const TeamModel& m = example();
  const Belief f = filter_update(m, Belief::from_weights({0, .5, .5}), pair_index(0, 1), obs(0, 0));
  CHECK(f[0] == doctest::Approx(1.0));

  // uninformative channels reduce the filter to the pushforward
  RawModel raw = support::example_raw();
  for (auto& a : raw.agents) a.channel = {{.5, .5}, {.5, .5}, {.5, .5}};
  const TeamModel flat = TeamModel::validate(raw);
  Rng rng(4);
  for (int k = 0; k < 20; ++k) {
    const Belief p = support::random_belief(3, rng);
    for (std::size_t u = 0; u < 4; ++u) {
      const Belief g = filter_update(flat, p, u, 3);
      for (std::size_t x1 = 0; x1 < 3; ++x1) {
        double push = 0.0;
        for (std::size_t x = 0; x < 3; ++x) push += p[x] * flat.transition(x, u)[x1];
        CHECK(g[x1] == doctest::Approx(push).epsilon(1e-12));
      }
    }
  }
  CHECK(filter_update(m, Belief::point_mass(3, 1), pair_index(0, 0), obs(1, 0)).is_null() == false);
  CHECK(filter_update(m, Belief::point_mass(3, 0), pair_index(0, 0), obs(0, 0)).is_null());
}

TEST_CASE("k-step update equals composition and the path-space oracle") {
  const TeamModel& m = example();
  const Belief u3 = Belief::uniform(3);
  const std::size_t acts[2] = {pair_index(0, 0), pair_index(0, 0)};
  const std::size_t ys[2] = {obs(0, 0), obs(1, 1)};
  const Belief G = k_step_update(m, u3, acts, ys);
  const Belief twice = predictor_update(m, predictor_update(m, u3, acts[0], ys[0]), acts[1], ys[1]);
  CHECK(support::linf(G.weights(), {twice.weights().begin(), twice.weights().end()}) < 1e-15);
  const auto oracle = support::path_predictor(m, {1. / 3, 1. / 3, 1. / 3}, {acts[0], acts[1]}, {ys[0], ys[1]});
  CHECK(support::linf(G.weights(), oracle) < 1e-12);

  const std::size_t one_u[1] = {2};
  const std::size_t one_y[1] = {3};
  const Belief K1 = k_step_update(m, u3, one_u, one_y);
  const Belief F = predictor_update(m, u3, 2, 3);
  CHECK(support::linf(K1.weights(), {F.weights().begin(), F.weights().end()}) == 0.0);

  const std::size_t bad_y[2] = {obs(0, 1), obs(1, 1)};
  CHECK(k_step_update(m, Belief::point_mass(3, 2), acts, bad_y).is_null());
  const std::size_t short_y[1] = {0};
  CHECK_THROWS(k_step_update(m, u3, acts, short_y));
}

TEST_CASE("k-step update splits at any point") {
  Rng rng(8);
  for (int trial = 0; trial < 30; ++trial) {
    const TeamModel m = TeamModel::validate(support::random_raw(rng));
    const Belief p = support::random_belief(m.n_states(), rng);
    std::vector<std::size_t> u(4), y(4);
    for (auto& v : u) v = std::uniform_int_distribution<std::size_t>(0, m.n_joint_actions() - 1)(rng);
    for (auto& v : y) v = std::uniform_int_distribution<std::size_t>(0, m.n_joint_measurements() - 1)(rng);
    const Belief all = k_step_update(m, p, u, y);
    for (std::size_t a = 1; a < 4; ++a) {
      const Belief head = k_step_update(m, p, std::span(u).first(a), std::span(y).first(a));
      if (head.is_null()) {
        CHECK(all.is_null());
        continue;
      }
      const Belief tail = k_step_update(m, head, std::span(u).subspan(a), std::span(y).subspan(a));
      CHECK(all.is_null() == tail.is_null());
      if (!all.is_null())
        CHECK(support::linf(all.weights(), {tail.weights().begin(), tail.weights().end()}) < 1e-12);
    }
  }
}

TEST_CASE("unnormalized updates recompose the prior predictive") {
  const TeamModel& m = example();
  Rng rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    const Belief Z = support::random_belief(3, rng, 0.3);
    for (std::size_t u = 0; u < 4; ++u) {
      std::vector<double> lhs(3, 0.0), rhs(3, 0.0);
      for (std::size_t y = 0; y < 4; ++y) {
        double norm = 0.0;
        for (std::size_t x = 0; x < 3; ++x) norm += m.likelihood(x, y) * Z[x];
        if (norm == 0.0) continue;
        const Belief F = predictor_update(m, Z, u, y);
        for (std::size_t x1 = 0; x1 < 3; ++x1) lhs[x1] += norm * F[x1];
      }
      for (std::size_t x = 0; x < 3; ++x)
        for (std::size_t x1 = 0; x1 < 3; ++x1) rhs[x1] += Z[x] * m.transition(x, u)[x1];
      for (std::size_t x1 = 0; x1 < 3; ++x1) CHECK(lhs[x1] == doctest::Approx(rhs[x1]).epsilon(1e-13));
    }
  }
}

TEST_CASE("predictor outputs are null or probability vectors") {
  Rng rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    const TeamModel m = TeamModel::validate(support::random_raw(rng));
    const Belief Z = support::random_belief(m.n_states(), rng, 0.3);
    for (std::size_t u = 0; u < m.n_joint_actions(); ++u)
      for (std::size_t y = 0; y < m.n_joint_measurements(); ++y) {
        const Belief F = predictor_update(m, Z, u, y);
        if (F.is_null()) {
          for (double w : F.weights()) CHECK(w == 0.0);
          continue;
        }
        double s = 0.0;
        for (double w : F.weights()) {
          CHECK(w >= 0.0);
          s += w;
        }
        CHECK(std::abs(s - 1.0) <= 1e-9);
      }
  }
}

TEST_CASE("simulated histories reproduce the predictor") {
  // bin 10^5 simulated episodes by their (u, y) history under a fixed block
  const TeamModel& m = example();
  const PrescriptionSpace space(m, MemorySpec::full(1));
  const JointPrescriptionBlock block = space.decode(6);
  Rng rng(17);
  const std::size_t n = 100000;
  std::vector<std::vector<double>> counts(4, std::vector<double>(3, 0.0));
  std::vector<double> totals(4, 0.0);
  for (std::size_t e = 0; e < n; ++e) {
    const std::size_t x0 = sample_index(m.initial(), rng);
    const PeriodSample p = simulate_period(m, block, x0, rng);
    counts[p.measurements[0]][p.states[1]] += 1.0;
    totals[p.measurements[0]] += 1.0;
  }
  for (std::size_t y = 0; y < 4; ++y) {
    if (totals[y] == 0.0) continue;
    const std::size_t hist[1] = {y};
    const std::size_t act[1] = {block.joint_action(m, 0, hist)};
    const Belief G = k_step_update(m, Belief::uniform(3), act, hist);
    for (std::size_t x = 0; x < 3; ++x) {
      const double p = G[x];
      const double sigma = std::sqrt(p * (1 - p) / totals[y]);
      CHECK(std::abs(counts[y][x] / totals[y] - p) <= 3.0 * sigma + 1e-12);
    }
  }
}

TEST_CASE("total variation") {
  const Belief a = Belief::from_weights({.5, .5, 0});
  const Belief b = Belief::from_weights({0, .5, .5});
  CHECK(tv_distance(a, a) == 0.0);
  CHECK(tv_distance(Belief::point_mass(3, 0), Belief::point_mass(3, 1)) == 2.0);
  CHECK(tv_distance(a, b) == doctest::Approx(1.0));
  CHECK_THROWS(tv_distance(a, Belief::null(3)));
}

TEST_CASE("Wasserstein distance") {
  const Belief d0 = Belief::point_mass(2, 0), d1 = Belief::point_mass(2, 1);
  CHECK(w1_distance(d0, d1, GroundMetric::line()) == 1.0);
  CHECK(w1_distance(d0, d0, GroundMetric::discrete()) == 0.0);
  CHECK_THROWS(w1_distance(d0, Belief::null(2), GroundMetric::discrete()));
  CHECK_THROWS(GroundMetric::matrix({{0, 1, 5}, {1, 0, 1}, {5, 1, 0}}));

  Rng rng(2);
  const GroundMetric line_as_matrix = GroundMetric::matrix({{0, 1, 2, 3}, {1, 0, 1, 2}, {2, 1, 0, 1}, {3, 2, 1, 0}});
  const GroundMetric disc_as_matrix = GroundMetric::matrix({{0, 1, 1, 1}, {1, 0, 1, 1}, {1, 1, 0, 1}, {1, 1, 1, 0}});
  for (int k = 0; k < 200; ++k) {
    const Belief a = support::random_belief(4, rng, 0.3);
    const Belief b = support::random_belief(4, rng, 0.3);
    const Belief c = support::random_belief(4, rng, 0.3);
    CHECK(w1_distance(a, b, GroundMetric::discrete()) == doctest::Approx(tv_distance(a, b) / 2).epsilon(1e-12));
    CHECK(w1_distance(a, b, disc_as_matrix) == doctest::Approx(tv_distance(a, b) / 2).epsilon(1e-9));
    CHECK(w1_distance(a, b, line_as_matrix) == doctest::Approx(w1_distance(a, b, GroundMetric::line())).epsilon(1e-9));
    for (const GroundMetric& g : {GroundMetric::discrete(), GroundMetric::line()}) {
      CHECK(w1_distance(a, b, g) == doctest::Approx(w1_distance(b, a, g)));
      CHECK(w1_distance(a, c, g) <= w1_distance(a, b, g) + w1_distance(b, c, g) + 1e-12);
    }
    CHECK(tv_distance(a, c) <= tv_distance(a, b) + tv_distance(b, c) + 1e-12);
  }
}
