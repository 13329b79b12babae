#include "doctest.h"
#include "support.hpp"
#include "teamq/bounds.hpp"
#include "teamq/evalsim.hpp"

using namespace teamq;
using support::example;

namespace {

struct Pipeline {
  QuantizedMDP qmdp;
  ValueIterationResult vi;
};

Pipeline small_pipeline(const TeamModel& m, std::size_t K) {
  const MemorySpec mem = MemorySpec::full(K);
  ReachableOptions o;
  o.depth = 2;
  o.budget = 12;
  Rng rng(7);
  Pipeline p;
  p.qmdp = build_quantized_mdp(m, mem, build_reachable_codebook(m, mem, o, rng), all_block_ids(m, mem),
                               GroundMetric::discrete());
  p.vi = value_iteration(p.qmdp);
  return p;
}

TeamModel with_constant_cost(double c0) {
  RawModel raw = support::example_raw();
  for (auto& row : raw.cost) std::fill(row.begin(), row.end(), c0);
  raw.beta = 0.5;
  return TeamModel::validate(raw);
}

}  // namespace

TEST_CASE("truncation horizon") {
  CHECK(truncation_horizon(1e-4, 6.06, 1e-8) == 3);
  CHECK(truncation_horizon(0.0, 5.0, 1e-8) == 1);
  CHECK(truncation_horizon(0.5, 1.0, 0.6) == 2);
  CHECK_THROWS(truncation_horizon(0.5, 1.0, 0.0));
  CHECK_THROWS(truncation_horizon(1.0, 1.0, 1e-8));
  const Pipeline p = small_pipeline(example(), 2);
  RolloutOptions o;
  o.episodes = 10;
  CHECK(rollout_cost(example(), p.qmdp, p.vi.policy, Belief::uniform(3), o).horizon == 3);
}

TEST_CASE("constant and zero cost models") {
  const TeamModel m = with_constant_cost(2.0);
  const Pipeline p = small_pipeline(m, 2);
  RolloutOptions o;
  o.episodes = 500;
  const RolloutResult r = rollout_cost(m, p.qmdp, p.vi.policy, Belief::uniform(3), o);
  // per period 2 (1 + 0.5), discounted by 0.25 per period
  CHECK(std::abs(r.mean - 3.0 / 0.75) <= o.trunc_eps);
  CHECK(r.std_error <= 1e-12);
  CHECK(p.vi.values[0] == doctest::Approx(4.0).epsilon(1e-10));

  const TeamModel z = with_constant_cost(0.0);
  const Pipeline pz = small_pipeline(z, 2);
  const RolloutResult rz = rollout_cost(z, pz.qmdp, pz.vi.policy, Belief::uniform(3), o);
  CHECK(rz.mean == 0.0);
  CHECK(rz.std_error == 0.0);
}

TEST_CASE("rollouts: seeds, workers, truncation and the VI value") {
  const TeamModel& m = example();
  const Pipeline p = small_pipeline(m, 2);
  RolloutOptions o;
  o.episodes = 20000;
  o.seed = 5;
  const RolloutResult a = rollout_cost(m, p.qmdp, p.vi.policy, Belief::uniform(3), o);
  o.workers = 3;
  const RolloutResult b = rollout_cost(m, p.qmdp, p.vi.policy, Belief::uniform(3), o);
  CHECK(a.mean == b.mean);
  CHECK(a.std_error == b.std_error);

  o.trunc_eps = 1e-4;
  o.seed = 6;
  const RolloutResult coarse = rollout_cost(m, p.qmdp, p.vi.policy, Belief::uniform(3), o);
  o.trunc_eps = 5e-5;
  o.seed = 7;
  const RolloutResult fine = rollout_cost(m, p.qmdp, p.vi.policy, Belief::uniform(3), o);
  CHECK(std::abs(coarse.mean - fine.mean) <= 3.0 * std::hypot(coarse.std_error, fine.std_error));

  // the uniform prior is the first reachable center
  CHECK(std::abs(a.mean - p.vi.values[0]) <= std::max(0.1, 4.0 * a.std_error));

  CoordinatorPolicy short_policy = p.vi.policy;
  short_policy.action.pop_back();
  CHECK_THROWS(rollout_cost(m, p.qmdp, short_policy, Belief::uniform(3), o));
  CHECK_THROWS(rollout_cost(m, p.qmdp, p.vi.policy, Belief::null(3), o));
}

TEST_CASE("stability experiment: identical priors and one-step coupling") {
  const TeamModel& m = example();
  StabilityOptions o;
  o.horizon = 6;
  o.episodes = 500;
  const auto same = predictor_stability_experiment(m, Belief::uniform(3), Belief::uniform(3), o);
  REQUIRE(same.size() == 7);
  for (const auto& g : same) CHECK(g.mean == 0.0);

  RawModel raw = support::example_raw();
  for (auto& a : raw.agents) a.channel = {{.5, .5}, {.5, .5}, {.5, .5}};
  for (std::size_t u = 0; u < raw.tau.size(); ++u)
    for (auto& row : raw.tau[u]) row = raw.tau[u][0];
  const TeamModel blind = TeamModel::validate(raw);
  const auto coupled =
      predictor_stability_experiment(blind, Belief::from_weights({.98, .01, .01}), Belief::uniform(3), o);
  CHECK(coupled[0].mean > 0.9);
  for (std::size_t t = 1; t < coupled.size(); ++t) CHECK(coupled[t].mean <= 1e-15);
}

TEST_CASE("stability experiment: determinism and absolute continuity") {
  const TeamModel& m = example();
  StabilityOptions o;
  o.horizon = 5;
  o.episodes = 300;
  o.seed = 9;
  const Belief mu = Belief::from_weights({.98, .01, .01});
  const auto a = predictor_stability_experiment(m, mu, Belief::uniform(3), o);
  o.workers = 2;
  const auto b = predictor_stability_experiment(m, mu, Belief::uniform(3), o);
  for (std::size_t t = 0; t < a.size(); ++t) {
    CHECK(a[t].mean == b[t].mean);
    CHECK(a[t].std_error == b[t].std_error);
  }
  CHECK_FALSE(absolutely_continuous(Belief::uniform(3), Belief::point_mass(3, 1)));
  CHECK(absolutely_continuous(Belief::point_mass(3, 1), Belief::uniform(3)));
  CHECK_THROWS(predictor_stability_experiment(m, Belief::uniform(3), Belief::point_mass(3, 1), o));
}

TEST_CASE("empirical predictor gaps sit under the analytic envelope") {
  const TeamModel& m = example();
  const double rho = predictor_stability_rate(m).rate;
  StabilityOptions o;
  o.horizon = 12;
  o.episodes = 3000;
  o.seed = 4;
  const Belief mu = Belief::from_weights({.98, .01, .01});
  const Belief nu = Belief::uniform(3);
  const auto gaps = predictor_stability_experiment(m, mu, nu, o);
  CHECK(gaps[0].mean == doctest::Approx(tv_distance(mu, nu)));
  for (std::size_t t = 0; t < gaps.size(); ++t) {
    CHECK(gaps[t].mean <= tv_distance(mu, nu) * std::pow(rho, double(t)) + 3.0 * gaps[t].std_error + 1e-12);
    CHECK(gaps[t].mean <= 2.0 * std::pow(rho, double(t)) + 3.0 * gaps[t].std_error + 1e-12);
  }
  // measured L_q at window M feed the explicit-sequence bound
  const std::size_t M = 4;
  std::vector<double> measured;
  for (std::size_t q = 0; M * (q + 1) < gaps.size(); ++q) measured.push_back(gaps[M * (q + 1)].mean);
  const double empirical = sliding_common_info_bound(2, m.beta(), m.cost_sup(), measured);
  CHECK(empirical <= sliding_common_info_bound_geometric(2, m.beta(), m.cost_sup(), rho, M));
}
