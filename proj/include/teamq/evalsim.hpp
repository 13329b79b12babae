#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "teamq/belief.hpp"
#include "teamq/coordinator.hpp"
#include "teamq/quantizer.hpp"
#include "teamq/solver.hpp"
#include "teamq/team_model.hpp"

namespace teamq {

/// Smallest Q with discount^Q * cost_bound / (1 - discount) < trunc_eps.
std::size_t truncation_horizon(double discount, double cost_bound, double trunc_eps);

struct RolloutOptions {
  std::uint64_t episodes = 100000;
  double trunc_eps = 1e-8;
  std::uint64_t seed = 1;
  std::size_t workers = 1;
};

struct RolloutResult {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t horizon = 0;  // periods simulated per episode
  std::uint64_t episodes = 0;
};

/// Monte Carlo cost of a coordinator policy on the true system. Each episode
/// starts from the prior `start` (x_0 drawn from it), tracks the exact
/// predictor, quantizes it, and plays the chosen block on realized private
/// measurements. Episode e uses its own generator seeded from (seed, e).
RolloutResult rollout_cost(const TeamModel& model, const QuantizedMDP& qmdp, const CoordinatorPolicy& policy,
                           const Belief& start, const RolloutOptions& options);

struct GapEstimate {
  double mean = 0.0;
  double std_error = 0.0;
};

struct StabilityOptions {
  std::size_t horizon = 12;  // T
  std::uint64_t episodes = 10000;
  std::uint64_t seed = 1;
  std::size_t workers = 1;
};

/// Paired one-step predictors from priors mu (true) and nu driven by the same
/// trajectory under uniformly random one-stage prescriptions; entry t is the
/// estimate of E ||pi^mu_t - pi^nu_t||_TV for t = 0..T. Throws unless mu << nu.
std::vector<GapEstimate> predictor_stability_experiment(const TeamModel& model, const Belief& mu, const Belief& nu,
                                                        const StabilityOptions& options);

/// Exact E^mu over the first joint measurement of tv(F(mu, u, y), F(nu, u, y))
/// when u = block's stage-0 action on y.
double expected_one_step_gap(const TeamModel& model, const Belief& mu, const Belief& nu,
                             const JointPrescriptionBlock& block);

/// True when nu(x) > 0 wherever mu(x) > 0.
bool absolutely_continuous(const Belief& mu, const Belief& nu);

}  // namespace teamq
