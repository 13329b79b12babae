#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace teamq {

using Rng = std::mt19937_64;

/// Tolerance used when checking that rows of a kernel are probability vectors.
inline constexpr double kStochasticTolerance = 1e-9;

/// One problem found while validating a model description.
struct Violation {
  std::string field;    // e.g. "tau[0,1]" or "agents[0].channel"
  long row = -1;        // offending row, -1 when not row-specific
  double observed = 0;  // observed row sum or offending value
  std::string message;
};

class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(std::vector<Violation> violations);
  const std::vector<Violation>& violations() const noexcept { return violations_; }

 private:
  std::vector<Violation> violations_;
};

/// Unvalidated per-agent description.
struct RawAgent {
  std::size_t n_actions = 0;
  std::size_t n_measurements = 0;
  /// channel[x][y] = Q^i(y | x)
  std::vector<std::vector<double>> channel;
};

/// Unvalidated model description. Joint actions are indexed in mixed radix with
/// agent 0 as the most significant digit, i.e. the lexicographic order of the
/// tuples (u^1, ..., u^N).
struct RawModel {
  std::size_t n_states = 0;
  std::vector<RawAgent> agents;
  /// tau[joint_action][x][x'] = P(x' | x, u)
  std::vector<std::vector<std::vector<double>>> tau;
  /// cost[joint_action][x] = c(x, u)
  std::vector<std::vector<double>> cost;
  double beta = 0.0;
  std::vector<double> initial;
};

/// A validated finite team problem. Immutable; safe to share between threads.
class TeamModel {
 public:
  /// Throws ValidationError listing every violated invariant.
  static TeamModel validate(const RawModel& raw);

  std::size_t n_states() const noexcept { return n_states_; }
  std::size_t n_agents() const noexcept { return n_actions_.size(); }
  std::size_t n_actions(std::size_t agent) const { return n_actions_.at(agent); }
  std::size_t n_measurements(std::size_t agent) const { return n_measurements_.at(agent); }
  std::size_t n_joint_actions() const noexcept { return n_joint_actions_; }
  std::size_t n_joint_measurements() const noexcept { return n_joint_measurements_; }
  double beta() const noexcept { return beta_; }
  std::span<const double> initial() const noexcept { return initial_; }

  /// tau(. | x, u) as a row over next states.
  std::span<const double> transition(std::size_t x, std::size_t joint_action) const;
  double channel(std::size_t agent, std::size_t x, std::size_t y) const;
  /// prod_i Q^i(y^i | x) for a joint measurement index.
  double likelihood(std::size_t x, std::size_t joint_measurement) const {
    return likelihood_[x * n_joint_measurements_ + joint_measurement];
  }
  /// Joint channel row Q(. | x) over joint measurement indices.
  std::span<const double> joint_channel(std::size_t x) const;
  double cost(std::size_t x, std::size_t joint_action) const;
  /// max_{x,u} c(x,u)
  double cost_sup() const noexcept { return cost_sup_; }

  std::size_t encode_actions(std::span<const std::size_t> actions) const;
  std::size_t encode_measurements(std::span<const std::size_t> measurements) const;
  std::vector<std::size_t> decode_actions(std::size_t joint_action) const;
  std::vector<std::size_t> decode_measurements(std::size_t joint_measurement) const;
  /// Component of agent `agent` in a joint measurement index (table lookup).
  std::size_t measurement_of(std::size_t joint_measurement, std::size_t agent) const {
    return measurement_digits_[joint_measurement * n_agents() + agent];
  }

  const RawModel& raw() const noexcept { return raw_; }

 private:
  TeamModel() = default;

  RawModel raw_;
  std::size_t n_states_ = 0;
  std::vector<std::size_t> n_actions_;
  std::vector<std::size_t> n_measurements_;
  std::size_t n_joint_actions_ = 0;
  std::size_t n_joint_measurements_ = 0;
  double beta_ = 0.0;
  std::vector<double> initial_;
  std::vector<double> tau_;         // [u][x][x']
  std::vector<double> cost_;        // [x][u]
  std::vector<double> likelihood_;  // [x][jy]
  std::vector<std::size_t> measurement_digits_;  // [jy][agent]
  double cost_sup_ = 0.0;
};

/// Draws an index from a probability vector.
std::size_t sample_index(std::span<const double> probabilities, Rng& rng);

/// x_{t+1} ~ tau(. | x, u)
std::size_t step(const TeamModel& model, std::size_t state, std::size_t joint_action, Rng& rng);

/// Joint measurement index with each y^i drawn independently from Q^i(. | x).
std::size_t observe_index(const TeamModel& model, std::size_t state, Rng& rng);

/// Per-agent measurements (y^1, ..., y^N).
std::vector<std::size_t> observe(const TeamModel& model, std::size_t state, Rng& rng);

double stage_cost(const TeamModel& model, std::size_t state, std::size_t joint_action);

}  // namespace teamq
