#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "teamq/team_model.hpp"

namespace teamq {

/// Probability vector over states, or the null belief produced when a Bayes
/// normalizer vanishes (all weights zero).
class Belief {
 public:
  Belief() = default;

  /// Validates nonnegativity and unit mass (1e-9), then renormalizes.
  static Belief from_weights(std::vector<double> weights);
  /// Normalizes an unnormalized nonnegative vector; null when the mass is zero.
  static Belief normalize(std::vector<double> unnormalized);
  /// Validates like from_weights but keeps the weights bit-for-bit (artifact reload).
  static Belief restore(std::vector<double> weights);
  static Belief null(std::size_t n_states);
  static Belief point_mass(std::size_t n_states, std::size_t state);
  static Belief uniform(std::size_t n_states);

  bool is_null() const noexcept { return is_null_; }
  std::size_t size() const noexcept { return weights_.size(); }
  std::span<const double> weights() const noexcept { return weights_; }
  double operator[](std::size_t i) const { return weights_[i]; }

 private:
  std::vector<double> weights_;
  bool is_null_ = true;
};

/// max_x |a(x) - b(x)|; used for de-duplicating beliefs.
double sup_distance(const Belief& a, const Belief& b);

/// F(Z, u, y): reweight by prod_i h(x, y^i), normalize, push through tau(. | x, u).
Belief predictor_update(const TeamModel& model, const Belief& predictor, std::size_t joint_action,
                        std::size_t joint_measurement);

/// Filter recursion: push through tau(. | x, u), then reweight by the likelihood
/// of the next joint measurement.
Belief filter_update(const TeamModel& model, const Belief& filter, std::size_t joint_action,
                     std::size_t next_joint_measurement);

/// K-fold composition of predictor_update; null as soon as a normalizer vanishes.
Belief k_step_update(const TeamModel& model, const Belief& predictor, std::span<const std::size_t> joint_actions,
                     std::span<const std::size_t> joint_measurements);

/// Total variation with the 2*sup convention: sum_x |a(x) - b(x)|, in [0, 2].
double tv_distance(const Belief& a, const Belief& b);

/// Ground metric on the state alphabet for Wasserstein distances.
class GroundMetric {
 public:
  enum class Kind { kDiscrete, kLine, kMatrix };

  /// d(x, x') = 1 for x != x'.
  static GroundMetric discrete();
  /// d(x, x') = |x - x'| on integer state labels.
  static GroundMetric line();
  /// Arbitrary metric; validated (symmetric, zero diagonal, positive off-diagonal,
  /// triangle inequality).
  static GroundMetric matrix(std::vector<std::vector<double>> distances);

  Kind kind() const noexcept { return kind_; }
  double distance(std::size_t x, std::size_t y) const;
  const char* name() const noexcept;

 private:
  Kind kind_ = Kind::kDiscrete;
  std::vector<std::vector<double>> distances_;
};

/// Order-one Wasserstein distance. Closed forms for the discrete metric (half the
/// l1 distance) and the line metric (l1 distance of the CDFs); the matrix metric
/// solves the transport program exactly.
double w1_distance(const Belief& a, const Belief& b, const GroundMetric& metric);

/// Optimal transport cost between two mass vectors of equal total mass under the
/// given cost matrix, by successive shortest augmenting paths.
double transport_cost(std::span<const double> supply, std::span<const double> demand,
                      const std::vector<std::vector<double>>& cost);

}  // namespace teamq
