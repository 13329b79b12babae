#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "teamq/team_model.hpp"

namespace teamq {

/// Row-stochastic matrix: rows are inputs, columns outputs.
using KernelMatrix = std::vector<std::vector<double>>;

/// Throws std::invalid_argument unless every row is a probability vector.
void check_kernel(const KernelMatrix& kernel);

/// min over input pairs of sum_z min(K(z|x), K(z|y)); 1 for a single input.
double dobrushin(const KernelMatrix& kernel);

/// Joint channel Q(y^1..y^N | x) with joint measurement indices as columns.
KernelMatrix joint_channel_kernel(const TeamModel& model);

/// tau(. | ., u) for one joint action.
KernelMatrix transition_kernel(const TeamModel& model, std::size_t joint_action);

/// min over joint actions of dobrushin(tau(. | ., u)).
double delta_tilde_tau(const TeamModel& model);

struct StabilityRate {
  double delta_q = 0.0;
  double delta_tilde_tau = 0.0;
  double rate = 0.0;  // (2 - delta_q)(1 - delta_tilde_tau)
  bool certified() const noexcept { return rate < 1.0; }
};

StabilityRate predictor_stability_rate(const TeamModel& model);

enum class MixingMode {
  kTx,    // rows u -> law of (x_1, y_1) from x
  kTauX,  // rows u -> tau(. | x, u)
};

/// min over x of the Dobrushin coefficient of the per-state kernel indexed by
/// joint actions. Exact for deterministic prescriptions.
double joint_mixing_delta_bar(const TeamModel& model, MixingMode mode);

/// Err(t, m) = 2 sum_{j=t}^{K-1} beta^j (1 - delta_bar)^{t-m+1} ||c||.
double err_bound(std::size_t t, std::size_t m, std::size_t K, double beta, double delta_bar, double cost_sup);

struct MemorySchedule {
  std::vector<std::size_t> stages;   // strictly increasing, in 1..K-1
  std::vector<std::size_t> windows;  // window start per stage, 1 <= m_k <= t_k

  bool empty() const noexcept { return stages.empty(); }
  std::string describe() const;
};

void check_schedule(const MemorySchedule& schedule, std::size_t K);

/// Window starts per stage of a period (0 where unrestricted).
std::vector<std::size_t> schedule_window_starts(const MemorySchedule& schedule, std::size_t K);

double multi_err_bound(const MemorySchedule& schedule, std::size_t K, double beta, double delta_bar, double cost_sup);

struct SlidingWindowBound {
  double raw = 0.0;          // the closed form as written
  double certificate = 0.0;  // max(raw, 0)
};

/// Closed form of the finite-memory (window m) loss bound over horizon K.
SlidingWindowBound sliding_window_bound(std::size_t m, std::size_t K, double beta, double delta_bar,
                                        double cost_sup);

/// K ||c|| / (1 - beta^K) * sum_q L_q for an explicit nonnegative sequence.
double sliding_common_info_bound(std::size_t K, double beta, double cost_sup, const std::vector<double>& gaps);

/// Same bound with the geometric envelope L_q = 2 rho^{M(q+1)}, summed until
/// the tail is below 1e-12. Throws when rho >= 1.
double sliding_common_info_bound_geometric(std::size_t K, double beta, double cost_sup, double rho,
                                           std::size_t window);

struct MemoryOptimum {
  MemorySchedule schedule;
  double log2_actions = 0.0;  // log2 of the restricted block count
  double error = 0.0;         // multi_err_bound of the schedule
  bool feasible = false;      // false when only the empty schedule fits
};

/// Exhaustive search over stage subsets and windows for the smallest restricted
/// action space with multi_err_bound <= epsilon. Ties go to the
/// lexicographically smallest (stages, windows).
MemoryOptimum optimize_memory(std::size_t K, double beta, double delta_bar, double cost_sup, double epsilon,
                              const std::vector<std::size_t>& n_actions,
                              const std::vector<std::size_t>& n_measurements);

/// Every admissible schedule for horizon K in lexicographic order.
std::vector<MemorySchedule> enumerate_schedules(std::size_t K);

struct BoundsReportOptions {
  std::size_t K = 2;
  double epsilon = 0.1;
  std::size_t window = 4;  // M for the geometric common-information bound
};

/// Flat key=value lines: coefficients, rate, both delta_bar modes, the Err
/// table over (t, m), the sliding-window bounds and the chosen schedule.
std::string bounds_report(const TeamModel& model, const BoundsReportOptions& options);

}  // namespace teamq
