#include "teamq/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "teamq/coordinator.hpp"

namespace teamq {

namespace {

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void check_common(double beta, double delta_bar, double cost_sup) {
  if (!(beta >= 0.0 && beta < 1.0)) throw std::invalid_argument("beta must lie in [0, 1)");
  if (!(delta_bar >= 0.0 && delta_bar <= 1.0)) throw std::invalid_argument("delta_bar must lie in [0, 1]");
  if (!(cost_sup >= 0.0) || !std::isfinite(cost_sup)) throw std::invalid_argument("cost bound must be finite and >= 0");
}

}  // namespace

void check_kernel(const KernelMatrix& kernel) {
  if (kernel.empty()) throw std::invalid_argument("kernel has no rows");
  const std::size_t cols = kernel.front().size();
  for (std::size_t r = 0; r < kernel.size(); ++r) {
    if (kernel[r].size() != cols) throw std::invalid_argument("kernel rows differ in length");
    double sum = 0.0;
    for (double p : kernel[r]) {
      if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("kernel entry outside [0, 1] in row " + std::to_string(r));
      sum += p;
    }
    if (std::abs(sum - 1.0) > kStochasticTolerance)
      throw std::invalid_argument("kernel row " + std::to_string(r) + " sums to " + num(sum));
  }
}

double dobrushin(const KernelMatrix& kernel) {
  check_kernel(kernel);
  double best = 1.0;
  for (std::size_t x = 0; x < kernel.size(); ++x)
    for (std::size_t y = x + 1; y < kernel.size(); ++y) {
      double overlap = 0.0;
      for (std::size_t z = 0; z < kernel[x].size(); ++z) overlap += std::min(kernel[x][z], kernel[y][z]);
      best = std::min(best, overlap);
    }
  return std::clamp(best, 0.0, 1.0);
}

KernelMatrix joint_channel_kernel(const TeamModel& model) {
  KernelMatrix k(model.n_states());
  for (std::size_t x = 0; x < model.n_states(); ++x) {
    const auto row = model.joint_channel(x);
    k[x].assign(row.begin(), row.end());
  }
  return k;
}

KernelMatrix transition_kernel(const TeamModel& model, std::size_t joint_action) {
  KernelMatrix k(model.n_states());
  for (std::size_t x = 0; x < model.n_states(); ++x) {
    const auto row = model.transition(x, joint_action);
    k[x].assign(row.begin(), row.end());
  }
  return k;
}

double delta_tilde_tau(const TeamModel& model) {
  double best = 1.0;
  for (std::size_t u = 0; u < model.n_joint_actions(); ++u) best = std::min(best, dobrushin(transition_kernel(model, u)));
  return best;
}

StabilityRate predictor_stability_rate(const TeamModel& model) {
  StabilityRate r;
  r.delta_q = dobrushin(joint_channel_kernel(model));
  r.delta_tilde_tau = delta_tilde_tau(model);
  r.rate = (2.0 - r.delta_q) * (1.0 - r.delta_tilde_tau);
  return r;
}

double joint_mixing_delta_bar(const TeamModel& model, MixingMode mode) {
  const std::size_t n = model.n_states();
  const std::size_t ny = model.n_joint_measurements();
  double best = 1.0;
  for (std::size_t x = 0; x < n; ++x) {
    KernelMatrix k(model.n_joint_actions());
    for (std::size_t u = 0; u < model.n_joint_actions(); ++u) {
      const auto row = model.transition(x, u);
      if (mode == MixingMode::kTauX) {
        k[u].assign(row.begin(), row.end());
        continue;
      }
      k[u].resize(n * ny);
      for (std::size_t x1 = 0; x1 < n; ++x1)
        for (std::size_t jy = 0; jy < ny; ++jy) k[u][x1 * ny + jy] = row[x1] * model.likelihood(x1, jy);
    }
    best = std::min(best, dobrushin(k));
  }
  return best;
}

double err_bound(std::size_t t, std::size_t m, std::size_t K, double beta, double delta_bar, double cost_sup) {
  check_common(beta, delta_bar, cost_sup);
  if (!(m <= t && t + 1 <= K))
    throw std::invalid_argument("err_bound needs 0 <= m <= t <= K-1 (m=" + std::to_string(m) +
                                ", t=" + std::to_string(t) + ", K=" + std::to_string(K) + ")");
  double tail = 0.0;
  for (std::size_t j = t; j < K; ++j) tail += std::pow(beta, static_cast<double>(j));
  return 2.0 * tail * std::pow(1.0 - delta_bar, static_cast<double>(t - m + 1)) * cost_sup;
}

std::string MemorySchedule::describe() const {
  if (stages.empty()) return "{}";
  std::string s = "{";
  for (std::size_t k = 0; k < stages.size(); ++k) {
    if (k) s += ", ";
    s += "t=" + std::to_string(stages[k]) + ":m=" + std::to_string(windows[k]);
  }
  return s + "}";
}

void check_schedule(const MemorySchedule& schedule, std::size_t K) {
  if (schedule.stages.size() != schedule.windows.size())
    throw std::invalid_argument("schedule needs one window per stage");
  for (std::size_t k = 0; k < schedule.stages.size(); ++k) {
    const std::size_t t = schedule.stages[k];
    if (t == 0 || t + 1 > K) throw std::invalid_argument("schedule stage " + std::to_string(t) + " outside 1..K-1");
    if (k > 0 && t <= schedule.stages[k - 1]) throw std::invalid_argument("schedule stages must increase strictly");
    const std::size_t m = schedule.windows[k];
    if (m == 0 || m > t)
      throw std::invalid_argument("window start " + std::to_string(m) + " outside 1.." + std::to_string(t));
  }
}

std::vector<std::size_t> schedule_window_starts(const MemorySchedule& schedule, std::size_t K) {
  check_schedule(schedule, K);
  std::vector<std::size_t> starts(K, 0);
  for (std::size_t k = 0; k < schedule.stages.size(); ++k) starts[schedule.stages[k]] = schedule.windows[k];
  return starts;
}

double multi_err_bound(const MemorySchedule& schedule, std::size_t K, double beta, double delta_bar, double cost_sup) {
  check_schedule(schedule, K);
  double total = 0.0;
  for (std::size_t k = 0; k < schedule.stages.size(); ++k)
    total += err_bound(schedule.stages[k], schedule.windows[k], K, beta, delta_bar, cost_sup);
  return total;
}

SlidingWindowBound sliding_window_bound(std::size_t m, std::size_t K, double beta, double delta_bar, double cost_sup) {
  check_common(beta, delta_bar, cost_sup);
  if (m < 1 || m > K) throw std::invalid_argument("sliding window needs 1 <= m <= K");
  if (!(delta_bar > 0.0)) throw std::invalid_argument("sliding window bound needs delta_bar > 0");
  if (!(beta > 0.0)) throw std::invalid_argument("sliding window bound needs beta > 0");
  const double x = beta * (1.0 - delta_bar);
  if (x == 1.0) throw std::invalid_argument("sliding window bound is degenerate at beta(1 - delta_bar) = 1");
  const double md = static_cast<double>(m);
  const double kd = static_cast<double>(K);
  const double first = 2.0 * cost_sup * std::pow(x, md - 1.0) * (1.0 - std::pow(x, kd - md)) / ((1.0 - beta) * (1.0 - x));
  const double second = 2.0 * cost_sup * std::pow(1.0 - delta_bar, md - 1.0) *
                        (1.0 - std::pow(1.0 - delta_bar, kd - md)) * std::pow(beta, kd - 2.0) /
                        ((1.0 - beta) * delta_bar);
  SlidingWindowBound b;
  b.raw = first - second;
  b.certificate = std::max(b.raw, 0.0);
  return b;
}

double sliding_common_info_bound(std::size_t K, double beta, double cost_sup, const std::vector<double>& gaps) {
  check_common(beta, 0.0, cost_sup);
  if (K == 0) throw std::invalid_argument("K must be at least 1");
  double sum = 0.0;
  for (double l : gaps) {
    if (!(l >= 0.0) || !std::isfinite(l)) throw std::invalid_argument("predictor gaps must be finite and >= 0");
    sum += l;
  }
  const double beta_k = std::pow(beta, static_cast<double>(K));
  return static_cast<double>(K) * cost_sup / (1.0 - beta_k) * sum;
}

double sliding_common_info_bound_geometric(std::size_t K, double beta, double cost_sup, double rho,
                                           std::size_t window) {
  check_common(beta, 0.0, cost_sup);
  if (K == 0) throw std::invalid_argument("K must be at least 1");
  if (window == 0) throw std::invalid_argument("window M must be at least 1");
  if (!(rho >= 0.0)) throw std::invalid_argument("stability rate must be >= 0");
  if (rho >= 1.0) throw std::domain_error("predictor gap envelope diverges for rate >= 1");
  const double ratio = std::pow(rho, static_cast<double>(window));
  double sum = 0.0;
  double term = 2.0 * ratio;
  while (term > 0.0) {
    sum += term;
    if (term * ratio / (1.0 - ratio) < 1e-12) break;
    term *= ratio;
  }
  const double beta_k = std::pow(beta, static_cast<double>(K));
  return static_cast<double>(K) * cost_sup / (1.0 - beta_k) * sum;
}

std::vector<MemorySchedule> enumerate_schedules(std::size_t K) {
  std::vector<MemorySchedule> out;
  if (K == 0) return out;
  MemorySchedule current;
  // each stage t in 1..K-1 is either unrestricted or gets a window start in 1..t
  auto visit = [&](auto&& self, std::size_t t) -> void {
    if (t == K) {
      out.push_back(current);
      return;
    }
    self(self, t + 1);
    for (std::size_t m = 1; m <= t; ++m) {
      current.stages.push_back(t);
      current.windows.push_back(m);
      self(self, t + 1);
      current.stages.pop_back();
      current.windows.pop_back();
    }
  };
  visit(visit, 1);
  std::sort(out.begin(), out.end(), [](const MemorySchedule& a, const MemorySchedule& b) {
    if (a.stages != b.stages) return a.stages < b.stages;
    return a.windows < b.windows;
  });
  return out;
}

MemoryOptimum optimize_memory(std::size_t K, double beta, double delta_bar, double cost_sup, double epsilon,
                              const std::vector<std::size_t>& n_actions,
                              const std::vector<std::size_t>& n_measurements) {
  check_common(beta, delta_bar, cost_sup);
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  if (!(delta_bar > 0.0)) throw std::invalid_argument("memory optimization needs delta_bar > 0");
  if (n_actions.size() != n_measurements.size() || n_actions.empty())
    throw std::invalid_argument("one action and measurement count per agent");
  if (K == 0 || K > 12) throw std::invalid_argument("memory optimization supports 1 <= K <= 12");

  MemoryOptimum best;
  bool have = false;
  for (const auto& schedule : enumerate_schedules(K)) {
    const double error = multi_err_bound(schedule, K, beta, delta_bar, cost_sup);
    if (error > epsilon) continue;
    const double size = log2_block_count(n_actions, n_measurements, MemorySpec{schedule_window_starts(schedule, K)});
    if (!have || size < best.log2_actions - 1e-9) {
      best.schedule = schedule;
      best.log2_actions = size;
      best.error = error;
      have = true;
    }
  }
  best.feasible = !best.schedule.empty();
  return best;
}

std::string bounds_report(const TeamModel& model, const BoundsReportOptions& options) {
  const std::size_t K = options.K;
  if (K == 0) throw std::invalid_argument("K must be at least 1");
  std::ostringstream os;
  const StabilityRate rate = predictor_stability_rate(model);
  const double bar_tx = joint_mixing_delta_bar(model, MixingMode::kTx);
  const double bar_tau = joint_mixing_delta_bar(model, MixingMode::kTauX);
  const double c = model.cost_sup();
  const double beta = model.beta();
  os << "K=" << K << '\n';
  os << "beta=" << num(beta) << '\n';
  os << "cost_sup=" << num(c) << '\n';
  os << "delta_Q=" << num(rate.delta_q) << '\n';
  os << "delta_tilde_tau=" << num(rate.delta_tilde_tau) << '\n';
  os << "rate=" << num(rate.rate) << '\n';
  os << "rate_certified=" << (rate.certified() ? "true" : "false") << '\n';
  os << "delta_bar_Tx=" << num(bar_tx) << '\n';
  os << "delta_bar_tau_x=" << num(bar_tau) << '\n';
  os << "delta_bar_class=deterministic_prescriptions\n";
  for (std::size_t t = 0; t < K; ++t)
    for (std::size_t m = 0; m <= t; ++m)
      os << "err[t=" << t << ",m=" << m << "]=" << num(err_bound(t, m, K, beta, bar_tx, c)) << '\n';
  if (bar_tx > 0.0 && beta > 0.0 && beta * (1.0 - bar_tx) != 1.0)
    for (std::size_t m = 1; m <= K; ++m) {
      const auto b = sliding_window_bound(m, K, beta, bar_tx, c);
      os << "sliding_window[m=" << m << "]=" << num(b.raw) << " certificate=" << num(b.certificate) << '\n';
    }
  if (rate.certified())
    os << "common_info_bound[M=" << options.window
       << "]=" << num(sliding_common_info_bound_geometric(K, beta, c, rate.rate, options.window)) << '\n';
  else
    os << "common_info_bound[M=" << options.window << "]=inconclusive\n";

  std::vector<std::size_t> na, nm;
  for (std::size_t i = 0; i < model.n_agents(); ++i) {
    na.push_back(model.n_actions(i));
    nm.push_back(model.n_measurements(i));
  }
  os << "full_log2_actions=" << num(log2_block_count(na, nm, MemorySpec::full(K))) << '\n';
  os << "epsilon=" << num(options.epsilon) << '\n';
  if (bar_tx > 0.0) {
    const MemoryOptimum opt = optimize_memory(K, beta, bar_tx, c, options.epsilon, na, nm);
    os << "schedule=" << opt.schedule.describe() << '\n';
    os << "schedule_feasible=" << (opt.feasible ? "true" : "false") << '\n';
    os << "schedule_log2_actions=" << num(opt.log2_actions) << '\n';
    os << "schedule_error=" << num(opt.error) << '\n';
  } else {
    os << "schedule={}\nschedule_feasible=false\n";
  }
  return os.str();
}

}  // namespace teamq
