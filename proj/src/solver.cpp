#include "teamq/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "teamq/parallel.hpp"

namespace teamq {

QTable QTable::filled(std::size_t n_states, std::size_t n_actions, double q0) {
  QTable t;
  t.n_states = n_states;
  t.n_actions = n_actions;
  t.values.assign(n_states * n_actions, q0);
  t.visits.assign(n_states * n_actions, 0);
  return t;
}

double QTable::row_min(std::size_t s) const {
  const auto first = values.begin() + static_cast<std::ptrdiff_t>(s * n_actions);
  return *std::min_element(first, first + static_cast<std::ptrdiff_t>(n_actions));
}

namespace {

void check_qmdp(const QuantizedMDP& qmdp) {
  if (qmdp.n_states() == 0 || qmdp.n_actions() == 0) throw std::invalid_argument("empty quantized MDP");
  if (!(qmdp.discount >= 0.0 && qmdp.discount < 1.0))
    throw std::invalid_argument("effective discount must lie in [0, 1)");
  for (double c : qmdp.costs)
    if (!std::isfinite(c)) throw std::invalid_argument("quantized MDP has a non-finite cost");
}

}  // namespace

ValueIterationResult value_iteration(const QuantizedMDP& qmdp, double tol, std::size_t max_iters,
                                     std::size_t workers) {
  check_qmdp(qmdp);
  if (!(tol > 0.0)) throw std::invalid_argument("value iteration tolerance must be positive");
  const std::size_t S = qmdp.n_states();
  const std::size_t A = qmdp.n_actions();
  const long double d = qmdp.discount;

  // extended precision keeps sweep deltas meaningful down to the tolerance
  std::vector<long double> v(S, 0.0L), next(S, 0.0L);
  auto backup = [&](const std::vector<long double>& from, std::vector<long double>& to) {
    parallel_for(S, workers, [&](std::size_t s) {
      long double best = std::numeric_limits<long double>::infinity();
      for (std::size_t a = 0; a < A; ++a) {
        long double expect = 0.0L;
        for (const auto& e : qmdp.transition(s, a)) expect += static_cast<long double>(e.probability) * from[e.next];
        best = std::min(best, static_cast<long double>(qmdp.cost(s, a)) + d * expect);
      }
      to[s] = best;
    });
  };
  auto sup_gap = [&](const std::vector<long double>& a, const std::vector<long double>& b) {
    long double g = 0.0L;
    for (std::size_t s = 0; s < S; ++s) g = std::max(g, std::fabs(a[s] - b[s]));
    return g;
  };

  ValueIterationResult out;
  bool converged = false;
  while (out.iterations < max_iters) {
    backup(v, next);
    const long double delta = sup_gap(next, v);
    out.deltas.push_back(static_cast<double>(delta));
    v.swap(next);
    ++out.iterations;
    if (delta <= tol) {
      converged = true;
      break;
    }
  }
  if (!converged) throw std::runtime_error("value iteration did not reach the tolerance within max_iters");

  backup(v, next);
  out.residual = static_cast<double>(sup_gap(next, v));
  // ratios of sweeps already at the rounding floor say nothing about the map
  long double scale = 1.0L;
  for (long double x : v) scale = std::max(scale, std::fabs(x));
  const double floor = static_cast<double>(kContractionFloor * scale);
  for (std::size_t k = 1; k < out.deltas.size(); ++k)
    if (out.deltas[k - 1] > floor) out.worst_contraction = std::max(out.worst_contraction, out.deltas[k] / out.deltas[k - 1]);

  out.values.assign(v.begin(), v.end());
  out.policy = greedy_policy(q_from_values(qmdp, out.values));
  out.policy.value = out.values;
  return out;
}

QTable q_from_values(const QuantizedMDP& qmdp, const std::vector<double>& values) {
  if (values.size() != qmdp.n_states()) throw std::invalid_argument("value vector does not match the MDP");
  QTable t = QTable::filled(qmdp.n_states(), qmdp.n_actions(), 0.0);
  for (std::size_t s = 0; s < qmdp.n_states(); ++s)
    for (std::size_t a = 0; a < qmdp.n_actions(); ++a) {
      long double expect = 0.0L;
      for (const auto& e : qmdp.transition(s, a)) expect += static_cast<long double>(e.probability) * values[e.next];
      t.at(s, a) = static_cast<double>(qmdp.cost(s, a) + qmdp.discount * expect);
    }
  return t;
}

CoordinatorPolicy greedy_policy(const QTable& table) {
  CoordinatorPolicy p;
  p.action.resize(table.n_states);
  p.value.resize(table.n_states);
  for (std::size_t s = 0; s < table.n_states; ++s) {
    std::size_t best = 0;
    for (std::size_t a = 1; a < table.n_actions; ++a)
      if (table.at(s, a) < table.at(s, best)) best = a;
    p.action[s] = best;
    p.value[s] = table.at(s, best);
  }
  return p;
}

QTable q_learning(const QuantizedMDP& qmdp, const TeamModel* model, const QLearningOptions& options, Rng& rng) {
  check_qmdp(qmdp);
  const std::size_t S = qmdp.n_states();
  const std::size_t A = qmdp.n_actions();
  const bool live = options.mode == QLearningMode::kLive;
  if (live && model == nullptr) throw std::invalid_argument("live Q-learning needs the team model");

  std::discrete_distribution<std::size_t> weighted;
  std::uniform_int_distribution<std::size_t> uniform(0, A - 1);
  const bool use_weights = !options.exploration.empty();
  if (use_weights) {
    if (options.exploration.size() != A) throw std::invalid_argument("exploration weights do not match the actions");
    for (double w : options.exploration)
      if (!(w > 0.0) || !std::isfinite(w))
        throw std::invalid_argument("exploration must give every action positive probability");
    weighted = std::discrete_distribution<std::size_t>(options.exploration.begin(), options.exploration.end());
  }

  std::vector<JointPrescriptionBlock> blocks;
  if (live) {
    PrescriptionSpace space(*model, qmdp.memory);
    blocks.reserve(A);
    for (BlockId id : qmdp.actions) blocks.push_back(space.decode(id));
  }

  std::size_t s = 0;
  if (options.start) {
    if (*options.start >= S) throw std::out_of_range("Q-learning start center out of range");
    s = *options.start;
  } else if (live) {
    s = nearest(qmdp.codebook, Belief::from_weights({model->initial().begin(), model->initial().end()}),
                qmdp.metric);
  }

  if (!(options.restart >= 0.0 && options.restart <= 1.0))
    throw std::invalid_argument("restart probability must lie in [0, 1]");
  std::bernoulli_distribution restart(options.restart);
  std::uniform_int_distribution<std::size_t> any_center(0, S - 1);

  QTable q = QTable::filled(S, A, options.q0);
  // cached row minima; a row is rescanned only when its argmin entry rises
  std::vector<double> row_min(S, options.q0);
  std::vector<std::size_t> row_arg(S, 0);

  for (std::uint64_t t = 0; t < options.steps; ++t) {
    const std::size_t a = use_weights ? weighted(rng) : uniform(rng);
    std::size_t s_next = 0;
    if (live) {
      const Belief& center = qmdp.codebook.centers[s];
      const std::size_t x0 = sample_index(center.weights(), rng);
      const PeriodSample period = simulate_period(*model, blocks[a], x0, rng);
      const Belief successor = k_step_update(*model, center, period.actions, period.measurements);
      if (successor.is_null()) throw std::runtime_error("live Q-learning produced a null predictor");
      s_next = nearest(qmdp.codebook, successor, qmdp.metric);
    } else {
      const auto& row = qmdp.transition(s, a);
      double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
      s_next = row.back().next;
      for (const auto& e : row) {
        if (u < e.probability) {
          s_next = e.next;
          break;
        }
        u -= e.probability;
      }
    }

    const std::size_t idx = s * A + a;
    const std::uint64_t prior = q.visits[idx]++;
    const double alpha = options.step_rule == StepSizeRule::kPriorVisits ? 1.0 / (1.0 + static_cast<double>(prior))
                                                                          : 1.0 / (2.0 + static_cast<double>(prior));
    const double target = qmdp.cost(s, a) + qmdp.discount * row_min[s_next];
    const double updated = (1.0 - alpha) * q.values[idx] + alpha * target;
    q.values[idx] = updated;

    if (updated < row_min[s] || (updated == row_min[s] && a < row_arg[s])) {
      row_min[s] = updated;
      row_arg[s] = a;
    } else if (a == row_arg[s] && updated > row_min[s]) {
      std::size_t best = 0;
      for (std::size_t b = 1; b < A; ++b)
        if (q.values[s * A + b] < q.values[s * A + best]) best = b;
      row_arg[s] = best;
      row_min[s] = q.values[s * A + best];
    }
    s = options.restart > 0.0 && restart(rng) ? any_center(rng) : s_next;
  }
  return q;
}

QComparison compare_visited(const QTable& learned, const QTable& reference) {
  if (learned.n_states != reference.n_states || learned.n_actions != reference.n_actions)
    throw std::invalid_argument("Q tables differ in shape");
  QComparison c;
  for (std::size_t s = 0; s < learned.n_states; ++s) {
    bool any = false;
    for (std::size_t a = 0; a < learned.n_actions; ++a) {
      if (learned.visit_count(s, a) == 0) continue;
      any = true;
      ++c.visited_pairs;
      c.max_abs_error = std::max(c.max_abs_error, std::abs(learned.at(s, a) - reference.at(s, a)));
    }
    if (any) ++c.visited_states;
  }
  return c;
}

}  // namespace teamq
