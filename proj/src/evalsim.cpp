#include "teamq/evalsim.hpp"

#include <cmath>
#include <stdexcept>

#include "teamq/parallel.hpp"

namespace teamq {

namespace {

Rng episode_rng(std::uint64_t seed, std::uint64_t episode) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(episode), static_cast<std::uint32_t>(episode >> 32)};
  return Rng(seq);
}

GapEstimate summarize(const std::vector<double>& samples) {
  GapEstimate g;
  if (samples.empty()) return g;
  const double n = static_cast<double>(samples.size());
  double sum = 0.0;
  for (double v : samples) sum += v;
  g.mean = sum / n;
  if (samples.size() > 1) {
    double ss = 0.0;
    for (double v : samples) ss += (v - g.mean) * (v - g.mean);
    g.std_error = std::sqrt(ss / (n - 1.0) / n);
  }
  return g;
}

}  // namespace

std::size_t truncation_horizon(double discount, double cost_bound, double trunc_eps) {
  if (!(trunc_eps > 0.0)) throw std::invalid_argument("trunc_eps must be positive");
  if (!(discount >= 0.0 && discount < 1.0)) throw std::invalid_argument("discount must lie in [0, 1)");
  std::size_t q = 1;
  double tail = discount * cost_bound / (1.0 - discount);
  while (!(tail < trunc_eps)) {
    tail *= discount;
    ++q;
    if (q > 1000000) throw std::runtime_error("truncation horizon too long");
  }
  return q;
}

RolloutResult rollout_cost(const TeamModel& model, const QuantizedMDP& qmdp, const CoordinatorPolicy& policy,
                           const Belief& start, const RolloutOptions& options) {
  if (policy.action.size() != qmdp.n_states()) throw std::invalid_argument("policy does not cover every center");
  for (std::size_t a : policy.action)
    if (a >= qmdp.n_actions()) throw std::invalid_argument("policy action out of range");
  if (start.is_null() || start.size() != model.n_states()) throw std::invalid_argument("invalid start belief");
  if (options.episodes == 0) throw std::invalid_argument("rollout needs at least one episode");

  PrescriptionSpace space(model, qmdp.memory);
  std::vector<JointPrescriptionBlock> blocks(qmdp.n_actions());
  std::vector<bool> used(qmdp.n_actions(), false);
  for (std::size_t a : policy.action) used[a] = true;
  for (std::size_t a = 0; a < qmdp.n_actions(); ++a)
    if (used[a]) blocks[a] = space.decode(qmdp.actions[a]);

  RolloutResult out;
  out.horizon = truncation_horizon(qmdp.discount, qmdp.cost_bound, options.trunc_eps);
  out.episodes = options.episodes;
  std::vector<double> totals(options.episodes);

  parallel_for(options.episodes, options.workers, [&](std::size_t e) {
    Rng rng = episode_rng(options.seed, e);
    Belief predictor = start;
    std::size_t x = sample_index(start.weights(), rng);
    double total = 0.0;
    double weight = 1.0;
    for (std::size_t q = 0; q < out.horizon; ++q) {
      const std::size_t s = nearest(qmdp.codebook, predictor, qmdp.metric);
      const PeriodSample period = simulate_period(model, blocks[policy.action[s]], x, rng);
      total += weight * period.discounted_cost;
      weight *= qmdp.discount;
      predictor = k_step_update(model, predictor, period.actions, period.measurements);
      if (predictor.is_null())
        throw std::runtime_error("rollout reached a zero-probability measurement; model and codebook disagree");
      x = period.states.back();
    }
    totals[e] = total;
  });

  const GapEstimate g = summarize(totals);
  out.mean = g.mean;
  out.std_error = g.std_error;
  return out;
}

bool absolutely_continuous(const Belief& mu, const Belief& nu) {
  if (mu.size() != nu.size()) return false;
  for (std::size_t x = 0; x < mu.size(); ++x)
    if (mu[x] > 0.0 && !(nu[x] > 0.0)) return false;
  return true;
}

std::vector<GapEstimate> predictor_stability_experiment(const TeamModel& model, const Belief& mu, const Belief& nu,
                                                        const StabilityOptions& options) {
  if (mu.is_null() || nu.is_null() || mu.size() != model.n_states() || nu.size() != model.n_states())
    throw std::invalid_argument("stability priors must be beliefs over the model's states");
  if (!absolutely_continuous(mu, nu)) throw std::invalid_argument("true prior is not absolutely continuous w.r.t. nu");
  if (options.episodes == 0) throw std::invalid_argument("stability experiment needs at least one episode");

  PrescriptionSpace space(model, MemorySpec::full(1));
  const BlockId n_blocks = space.size();
  const std::size_t T = options.horizon;
  std::vector<std::vector<double>> gaps(T + 1, std::vector<double>(options.episodes));

  parallel_for(options.episodes, options.workers, [&](std::size_t e) {
    Rng rng = episode_rng(options.seed, e);
    std::uniform_int_distribution<BlockId> pick(0, n_blocks - 1);
    Belief p_mu = mu;
    Belief p_nu = nu;
    std::size_t x = sample_index(mu.weights(), rng);
    gaps[0][e] = tv_distance(p_mu, p_nu);
    for (std::size_t t = 0; t < T; ++t) {
      const JointPrescriptionBlock block = space.decode(pick(rng));
      const PeriodSample step_sample = simulate_period(model, block, x, rng);
      p_mu = predictor_update(model, p_mu, step_sample.actions[0], step_sample.measurements[0]);
      p_nu = predictor_update(model, p_nu, step_sample.actions[0], step_sample.measurements[0]);
      if (p_mu.is_null() || p_nu.is_null()) throw std::runtime_error("stability experiment produced a null predictor");
      gaps[t + 1][e] = tv_distance(p_mu, p_nu);
      x = step_sample.states.back();
    }
  });

  std::vector<GapEstimate> out;
  out.reserve(T + 1);
  for (const auto& column : gaps) out.push_back(summarize(column));
  return out;
}

double expected_one_step_gap(const TeamModel& model, const Belief& mu, const Belief& nu,
                             const JointPrescriptionBlock& block) {
  if (!absolutely_continuous(mu, nu)) throw std::invalid_argument("true prior is not absolutely continuous w.r.t. nu");
  double total = 0.0;
  for (std::size_t jy = 0; jy < model.n_joint_measurements(); ++jy) {
    double p = 0.0;
    for (std::size_t x = 0; x < model.n_states(); ++x) p += mu[x] * model.likelihood(x, jy);
    if (p == 0.0) continue;
    const std::size_t history[1] = {jy};
    const std::size_t u = block.joint_action(model, 0, history);
    total += p * tv_distance(predictor_update(model, mu, u, jy), predictor_update(model, nu, u, jy));
  }
  return total;
}

}  // namespace teamq
