#include "teamq/team_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace teamq {

namespace {

std::string describe(const std::vector<Violation>& violations) {
  std::ostringstream os;
  os << "model validation failed (" << violations.size() << " violation"
     << (violations.size() == 1 ? "" : "s") << ")";
  for (const auto& v : violations) {
    os << "\n  " << v.field;
    if (v.row >= 0) os << " row " << v.row;
    os << ": " << v.message;
  }
  return os.str();
}

void check_stochastic_row(std::span<const double> row, const std::string& field, long index,
                          std::vector<Violation>& out) {
  double sum = 0.0;
  for (double p : row) {
    if (!std::isfinite(p) || p < 0.0 || p > 1.0) {
      out.push_back({field, index, p, "entry outside [0,1]"});
      return;
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > kStochasticTolerance) {
    std::ostringstream os;
    os.precision(17);
    os << "row sums to " << sum;
    out.push_back({field, index, sum, os.str()});
  }
}

std::string tuple_name(const std::vector<std::size_t>& digits) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < digits.size(); ++i) os << (i ? "," : "") << digits[i];
  os << ']';
  return os.str();
}

std::vector<std::size_t> decode_radix(std::size_t index, const std::vector<std::size_t>& radix) {
  std::vector<std::size_t> digits(radix.size());
  for (std::size_t i = radix.size(); i-- > 0;) {
    digits[i] = index % radix[i];
    index /= radix[i];
  }
  return digits;
}

std::size_t encode_radix(std::span<const std::size_t> digits, const std::vector<std::size_t>& radix) {
  if (digits.size() != radix.size())
    throw std::invalid_argument("tuple length does not match number of agents");
  std::size_t index = 0;
  for (std::size_t i = 0; i < radix.size(); ++i) {
    if (digits[i] >= radix[i]) throw std::out_of_range("tuple component out of range");
    index = index * radix[i] + digits[i];
  }
  return index;
}

}  // namespace

ValidationError::ValidationError(std::vector<Violation> violations)
    : std::runtime_error(describe(violations)), violations_(std::move(violations)) {}

TeamModel TeamModel::validate(const RawModel& raw) {
  std::vector<Violation> bad;
  if (raw.n_states == 0) bad.push_back({"states", -1, 0.0, "state space is empty"});
  if (raw.agents.empty()) bad.push_back({"agents", -1, 0.0, "at least one agent is required"});

  std::size_t n_joint_actions = 1;
  std::size_t n_joint_measurements = 1;
  for (std::size_t i = 0; i < raw.agents.size(); ++i) {
    const auto& agent = raw.agents[i];
    const std::string field = "agents[" + std::to_string(i) + "]";
    if (agent.n_actions == 0) bad.push_back({field + ".actions", -1, 0.0, "empty action set"});
    if (agent.n_measurements == 0)
      bad.push_back({field + ".measurements", -1, 0.0, "empty measurement set"});
    n_joint_actions *= std::max<std::size_t>(agent.n_actions, 1);
    n_joint_measurements *= std::max<std::size_t>(agent.n_measurements, 1);
    if (agent.channel.size() != raw.n_states) {
      bad.push_back({field + ".channel", -1, static_cast<double>(agent.channel.size()),
                     "expected " + std::to_string(raw.n_states) + " rows"});
      continue;
    }
    for (std::size_t x = 0; x < agent.channel.size(); ++x) {
      if (agent.channel[x].size() != agent.n_measurements) {
        bad.push_back({field + ".channel", static_cast<long>(x),
                       static_cast<double>(agent.channel[x].size()),
                       "expected " + std::to_string(agent.n_measurements) + " columns"});
        continue;
      }
      check_stochastic_row(agent.channel[x], field + ".channel", static_cast<long>(x), bad);
    }
  }

  std::vector<std::size_t> action_radix;
  for (const auto& agent : raw.agents) action_radix.push_back(std::max<std::size_t>(agent.n_actions, 1));

  if (raw.tau.size() != n_joint_actions) {
    bad.push_back({"tau", -1, static_cast<double>(raw.tau.size()),
                   "expected one matrix per joint action (" + std::to_string(n_joint_actions) + ")"});
  } else {
    for (std::size_t u = 0; u < raw.tau.size(); ++u) {
      const std::string field = "tau" + tuple_name(decode_radix(u, action_radix));
      if (raw.tau[u].size() != raw.n_states) {
        bad.push_back({field, -1, static_cast<double>(raw.tau[u].size()),
                       "expected " + std::to_string(raw.n_states) + " rows"});
        continue;
      }
      for (std::size_t x = 0; x < raw.n_states; ++x) {
        if (raw.tau[u][x].size() != raw.n_states) {
          bad.push_back({field, static_cast<long>(x), static_cast<double>(raw.tau[u][x].size()),
                         "expected " + std::to_string(raw.n_states) + " columns"});
          continue;
        }
        check_stochastic_row(raw.tau[u][x], field, static_cast<long>(x), bad);
      }
    }
  }

  if (raw.cost.size() != n_joint_actions) {
    bad.push_back({"cost", -1, static_cast<double>(raw.cost.size()),
                   "expected one cost vector per joint action (" + std::to_string(n_joint_actions) + ")"});
  } else {
    for (std::size_t u = 0; u < raw.cost.size(); ++u) {
      const std::string field = "cost" + tuple_name(decode_radix(u, action_radix));
      if (raw.cost[u].size() != raw.n_states) {
        bad.push_back({field, -1, static_cast<double>(raw.cost[u].size()),
                       "expected " + std::to_string(raw.n_states) + " entries"});
        continue;
      }
      for (std::size_t x = 0; x < raw.n_states; ++x) {
        const double c = raw.cost[u][x];
        if (!std::isfinite(c) || c < 0.0)
          bad.push_back({field, static_cast<long>(x), c, "cost must be finite and nonnegative"});
      }
    }
  }

  if (!(raw.beta > 0.0 && raw.beta < 1.0))
    bad.push_back({"beta", -1, raw.beta, "discount factor must lie strictly inside (0,1)"});

  if (raw.initial.size() != raw.n_states) {
    bad.push_back({"initial", -1, static_cast<double>(raw.initial.size()),
                   "expected " + std::to_string(raw.n_states) + " entries"});
  } else {
    check_stochastic_row(raw.initial, "initial", -1, bad);
  }

  if (!bad.empty()) throw ValidationError(std::move(bad));

  TeamModel m;
  m.raw_ = raw;
  m.n_states_ = raw.n_states;
  for (const auto& agent : raw.agents) {
    m.n_actions_.push_back(agent.n_actions);
    m.n_measurements_.push_back(agent.n_measurements);
  }
  m.n_joint_actions_ = n_joint_actions;
  m.n_joint_measurements_ = n_joint_measurements;
  m.beta_ = raw.beta;
  m.initial_ = raw.initial;

  const std::size_t n = raw.n_states;
  m.tau_.resize(n_joint_actions * n * n);
  for (std::size_t u = 0; u < n_joint_actions; ++u)
    for (std::size_t x = 0; x < n; ++x)
      std::copy(raw.tau[u][x].begin(), raw.tau[u][x].end(), m.tau_.begin() + (u * n + x) * n);

  m.cost_.resize(n * n_joint_actions);
  for (std::size_t u = 0; u < n_joint_actions; ++u)
    for (std::size_t x = 0; x < n; ++x) {
      m.cost_[x * n_joint_actions + u] = raw.cost[u][x];
      m.cost_sup_ = std::max(m.cost_sup_, raw.cost[u][x]);
    }

  const std::size_t n_agents = raw.agents.size();
  m.measurement_digits_.resize(n_joint_measurements * n_agents);
  for (std::size_t jy = 0; jy < n_joint_measurements; ++jy) {
    auto digits = decode_radix(jy, m.n_measurements_);
    std::copy(digits.begin(), digits.end(), m.measurement_digits_.begin() + jy * n_agents);
  }
  m.likelihood_.resize(n * n_joint_measurements);
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t jy = 0; jy < n_joint_measurements; ++jy) {
      double p = 1.0;
      for (std::size_t i = 0; i < n_agents; ++i)
        p *= raw.agents[i].channel[x][m.measurement_digits_[jy * n_agents + i]];
      m.likelihood_[x * n_joint_measurements + jy] = p;
    }
  return m;
}

std::span<const double> TeamModel::transition(std::size_t x, std::size_t joint_action) const {
  if (x >= n_states_ || joint_action >= n_joint_actions_)
    throw std::out_of_range("transition: index out of range");
  return {tau_.data() + (joint_action * n_states_ + x) * n_states_, n_states_};
}

double TeamModel::channel(std::size_t agent, std::size_t x, std::size_t y) const {
  if (agent >= n_agents() || x >= n_states_ || y >= n_measurements_[agent])
    throw std::out_of_range("channel: index out of range");
  return raw_.agents[agent].channel[x][y];
}

std::span<const double> TeamModel::joint_channel(std::size_t x) const {
  if (x >= n_states_) throw std::out_of_range("joint_channel: state out of range");
  return {likelihood_.data() + x * n_joint_measurements_, n_joint_measurements_};
}

double TeamModel::cost(std::size_t x, std::size_t joint_action) const {
  if (x >= n_states_ || joint_action >= n_joint_actions_)
    throw std::out_of_range("cost: index out of range");
  return cost_[x * n_joint_actions_ + joint_action];
}

std::size_t TeamModel::encode_actions(std::span<const std::size_t> actions) const {
  return encode_radix(actions, n_actions_);
}

std::size_t TeamModel::encode_measurements(std::span<const std::size_t> measurements) const {
  return encode_radix(measurements, n_measurements_);
}

std::vector<std::size_t> TeamModel::decode_actions(std::size_t joint_action) const {
  if (joint_action >= n_joint_actions_) throw std::out_of_range("joint action out of range");
  return decode_radix(joint_action, n_actions_);
}

std::vector<std::size_t> TeamModel::decode_measurements(std::size_t joint_measurement) const {
  if (joint_measurement >= n_joint_measurements_)
    throw std::out_of_range("joint measurement out of range");
  return decode_radix(joint_measurement, n_measurements_);
}

std::size_t sample_index(std::span<const double> probabilities, Rng& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double r = unif(rng);
  double acc = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    if (probabilities[i] <= 0.0) continue;
    acc += probabilities[i];
    last_positive = i;
    if (r < acc) return i;
  }
  // rounding left r above the accumulated mass
  return last_positive;
}

std::size_t step(const TeamModel& model, std::size_t state, std::size_t joint_action, Rng& rng) {
  return sample_index(model.transition(state, joint_action), rng);
}

std::size_t observe_index(const TeamModel& model, std::size_t state, Rng& rng) {
  if (state >= model.n_states()) throw std::out_of_range("observe: state out of range");
  std::size_t jy = 0;
  for (std::size_t i = 0; i < model.n_agents(); ++i) {
    const auto& row = model.raw().agents[i].channel[state];
    jy = jy * model.n_measurements(i) + sample_index(row, rng);
  }
  return jy;
}

std::vector<std::size_t> observe(const TeamModel& model, std::size_t state, Rng& rng) {
  return model.decode_measurements(observe_index(model, state, rng));
}

double stage_cost(const TeamModel& model, std::size_t state, std::size_t joint_action) {
  return model.cost(state, joint_action);
}

}  // namespace teamq
