#include "teamq/teamq.h"

#include <cstdlib>
#include <cstring>
#include <sstream>
#include <string>

#include "json.hpp"
#include "teamq/artifacts.hpp"
#include "teamq/bounds.hpp"
#include "teamq/config.hpp"
#include "teamq/evalsim.hpp"
#include "teamq/model_io.hpp"
#include "teamq/quantizer.hpp"
#include "teamq/solver.hpp"

struct tq_model {
  teamq::TeamModel model;
};

struct tq_qmdp {
  teamq::QuantizedMDP qmdp;
};

namespace {

using nlohmann::ordered_json;

thread_local std::string g_last_error;

tq_status fail(tq_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

char* copy_out(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (p) std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

// unparseable text is reported by the loader as a violation on "json"
bool is_syntax_error(const teamq::ValidationError& e) {
  return e.violations().size() == 1 && e.violations()[0].field == "json";
}

template <typename F>
tq_status guarded(F&& body) {
  try {
    g_last_error.clear();
    return body();
  } catch (const teamq::ValidationError& e) {
    if (is_syntax_error(e)) return fail(TQ_ERR_PARSE, e.what());
    std::string msg = e.what();
    for (const auto& v : e.violations()) msg += "\n  " + v.field + ": " + v.message;
    return fail(TQ_ERR_VALIDATION, msg);
  } catch (const teamq::ConfigError& e) {
    return fail(TQ_ERR_PARSE, e.what());
  } catch (const nlohmann::json::exception& e) {
    return fail(TQ_ERR_PARSE, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(TQ_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::out_of_range& e) {
    return fail(TQ_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::domain_error& e) {
    return fail(TQ_ERR_INFEASIBLE, e.what());
  } catch (const std::exception& e) {
    return fail(TQ_ERR_RUNTIME, e.what());
  } catch (...) {
    return fail(TQ_ERR_RUNTIME, "unknown error");
  }
}

teamq::RunConfig config_of(const char* config_json) {
  return teamq::parse_config(config_json && *config_json ? config_json : "{}");
}

std::string violations_json(const teamq::ValidationError& e) {
  ordered_json list = ordered_json::array();
  for (const auto& v : e.violations())
    list.push_back({{"field", v.field}, {"row", v.row}, {"observed", v.observed}, {"message", v.message}});
  return list.dump(1);
}

}  // namespace

extern "C" {

const char* tq_version(void) { return "0.1.0"; }

const char* tq_last_error(void) { return g_last_error.c_str(); }

const char* tq_status_name(tq_status status) {
  switch (status) {
    case TQ_OK:
      return "ok";
    case TQ_ERR_INVALID_ARGUMENT:
      return "invalid argument";
    case TQ_ERR_PARSE:
      return "parse error";
    case TQ_ERR_VALIDATION:
      return "validation failure";
    case TQ_ERR_MISSING:
      return "missing artifact";
    case TQ_ERR_INFEASIBLE:
      return "infeasible";
    case TQ_ERR_RUNTIME:
      return "runtime error";
  }
  return "unknown";
}

void tq_string_free(char* text) { std::free(text); }

tq_status tq_model_load_json(const char* json, tq_model** out) {
  if (!json || !out) return fail(TQ_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    *out = new tq_model{teamq::load_model(json)};
    return TQ_OK;
  });
}

tq_status tq_model_load_file(const char* path, tq_model** out) {
  if (!path || !out) return fail(TQ_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    try {
      *out = new tq_model{teamq::load_model_file(path)};
    } catch (const teamq::ValidationError&) {
      throw;
    } catch (const std::runtime_error& e) {
      return fail(TQ_ERR_MISSING, e.what());
    }
    return TQ_OK;
  });
}

tq_status tq_model_validate_json(const char* json, char** report) {
  if (!json) return fail(TQ_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    try {
      teamq::load_model(json);
      if (report) *report = copy_out("[]");
      return TQ_OK;
    } catch (const teamq::ValidationError& e) {
      if (report) *report = copy_out(violations_json(e));
      return fail(is_syntax_error(e) ? TQ_ERR_PARSE : TQ_ERR_VALIDATION, e.what());
    }
  });
}

tq_status tq_model_to_json(const tq_model* model, char** out) {
  if (!model || !out) return fail(TQ_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    *out = copy_out(teamq::model_to_json(model->model));
    return TQ_OK;
  });
}

tq_status tq_model_info(const tq_model* model, char** out) {
  if (!model || !out) return fail(TQ_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const auto& m = model->model;
    ordered_json doc;
    doc["states"] = m.n_states();
    doc["agents"] = ordered_json::array();
    for (std::size_t i = 0; i < m.n_agents(); ++i)
      doc["agents"].push_back({{"actions", m.n_actions(i)}, {"measurements", m.n_measurements(i)}});
    doc["joint_actions"] = m.n_joint_actions();
    doc["cost_sup"] = m.cost_sup();
    doc["beta"] = m.beta();
    *out = copy_out(doc.dump(1));
    return TQ_OK;
  });
}

void tq_model_free(tq_model* model) { delete model; }

tq_status tq_bounds_report(const tq_model* model, const char* config_json, char** out, int* feasible) {
  if (!model || !out) return fail(TQ_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const teamq::RunConfig cfg = config_of(config_json);
    const std::string report = teamq::bounds_report(model->model, cfg.bounds);
    if (feasible) *feasible = report.find("schedule_feasible=true") != std::string::npos ? 1 : 0;
    *out = copy_out(report);
    return TQ_OK;
  });
}

tq_status tq_qmdp_build(const tq_model* model, const char* config_json, tq_qmdp** out) {
  if (!model || !out) return fail(TQ_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const teamq::RunConfig cfg = config_of(config_json);
    *out = new tq_qmdp{teamq::build_from_config(model->model, cfg)};
    return TQ_OK;
  });
}

tq_status tq_qmdp_load_json(const char* json, tq_qmdp** out) {
  if (!json || !out) return fail(TQ_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    try {
      *out = new tq_qmdp{teamq::qmdp_from_json(json)};
    } catch (const std::invalid_argument& e) {
      return fail(TQ_ERR_PARSE, e.what());
    }
    return TQ_OK;
  });
}

tq_status tq_qmdp_to_json(const tq_qmdp* qmdp, char** out) {
  if (!qmdp || !out) return fail(TQ_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    *out = copy_out(teamq::qmdp_to_json(qmdp->qmdp));
    return TQ_OK;
  });
}

tq_status tq_qmdp_info(const tq_qmdp* qmdp, char** out) {
  if (!qmdp || !out) return fail(TQ_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const auto& q = qmdp->qmdp;
    ordered_json doc;
    doc["states"] = q.n_states();
    doc["actions"] = q.n_actions();
    doc["discount"] = q.discount;
    doc["cost_bound"] = q.cost_bound;
    doc["max_row_defect"] = teamq::max_row_defect(q);
    doc["codebook_mode"] = teamq::codebook_mode_name(q.codebook.mode);
    *out = copy_out(doc.dump(1));
    return TQ_OK;
  });
}

void tq_qmdp_free(tq_qmdp* qmdp) { delete qmdp; }

tq_status tq_value_iteration(const tq_qmdp* qmdp, const char* config_json, char** result) {
  if (!qmdp || !result) return fail(TQ_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const teamq::RunConfig cfg = config_of(config_json);
    const auto vi = teamq::value_iteration(qmdp->qmdp, cfg.solver.tol, cfg.solver.max_iters, cfg.worker_count());
    *result = copy_out(teamq::value_iteration_to_json(vi, qmdp->qmdp));
    return TQ_OK;
  });
}

tq_status tq_q_learning(const tq_qmdp* qmdp, const tq_model* model, const char* config_json, int64_t steps,
                        int64_t seed, char** qtable) {
  if (!qmdp || !qtable) return fail(TQ_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const teamq::RunConfig cfg = config_of(config_json);
    teamq::QLearningOptions o;
    o.steps = steps >= 0 ? static_cast<std::uint64_t>(steps) : cfg.solver.steps;
    o.mode = cfg.solver.mode;
    o.step_rule = cfg.solver.step_rule;
    o.q0 = cfg.solver.q0;
    o.restart = cfg.solver.restart;
    if (o.mode == teamq::QLearningMode::kLive && !model)
      return fail(TQ_ERR_INVALID_ARGUMENT, "live Q-learning needs a model");
    teamq::Rng rng(seed >= 0 ? static_cast<std::uint64_t>(seed) : cfg.seed);
    const teamq::QTable t = teamq::q_learning(qmdp->qmdp, model ? &model->model : nullptr, o, rng);
    *qtable = copy_out(teamq::qtable_to_json(t));
    return TQ_OK;
  });
}

tq_status tq_greedy_policy(const tq_qmdp* qmdp, const char* qtable_json, char** policy) {
  if (!qmdp || !qtable_json || !policy) return fail(TQ_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const teamq::QTable t = teamq::qtable_from_json(qtable_json);
    if (t.n_states != qmdp->qmdp.n_states() || t.n_actions != qmdp->qmdp.n_actions())
      return fail(TQ_ERR_INVALID_ARGUMENT, "Q table does not match the quantized MDP");
    *policy = copy_out(teamq::policy_to_json(teamq::greedy_policy(t), qmdp->qmdp));
    return TQ_OK;
  });
}

tq_status tq_rollout(const tq_model* model, const tq_qmdp* qmdp, const char* policy_json, const char* config_json,
                     int64_t seed, char** result) {
  if (!model || !qmdp || !policy_json || !result) return fail(TQ_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const teamq::RunConfig cfg = config_of(config_json);
    const auto policy = teamq::policy_from_json(policy_json, qmdp->qmdp);
    const std::uint64_t base = seed >= 0 ? static_cast<std::uint64_t>(seed) : cfg.seed;
    ordered_json rows = ordered_json::array();
    for (std::size_t s : teamq::eval_centers(cfg, qmdp->qmdp)) {
      teamq::RolloutOptions o;
      o.episodes = cfg.eval.episodes;
      o.trunc_eps = cfg.eval.trunc_eps;
      o.seed = base * 1000003ULL + s;
      o.workers = cfg.worker_count();
      const auto& center = qmdp->qmdp.codebook.centers[s];
      const auto r = teamq::rollout_cost(model->model, qmdp->qmdp, policy, center, o);
      ordered_json row;
      row["center"] = s;
      row["weights"] = std::vector<double>(center.weights().begin(), center.weights().end());
      row["mean"] = r.mean;
      row["std_error"] = r.std_error;
      row["horizon"] = r.horizon;
      row["episodes"] = r.episodes;
      rows.push_back(std::move(row));
    }
    *result = copy_out(rows.dump(1));
    return TQ_OK;
  });
}

tq_status tq_stability(const tq_model* model, const char* config_json, int64_t seed, char** csv) {
  if (!model || !csv) return fail(TQ_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const teamq::RunConfig cfg = config_of(config_json);
    const auto& m = model->model;
    const teamq::Belief mu = cfg.stability.mu.empty()
                                 ? teamq::Belief::from_weights({m.initial().begin(), m.initial().end()})
                                 : teamq::Belief::normalize(cfg.stability.mu);
    const teamq::Belief nu =
        cfg.stability.nu.empty() ? teamq::Belief::uniform(m.n_states()) : teamq::Belief::normalize(cfg.stability.nu);
    teamq::StabilityOptions o;
    o.horizon = cfg.stability.T;
    o.episodes = cfg.stability.episodes;
    o.seed = seed >= 0 ? static_cast<std::uint64_t>(seed) : cfg.seed;
    o.workers = cfg.worker_count();
    const auto gaps = teamq::predictor_stability_experiment(m, mu, nu, o);
    const double rate = teamq::predictor_stability_rate(m).rate;
    const double tv0 = teamq::tv_distance(mu, nu);
    std::ostringstream os;
    os.precision(10);
    os << "t,mean_gap,std_error,envelope\n";
    double envelope = tv0;
    for (std::size_t t = 0; t < gaps.size(); ++t) {
      os << t << ',' << gaps[t].mean << ',' << gaps[t].std_error << ',' << envelope << '\n';
      envelope *= rate;
    }
    *csv = copy_out(os.str());
    return TQ_OK;
  });
}

uint64_t tq_hash(const char* bytes, uint64_t length) {
  if (!bytes) return teamq::fnv1a({});
  return teamq::fnv1a(std::string_view(bytes, static_cast<std::size_t>(length)));
}

}  // extern "C"
