#include "teamq/config.hpp"

#include "json.hpp"
#include "teamq/parallel.hpp"

namespace teamq {

using nlohmann::json;

namespace {

template <typename T>
void read(const json& obj, const char* key, T& out) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config key \"") + key + "\": " + e.what());
  }
}

const json& section(const json& doc, const char* key) {
  static const json empty = json::object();
  if (!doc.contains(key)) return empty;
  if (!doc.at(key).is_object()) throw ConfigError(std::string("config section \"") + key + "\" must be an object");
  return doc.at(key);
}

}  // namespace

std::size_t RunConfig::worker_count() const { return workers ? workers : default_workers(); }

RunConfig parse_config(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");

  RunConfig c;
  read(doc, "model_path", c.model_path);
  if (doc.contains("model")) c.model_json = doc.at("model").dump();
  read(doc, "seed", c.seed);
  read(doc, "workers", c.workers);

  const json& red = section(doc, "reduction");
  read(red, "K", c.K);
  if (c.K == 0) throw ConfigError("reduction.K must be at least 1");
  if (red.contains("memory_schedule")) {
    const json& sched = red.at("memory_schedule");
    if (!sched.is_array()) throw ConfigError("reduction.memory_schedule must be a list of {t, m}");
    for (const auto& e : sched) {
      if (!e.is_object() || !e.contains("t") || !e.contains("m"))
        throw ConfigError("reduction.memory_schedule entries need \"t\" and \"m\"");
      c.schedule.stages.push_back(e.at("t").get<std::size_t>());
      c.schedule.windows.push_back(e.at("m").get<std::size_t>());
    }
  }
  try {
    check_schedule(c.schedule, c.K);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("reduction.memory_schedule: ") + e.what());
  }

  const json& qz = section(doc, "quantizer");
  std::string mode = "reachable";
  read(qz, "mode", mode);
  if (mode == "grid")
    c.quantizer.mode = CodebookMode::kGrid;
  else if (mode == "reachable")
    c.quantizer.mode = CodebookMode::kReachable;
  else if (mode == "explicit")
    c.quantizer.mode = CodebookMode::kExplicit;
  else
    throw ConfigError("quantizer.mode must be grid, reachable or explicit");
  read(qz, "n", c.quantizer.n);
  read(qz, "depth", c.quantizer.depth);
  read(qz, "budget", c.quantizer.budget);
  read(qz, "blocks_per_node", c.quantizer.blocks_per_node);
  read(qz, "metric", c.quantizer.metric);
  read(qz, "extra_centers", c.quantizer.extra_centers);
  read(qz, "expand_extra", c.quantizer.expand_extra);
  read(qz, "centers", c.quantizer.centers);
  read(qz, "min_separation", c.quantizer.min_separation);
  metric_from_name(c.quantizer.metric);

  const json& sv = section(doc, "solver");
  read(sv, "steps", c.solver.steps);
  read(sv, "tol", c.solver.tol);
  read(sv, "max_iters", c.solver.max_iters);
  read(sv, "q0", c.solver.q0);
  read(sv, "restart", c.solver.restart);
  if (!(c.solver.restart >= 0.0 && c.solver.restart <= 1.0)) throw ConfigError("solver.restart must lie in [0, 1]");
  std::string smode = "live";
  read(sv, "mode", smode);
  if (smode == "live")
    c.solver.mode = QLearningMode::kLive;
  else if (smode == "surrogate")
    c.solver.mode = QLearningMode::kSurrogate;
  else
    throw ConfigError("solver.mode must be live or surrogate");
  std::string rule = "prior";
  read(sv, "step_rule", rule);
  if (rule == "prior")
    c.solver.step_rule = StepSizeRule::kPriorVisits;
  else if (rule == "inclusive")
    c.solver.step_rule = StepSizeRule::kInclusiveVisits;
  else
    throw ConfigError("solver.step_rule must be prior or inclusive");
  if (sv.contains("seed")) read(sv, "seed", c.seed);

  const json& ev = section(doc, "eval");
  read(ev, "episodes", c.eval.episodes);
  read(ev, "trunc_eps", c.eval.trunc_eps);
  read(ev, "centers", c.eval.centers);
  read(ev, "policy", c.eval.policy);
  if (c.eval.policy != "vi" && c.eval.policy != "q") throw ConfigError("eval.policy must be vi or q");

  const json& bd = section(doc, "bounds");
  c.bounds.K = c.K;
  read(bd, "epsilon", c.bounds.epsilon);
  read(bd, "window", c.bounds.window);

  const json& st = section(doc, "stability");
  read(st, "mu", c.stability.mu);
  read(st, "nu", c.stability.nu);
  read(st, "T", c.stability.T);
  read(st, "episodes", c.stability.episodes);
  return c;
}

GroundMetric metric_from_name(const std::string& name) {
  if (name == "discrete") return GroundMetric::discrete();
  if (name == "line") return GroundMetric::line();
  throw ConfigError("quantizer.metric must be discrete or line");
}

Codebook build_codebook(const TeamModel& model, const RunConfig& config) {
  const auto& qc = config.quantizer;
  auto beliefs = [&](const std::vector<std::vector<double>>& rows) {
    std::vector<Belief> out;
    for (const auto& r : rows) {
      if (r.size() != model.n_states()) throw ConfigError("center has the wrong number of states");
      // centers in configs are often rounded; renormalize rather than reject
      out.push_back(Belief::normalize(r));
      if (out.back().is_null()) throw ConfigError("center has zero mass");
    }
    return out;
  };
  switch (qc.mode) {
    case CodebookMode::kGrid:
      return build_grid_codebook(model.n_states(), qc.n);
    case CodebookMode::kExplicit:
      return make_codebook(beliefs(qc.centers), qc.min_separation);
    case CodebookMode::kReachable: {
      ReachableOptions o;
      o.depth = qc.depth;
      o.budget = qc.budget;
      o.blocks_per_node = qc.blocks_per_node;
      o.extra_centers = beliefs(qc.extra_centers);
      o.expand_extra = qc.expand_extra;
      o.min_separation = qc.min_separation;
      Rng rng(config.seed);
      return build_reachable_codebook(model, config.memory(), o, rng);
    }
  }
  throw ConfigError("unknown codebook mode");
}

QuantizedMDP build_from_config(const TeamModel& model, const RunConfig& config) {
  const MemorySpec memory = config.memory();
  return build_quantized_mdp(model, memory, build_codebook(model, config), all_block_ids(model, memory),
                             metric_from_name(config.quantizer.metric), config.worker_count());
}

std::vector<std::size_t> eval_centers(const RunConfig& config, const QuantizedMDP& qmdp) {
  std::vector<std::size_t> out = config.eval.centers;
  if (out.empty()) {
    const std::size_t n = config.quantizer.mode == CodebookMode::kReachable && !config.quantizer.extra_centers.empty()
                              ? std::min(config.quantizer.extra_centers.size(), qmdp.n_states())
                              : qmdp.n_states();
    for (std::size_t i = 0; i < n; ++i) out.push_back(i);
  }
  for (std::size_t i : out)
    if (i >= qmdp.n_states()) throw ConfigError("eval center index " + std::to_string(i) + " out of range");
  return out;
}

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace teamq
