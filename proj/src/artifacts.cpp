#include "teamq/artifacts.hpp"

#include <stdexcept>

#include "json.hpp"

namespace teamq {

using ojson = nlohmann::ordered_json;

namespace {

ojson parse(std::string_view text, const char* what) {
  try {
    return ojson::parse(text);
  } catch (const ojson::parse_error& e) {
    throw std::invalid_argument(std::string(what) + " artifact is not valid JSON: " + e.what());
  }
}

template <typename T>
T field(const ojson& doc, const char* key, const char* what) {
  if (!doc.contains(key)) throw std::invalid_argument(std::string(what) + " artifact lacks \"" + key + "\"");
  try {
    return doc.at(key).get<T>();
  } catch (const ojson::exception& e) {
    throw std::invalid_argument(std::string(what) + " artifact field \"" + key + "\": " + e.what());
  }
}

ojson metric_json(const GroundMetric& m) {
  if (m.kind() == GroundMetric::Kind::kMatrix)
    throw std::invalid_argument("quantized MDPs with a matrix ground metric are not serializable");
  ojson j;
  j["kind"] = m.name();
  return j;
}

}  // namespace

std::string qmdp_to_json(const QuantizedMDP& q) {
  ojson doc;
  doc["kind"] = "quantized_mdp";
  doc["horizon"] = q.horizon();
  doc["window_starts"] = q.memory.window_start;
  doc["discount"] = q.discount;
  doc["cost_bound"] = q.cost_bound;
  doc["metric"] = metric_json(q.metric);
  ojson book;
  book["mode"] = codebook_mode_name(q.codebook.mode);
  book["parameter"] = q.codebook.parameter;
  ojson centers = ojson::array();
  for (const auto& c : q.codebook.centers) centers.push_back(std::vector<double>(c.weights().begin(), c.weights().end()));
  book["centers"] = std::move(centers);
  doc["codebook"] = std::move(book);
  doc["actions"] = q.actions;
  ojson triplets = ojson::array();
  for (std::size_t s = 0; s < q.n_states(); ++s)
    for (std::size_t a = 0; a < q.n_actions(); ++a)
      for (const auto& e : q.transition(s, a)) triplets.push_back(ojson::array({s, a, e.next, e.probability}));
  doc["transitions"] = std::move(triplets);
  ojson costs = ojson::array();
  for (std::size_t s = 0; s < q.n_states(); ++s)
    costs.push_back(std::vector<double>(q.costs.begin() + static_cast<std::ptrdiff_t>(s * q.n_actions()),
                                        q.costs.begin() + static_cast<std::ptrdiff_t>((s + 1) * q.n_actions())));
  doc["costs"] = std::move(costs);
  return doc.dump(1);
}

QuantizedMDP qmdp_from_json(std::string_view text) {
  const ojson doc = parse(text, "quantized MDP");
  if (!doc.is_object() || doc.value("kind", "") != "quantized_mdp")
    throw std::invalid_argument("not a quantized MDP artifact");
  QuantizedMDP q;
  q.memory.window_start = field<std::vector<std::size_t>>(doc, "window_starts", "quantized MDP");
  q.discount = field<double>(doc, "discount", "quantized MDP");
  q.cost_bound = field<double>(doc, "cost_bound", "quantized MDP");
  const std::string metric = doc.contains("metric") ? doc["metric"].value("kind", "discrete") : "discrete";
  if (metric == "discrete")
    q.metric = GroundMetric::discrete();
  else if (metric == "line")
    q.metric = GroundMetric::line();
  else
    throw std::invalid_argument("quantized MDP artifact uses an unsupported metric: " + metric);

  const ojson& book = doc.at("codebook");
  const std::string mode = field<std::string>(book, "mode", "codebook");
  q.codebook.mode = mode == "grid" ? CodebookMode::kGrid
                    : mode == "reachable" ? CodebookMode::kReachable
                                          : CodebookMode::kExplicit;
  q.codebook.parameter = field<std::size_t>(book, "parameter", "codebook");
  for (const auto& c : field<std::vector<std::vector<double>>>(book, "centers", "codebook"))
    q.codebook.centers.push_back(Belief::restore(c));

  q.actions = field<std::vector<BlockId>>(doc, "actions", "quantized MDP");
  const std::size_t S = q.codebook.size();
  const std::size_t A = q.actions.size();
  q.transitions.resize(S * A);
  for (const auto& t : doc.at("transitions")) {
    if (!t.is_array() || t.size() != 4) throw std::invalid_argument("transition triplets need [s, a, s', p]");
    const auto s = t[0].get<std::size_t>();
    const auto a = t[1].get<std::size_t>();
    const auto next = t[2].get<std::size_t>();
    if (s >= S || a >= A || next >= S) throw std::invalid_argument("transition index out of range");
    q.transitions[s * A + a].push_back({next, t[3].get<double>()});
  }
  const auto costs = field<std::vector<std::vector<double>>>(doc, "costs", "quantized MDP");
  if (costs.size() != S) throw std::invalid_argument("cost table has the wrong number of rows");
  q.costs.reserve(S * A);
  for (const auto& row : costs) {
    if (row.size() != A) throw std::invalid_argument("cost table has the wrong number of columns");
    q.costs.insert(q.costs.end(), row.begin(), row.end());
  }
  for (const auto& row : q.transitions)
    if (row.empty()) throw std::invalid_argument("quantized MDP artifact has an empty transition row");
  return q;
}

std::string qtable_to_json(const QTable& t) {
  ojson doc;
  doc["kind"] = "q_table";
  doc["n_states"] = t.n_states;
  doc["n_actions"] = t.n_actions;
  ojson values = ojson::array();
  ojson visits = ojson::array();
  for (std::size_t s = 0; s < t.n_states; ++s) {
    const auto off = static_cast<std::ptrdiff_t>(s * t.n_actions);
    const auto end = off + static_cast<std::ptrdiff_t>(t.n_actions);
    values.push_back(std::vector<double>(t.values.begin() + off, t.values.begin() + end));
    visits.push_back(std::vector<std::uint64_t>(t.visits.begin() + off, t.visits.begin() + end));
  }
  doc["values"] = std::move(values);
  doc["visits"] = std::move(visits);
  return doc.dump(1);
}

QTable qtable_from_json(std::string_view text) {
  const ojson doc = parse(text, "Q table");
  if (!doc.is_object() || doc.value("kind", "") != "q_table") throw std::invalid_argument("not a Q table artifact");
  QTable t;
  t.n_states = field<std::size_t>(doc, "n_states", "Q table");
  t.n_actions = field<std::size_t>(doc, "n_actions", "Q table");
  const auto values = field<std::vector<std::vector<double>>>(doc, "values", "Q table");
  const auto visits = field<std::vector<std::vector<std::uint64_t>>>(doc, "visits", "Q table");
  if (values.size() != t.n_states || visits.size() != t.n_states) throw std::invalid_argument("Q table row count");
  for (std::size_t s = 0; s < t.n_states; ++s) {
    if (values[s].size() != t.n_actions || visits[s].size() != t.n_actions)
      throw std::invalid_argument("Q table column count");
    t.values.insert(t.values.end(), values[s].begin(), values[s].end());
    t.visits.insert(t.visits.end(), visits[s].begin(), visits[s].end());
  }
  return t;
}

std::string policy_to_json(const CoordinatorPolicy& policy, const QuantizedMDP& qmdp) {
  ojson doc;
  doc["kind"] = "coordinator_policy";
  ojson rows = ojson::array();
  for (std::size_t s = 0; s < policy.action.size(); ++s) {
    ojson r;
    r["center"] = s;
    r["action_index"] = policy.action[s];
    r["block"] = qmdp.actions.at(policy.action[s]);
    r["value"] = policy.value.at(s);
    rows.push_back(std::move(r));
  }
  doc["rows"] = std::move(rows);
  return doc.dump(1);
}

CoordinatorPolicy policy_from_json(std::string_view text, const QuantizedMDP& qmdp) {
  const ojson doc = parse(text, "policy");
  if (!doc.is_object() || doc.value("kind", "") != "coordinator_policy")
    throw std::invalid_argument("not a coordinator policy artifact");
  CoordinatorPolicy p;
  for (const auto& r : doc.at("rows")) {
    const auto a = field<std::size_t>(r, "action_index", "policy");
    if (a >= qmdp.n_actions() || qmdp.actions[a] != field<BlockId>(r, "block", "policy"))
      throw std::invalid_argument("policy does not match the quantized MDP's action list");
    p.action.push_back(a);
    p.value.push_back(field<double>(r, "value", "policy"));
  }
  if (p.action.size() != qmdp.n_states()) throw std::invalid_argument("policy does not cover every center");
  return p;
}

std::string value_iteration_to_json(const ValueIterationResult& result, const QuantizedMDP& qmdp) {
  ojson doc;
  doc["kind"] = "value_iteration";
  doc["iterations"] = result.iterations;
  doc["residual"] = result.residual;
  doc["discount"] = qmdp.discount;
  doc["worst_contraction"] = result.worst_contraction;
  doc["deltas"] = result.deltas;
  doc["values"] = result.values;
  doc["policy"] = ojson::parse(policy_to_json(result.policy, qmdp));
  return doc.dump(1);
}

}  // namespace teamq
