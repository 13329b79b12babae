#include "teamq/model_io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace teamq {

using nlohmann::json;

namespace {

[[noreturn]] void structural(const std::string& field, const std::string& message) {
  throw ValidationError({Violation{field, -1, 0.0, message}});
}

std::size_t count_field(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) structural(where + key, "missing key");
  const auto& v = obj.at(key);
  if (v.is_number_unsigned()) return v.get<std::size_t>();
  if (v.is_number_integer() && v.get<long long>() >= 0) return static_cast<std::size_t>(v.get<long long>());
  // a list of labels also defines the size
  if (v.is_array()) return v.size();
  structural(where + key, "expected a nonnegative count or a list of labels");
}

std::vector<double> vector_of(const json& v, const std::string& field) {
  if (!v.is_array()) structural(field, "expected an array of numbers");
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& e : v) {
    if (!e.is_number()) structural(field, "expected an array of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

std::vector<std::vector<double>> matrix_of(const json& v, const std::string& field) {
  if (!v.is_array()) structural(field, "expected a row-major matrix");
  std::vector<std::vector<double>> out;
  for (const auto& row : v) out.push_back(vector_of(row, field));
  return out;
}

std::size_t joint_action_index(const json& tuple, const RawModel& raw, const std::string& field) {
  if (!tuple.is_array() || tuple.size() != raw.agents.size())
    structural(field, "joint action must be an array with one entry per agent");
  std::size_t index = 0;
  for (std::size_t i = 0; i < raw.agents.size(); ++i) {
    if (!tuple[i].is_number_integer() || tuple[i].get<long long>() < 0 ||
        static_cast<std::size_t>(tuple[i].get<long long>()) >= raw.agents[i].n_actions)
      structural(field, "joint action component out of range: " + tuple.dump());
    index = index * raw.agents[i].n_actions + tuple[i].get<std::size_t>();
  }
  return index;
}

}  // namespace

RawModel parse_model(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    structural("json", e.what());
  }
  if (!doc.is_object()) structural("json", "model document must be an object");

  RawModel raw;
  raw.n_states = count_field(doc, "states", "");
  if (!doc.contains("agents") || !doc["agents"].is_array()) structural("agents", "missing agent list");
  std::size_t n_joint = 1;
  for (std::size_t i = 0; i < doc["agents"].size(); ++i) {
    const auto& a = doc["agents"][i];
    const std::string where = "agents[" + std::to_string(i) + "].";
    RawAgent agent;
    agent.n_actions = count_field(a, "actions", where);
    agent.n_measurements = count_field(a, "measurements", where);
    if (!a.contains("channel")) structural(where + "channel", "missing key");
    agent.channel = matrix_of(a["channel"], where + "channel");
    n_joint *= agent.n_actions;
    raw.agents.push_back(std::move(agent));
  }

  auto keyed = [&](const char* key, const char* payload, auto&& read) {
    if (!doc.contains(key) || !doc[key].is_array()) structural(key, "missing list of joint-action entries");
    std::vector<bool> seen(n_joint, false);
    for (const auto& entry : doc[key]) {
      if (!entry.is_object() || !entry.contains("action") || !entry.contains(payload))
        structural(key, std::string("each entry needs \"action\" and \"") + payload + "\"");
      const std::size_t u = joint_action_index(entry["action"], raw, key);
      if (seen[u]) structural(key, "duplicate joint action " + entry["action"].dump());
      seen[u] = true;
      read(u, entry[payload]);
    }
    for (std::size_t u = 0; u < n_joint; ++u)
      if (!seen[u]) structural(key, "missing joint action index " + std::to_string(u));
  };

  raw.tau.resize(n_joint);
  keyed("tau", "matrix", [&](std::size_t u, const json& m) { raw.tau[u] = matrix_of(m, "tau"); });
  raw.cost.resize(n_joint);
  keyed("cost", "values", [&](std::size_t u, const json& v) { raw.cost[u] = vector_of(v, "cost"); });

  if (!doc.contains("beta") || !doc["beta"].is_number()) structural("beta", "missing discount factor");
  raw.beta = doc["beta"].get<double>();
  if (doc.contains("initial")) {
    raw.initial = vector_of(doc["initial"], "initial");
  } else {
    structural("initial", "missing initial distribution");
  }
  return raw;
}

TeamModel load_model(std::string_view json_text) { return TeamModel::validate(parse_model(json_text)); }

TeamModel load_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open model file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return load_model(buffer.str());
}

std::string model_to_json(const TeamModel& model) {
  const auto& raw = model.raw();
  json doc;
  doc["states"] = raw.n_states;
  doc["agents"] = json::array();
  for (const auto& a : raw.agents)
    doc["agents"].push_back({{"actions", a.n_actions}, {"measurements", a.n_measurements}, {"channel", a.channel}});
  doc["tau"] = json::array();
  doc["cost"] = json::array();
  for (std::size_t u = 0; u < model.n_joint_actions(); ++u) {
    const auto tuple = model.decode_actions(u);
    doc["tau"].push_back({{"action", tuple}, {"matrix", raw.tau[u]}});
    doc["cost"].push_back({{"action", tuple}, {"values", raw.cost[u]}});
  }
  doc["beta"] = raw.beta;
  doc["initial"] = raw.initial;
  return doc.dump(2);
}

}  // namespace teamq
