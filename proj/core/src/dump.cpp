#include "pbcmdp/dump.hpp"

#include <cstdio>

#include <nlohmann/json.hpp>

namespace pbcmdp {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace

std::string transition_system_json(const TransitionSystem& ts) {
  ordered_json j;
  j["states"] = ordered_json::array();
  for (std::size_t i = 0; i < ts.states.size(); ++i)
    j["states"].push_back({{"index", i}, {"label", ts.states[i].label}});
  j["actions"] = ordered_json::array();
  for (std::size_t i = 0; i < ts.actions.size(); ++i)
    j["actions"].push_back({{"index", i}, {"label", ts.actions[i].label}});
  j["edges"] = ordered_json::array();
  for (const auto& e : ts.edges)
    j["edges"].push_back({{"from", e.from},
                          {"action", e.action},
                          {"to", e.to},
                          {"p", e.probability},
                          {"u", e.reward}});
  return j.dump(2) + "\n";
}

std::string mdp_json(const Mdp& mdp) {
  ordered_json j;
  j["states"] = mdp.state_labels;
  j["actions"] = mdp.action_labels;
  ordered_json t = ordered_json::array();
  ordered_json r = ordered_json::array();
  for (int a = 0; a < mdp.num_actions; ++a) {
    ordered_json ta = ordered_json::array();
    ordered_json ra = ordered_json::array();
    for (int s = 0; s < mdp.num_states; ++s) {
      ordered_json ts = ordered_json::array();
      ordered_json rs = ordered_json::array();
      for (int s2 = 0; s2 < mdp.num_states; ++s2) {
        ts.push_back(mdp.t(a, s, s2));
        rs.push_back(mdp.r(a, s, s2));
      }
      ta.push_back(std::move(ts));
      ra.push_back(std::move(rs));
    }
    t.push_back(std::move(ta));
    r.push_back(std::move(ra));
  }
  j["T"] = std::move(t);
  j["R"] = std::move(r);
  return j.dump(2) + "\n";
}

std::string mdp_tsv(const Mdp& mdp) {
  std::string out = "action\tfrom\tto\tp\tr\n";
  for (int a = 0; a < mdp.num_actions; ++a)
    for (int s = 0; s < mdp.num_states; ++s)
      for (int s2 = 0; s2 < mdp.num_states; ++s2) {
        out += std::to_string(a) + "\t" + std::to_string(s) + "\t" +
               std::to_string(s2) + "\t" + num(mdp.t(a, s, s2)) + "\t" +
               num(mdp.r(a, s, s2)) + "\n";
      }
  return out;
}

std::string finite_policy_json(const NonStationaryPolicy& pi,
                               const std::vector<std::string>& state_labels,
                               const std::vector<std::string>& action_labels) {
  ordered_json j;
  j["horizon"] = pi.horizon;
  j["states"] = state_labels;
  j["actions"] = action_labels;
  j["policy"] = ordered_json::array();
  j["values"] = ordered_json::array();
  for (std::size_t s = 0; s < pi.action.size(); ++s) {
    for (int step = 0; step < pi.horizon; ++step)
      j["policy"].push_back(
          {{"state", s},
           {"step", step},
           {"action", pi.action[s][static_cast<std::size_t>(step)]}});
    for (int step = 0; step <= pi.horizon; ++step)
      j["values"].push_back(
          {{"state", s},
           {"step", step},
           {"value", pi.value[s][static_cast<std::size_t>(step)]}});
  }
  return j.dump(2) + "\n";
}

std::string stationary_policy_json(
    const StationaryPolicy& pi, const std::vector<std::string>& state_labels,
    const std::vector<std::string>& action_labels) {
  ordered_json j;
  j["gamma"] = pi.gamma;
  j["sweeps"] = pi.sweeps;
  j["states"] = state_labels;
  j["actions"] = action_labels;
  j["policy"] = pi.action;
  j["values"] = pi.value;
  return j.dump(2) + "\n";
}

std::string models_dump(Inference& inference) {
  std::string out;
  const auto& sig = inference.program().signature;
  for (const auto& m : inference.models()) {
    bool first = true;
    for (std::size_t c = 0; c < sig.constants().size(); ++c) {
      if (!first) out += " ";
      first = false;
      out += sig.atom_name(static_cast<int>(c),
                           m.interpretation.values[c]);
    }
    out += " | log_weight=" + num(m.log_weight) +
           " probability=" + num(m.probability) +
           " utility=" + num(m.utility) + "\n";
  }
  return out;
}

}  // namespace pbcmdp
