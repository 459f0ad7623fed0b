#pragma once

#include <fstream>
#include <ostream>
#include <set>
#include <sstream>
#include <string>

#include "json.hpp"

#include "ezdp/dubounds.hpp"
#include "ezdp/model.hpp"
#include "ezdp/policyeval.hpp"
#include "ezdp/solver.hpp"

// Model files and run reports as JSON documents.

namespace ezdp::io {

using nlohmann::json;

inline constexpr const char* kVersion = "1.0.0";

namespace detail {

inline ValidationError shape_error(const std::string& what) {
  return ValidationError(ValidationError::Kind::Shape, "model file: " + what);
}

template <class T>
T get_as(const json& j, const std::string& field) {
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    throw shape_error("field '" + field + "' has the wrong type");
  }
}

inline const json& require(const json& doc, const std::string& field) {
  auto it = doc.find(field);
  if (it == doc.end()) throw shape_error("missing field '" + field + "'");
  return *it;
}

inline double number(const json& j, const std::string& field) {
  if (!j.is_number()) throw shape_error("field '" + field + "' must be a number");
  return j.get<double>();
}

}  // namespace detail

/// Parses the model document: n_states, n_actions, feasible, utility (null
/// on infeasible pairs), transition (null rows allowed on infeasible pairs),
/// beta, rho, gamma, optional omega and name. Unknown fields are rejected.
inline RawModel parse_model(const json& doc) {
  using detail::require;
  using detail::shape_error;
  static const std::set<std::string> known{"n_states", "n_actions", "feasible", "utility", "transition",
                                           "beta",     "rho",       "gamma",    "omega",   "name"};
  if (!doc.is_object()) throw shape_error("top level must be an object");
  for (const auto& [key, _] : doc.items())
    if (!known.count(key)) throw shape_error("unknown field '" + key + "'");

  RawModel m;
  m.n_states = detail::get_as<std::size_t>(require(doc, "n_states"), "n_states");
  m.n_actions = detail::get_as<std::size_t>(require(doc, "n_actions"), "n_actions");
  m.feasible = detail::get_as<std::vector<std::vector<ActionIndex>>>(require(doc, "feasible"), "feasible");
  m.beta = detail::number(require(doc, "beta"), "beta");
  m.rho = detail::number(require(doc, "rho"), "rho");
  m.gamma = detail::number(require(doc, "gamma"), "gamma");

  const json& util = require(doc, "utility");
  if (!util.is_array()) throw shape_error("'utility' must be a nested array");
  for (const auto& row : util) {
    if (!row.is_array()) throw shape_error("'utility' rows must be arrays");
    auto& out = m.utility.emplace_back();
    for (const auto& x : row) {
      if (x.is_null()) out.emplace_back();
      else out.emplace_back(detail::number(x, "utility"));
    }
  }

  const json& tr = require(doc, "transition");
  if (!tr.is_array()) throw shape_error("'transition' must be a nested array");
  for (const auto& per_state : tr) {
    if (!per_state.is_array()) throw shape_error("'transition' entries must be arrays");
    auto& out = m.transition.emplace_back();
    for (const auto& row : per_state) {
      if (row.is_null()) out.emplace_back();
      else out.push_back(detail::get_as<std::vector<double>>(row, "transition"));
    }
  }

  if (auto it = doc.find("omega"); it != doc.end()) m.omega = detail::get_as<std::vector<double>>(*it, "omega");
  if (auto it = doc.find("name"); it != doc.end()) m.name = detail::get_as<std::string>(*it, "name");
  return m;
}

inline RawModel parse_model(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw detail::shape_error(std::string("not valid JSON: ") + e.what());
  }
  return parse_model(doc);
}

inline RawModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw detail::shape_error("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  RawModel m = parse_model(ss.str());
  return m;
}

inline json model_to_json(const Mdp& mdp) {
  const RawModel m = mdp.raw();
  json util = json::array(), tr = json::array();
  for (StateIndex s = 0; s < m.n_states; ++s) {
    json urow = json::array(), trow = json::array();
    for (ActionIndex a = 0; a < m.n_actions; ++a) {
      urow.push_back(m.utility[s][a] ? json(*m.utility[s][a]) : json(nullptr));
      trow.push_back(m.transition[s][a].empty() ? json(nullptr) : json(m.transition[s][a]));
    }
    util.push_back(urow);
    tr.push_back(trow);
  }
  json doc{{"n_states", m.n_states}, {"n_actions", m.n_actions}, {"feasible", m.feasible},
           {"utility", util},        {"transition", tr},         {"beta", m.beta},
           {"rho", m.rho},           {"gamma", m.gamma},         {"omega", m.omega}};
  if (!m.name.empty()) doc["name"] = m.name;
  return doc;
}

// ---------------------------------------------------------------------------
// Reports

inline json to_json(const DerivedParams& d) {
  return {{"case", to_string(d.case_class)},
          {"machinery", to_string(d.machinery)},
          {"operator", to_string(operator_kind(d).tag)},
          {"theta", d.theta},
          {"M", d.M},
          {"c", d.c},
          {"delta", d.delta},
          {"exponent_back", d.exponent_back}};
}

inline json to_json(const SolveReport& r) {
  json trace{{"iter", json::array()}, {"step_norm", json::array()}, {"apriori", json::array()},
             {"aposteriori", json::array()}};
  for (const auto& t : r.trace) {
    trace["iter"].push_back(t.iter);
    trace["step_norm"].push_back(t.step_norm);
    trace["apriori"].push_back(t.apriori);
    trace["aposteriori"].push_back(t.aposteriori);
  }
  return {{"derived", to_json(r.derived)},
          {"tolerance", r.tol},
          {"iterations", r.iterations},
          {"certified_error", r.certified_error},
          {"bellman_residual", r.bellman_residual},
          {"banach_constant", r.banach_constant},
          {"w_star", r.w_star.values},
          {"v_star", r.v_star.values},
          {"policy", r.policy.actions},
          {"trace", trace}};
}

inline CaseClass case_from_string(const std::string& s) {
  for (CaseClass c : {CaseClass::Case1, CaseClass::Case2, CaseClass::Case3, CaseClass::Case4, CaseClass::ThetaOne,
                      CaseClass::Unsupported})
    if (s == to_string(c)) return c;
  throw std::invalid_argument("unknown case tag '" + s + "'");
}

/// Inverse of to_json(SolveReport); the r table is not part of the report.
inline SolveReport solve_report_from_json(const json& j) {
  SolveReport r{};
  const json& d = j.at("derived");
  r.derived.case_class = case_from_string(d.at("case").get<std::string>());
  r.derived.machinery = case_from_string(d.at("machinery").get<std::string>());
  r.derived.theta = d.at("theta").get<double>();
  r.derived.M = d.at("M").get<double>();
  r.derived.c = d.at("c").get<double>();
  r.derived.delta = d.at("delta").get<double>();
  r.derived.exponent_back = d.at("exponent_back").get<double>();
  r.case_class = r.derived.case_class;
  r.tol = j.at("tolerance").get<double>();
  r.iterations = j.at("iterations").get<std::size_t>();
  r.certified_error = j.at("certified_error").get<double>();
  r.bellman_residual = j.at("bellman_residual").get<double>();
  r.banach_constant = j.at("banach_constant").get<double>();
  r.w_star = {j.at("w_star").get<std::vector<double>>(), Space::W};
  r.v_star = {j.at("v_star").get<std::vector<double>>(), Space::V};
  r.policy = {j.at("policy").get<std::vector<ActionIndex>>()};
  const json& t = j.at("trace");
  for (std::size_t i = 0; i < t.at("iter").size(); ++i)
    r.trace.push_back({t["iter"][i].get<std::size_t>(), t["step_norm"][i].get<double>(),
                       t["apriori"][i].get<double>(), t["aposteriori"][i].get<double>()});
  return r;
}

inline json to_json(const DuPoint& p) {
  return {{"param", p.param}, {"g1", p.g1},     {"g2", p.g2},     {"epsilon", p.epsilon},
          {"defect", p.defect}, {"B", p.B}, {"rate", p.rate}, {"product", p.product}};
}

inline json to_json(const DuBoundReport& r) {
  json j{{"kind", to_string(r.kind)},       {"param_star", r.param_star},     {"epsilon", r.epsilon},
         {"B", r.B},                        {"rate", r.rate},                 {"product", r.product},
         {"banach_delta", r.banach_delta},  {"banach_L", r.banach_L},         {"winner", r.winner},
         {"multimodal", r.multimodal}};
  if (r.rate_only) j["rate_only"] = to_json(*r.rate_only);
  else j["rate_only"] = {{"note", r.rate_only_note}};
  return j;
}

inline json to_json(const EvalReport& r) {
  json hv = json::array();
  for (const auto& v : r.horizon_values) hv.push_back(v.values);
  return {{"horizon_values", hv},
          {"limit_value", r.limit_value.values},
          {"monotone_direction", to_string(r.monotone_direction)}};
}

inline json to_json(const AuditReport& r) {
  return {{"seed", r.seed},
          {"n_random", r.n_random},
          {"horizon", r.horizon},
          {"tolerance", r.tolerance},
          {"worst_margin", r.worst_margin},
          {"worst_plan", r.worst_plan},
          {"worst_state", r.worst_state},
          {"f_star_value", r.f_star_value.values},
          {"f_star_gap", r.f_star_gap},
          {"passed", true}};
}

/// Wraps a result with provenance. `wall_clock_seconds` is the only field
/// that varies between identical runs.
inline json run_report(const std::string& command, const std::string& model_name, const json& parameters,
                       const json& result, double wall_clock_seconds) {
  return {{"version", kVersion},
          {"command", command},
          {"model", model_name},
          {"parameters", parameters},
          {"result", result},
          {"wall_clock_seconds", wall_clock_seconds}};
}

inline void write_trace_csv(std::ostream& os, const std::vector<TraceRecord>& trace) {
  os << "iter,step_norm,apriori,aposteriori\n";
  os.precision(17);
  for (const auto& t : trace) os << t.iter << ',' << t.step_norm << ',' << t.apriori << ',' << t.aposteriori << '\n';
}

}  // namespace ezdp::io
