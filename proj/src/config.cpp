#include "petc/config.hpp"

#include <cstdlib>
#include <fstream>

#include "petc/errors.hpp"

namespace petc {

namespace {

using nlohmann::json;

Rational scalar(const json& v, const std::string& name) {
  try {
    if (v.is_string()) return parse_rational(v.get<std::string>());
    if (v.is_number_integer()) return Rational(v.get<long>());
    if (v.is_number()) return decimal_rational(v.get<double>());
  } catch (const std::invalid_argument& e) {
    throw ConfigError("field '" + name + "': " + e.what());
  }
  throw ConfigError("field '" + name + "' must be a number or a rational string");
}

Eigen::MatrixXd matrix(const json& v, const std::string& name) {
  if (!v.is_array() || v.empty()) throw ConfigError("field '" + name + "' must be a non-empty array of rows");
  const size_t rows = v.size();
  const size_t cols = v[0].is_array() ? v[0].size() : 0;
  if (cols == 0) throw ConfigError("field '" + name + "' must be an array of non-empty rows");
  Eigen::MatrixXd m(rows, cols);
  for (size_t i = 0; i < rows; ++i) {
    if (!v[i].is_array() || v[i].size() != cols) throw ConfigError("field '" + name + "': ragged rows");
    for (size_t j = 0; j < cols; ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          scalar(v[i][j], name).get_d();
  }
  return m;
}

const json& required(const json& j, const char* key) {
  if (!j.contains(key)) throw ConfigError(std::string("missing field '") + key + "'");
  return j.at(key);
}

}  // namespace

Rational Config::resolved_h_max() const { return h_max ? *h_max : Rational(2 * sys.k_bar * sys.h); }

Config parse_config(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  Config c;
  c.sys.A = matrix(required(j, "A"), "A");
  c.sys.B = matrix(required(j, "B"), "B");
  c.sys.K = matrix(required(j, "K"), "K");
  c.sys.P = matrix(required(j, "P_lyap"), "P_lyap");
  c.sys.h = scalar(required(j, "h"), "h");
  const json& kb = required(j, "k_bar");
  if (!kb.is_number_integer()) throw ConfigError("field 'k_bar' must be an integer");
  c.sys.k_bar = kb.get<int>();
  c.sys.r = scalar(required(j, "r"), "r");
  if (j.contains("V0")) c.sys.V0 = scalar(j["V0"], "V0");

  const bool has_q = j.contains("Q_trig");
  const bool has_pred = j.contains("Q_lyap") || j.contains("rho");
  if (has_q && has_pred) throw ConfigError("ambiguous trigger: give either Q_trig or {Q_lyap, rho}, not both");
  if (!has_q && !has_pred) throw ConfigError("missing trigger: give Q_trig or {Q_lyap, rho}");
  if (sgn(c.sys.h) <= 0) throw ConfigError("h must be positive");
  if (has_q) {
    c.sys.Q_trig = matrix(j["Q_trig"], "Q_trig");
  } else {
    PredictiveTriggerSpec spec;
    spec.P_lyap = c.sys.P;
    spec.Q_lyap = matrix(required(j, "Q_lyap"), "Q_lyap");
    spec.rho = scalar(required(j, "rho"), "rho").get_d();
    c.sys.Q_trig = build_predictive_Q(spec, c.sys.A, c.sys.B, c.sys.K, c.sys.h.get_d());
    c.predictive = spec;
  }
  c.sys.validate();

  if (j.contains("h_P") && !j["h_P"].is_null()) c.h_P = scalar(j["h_P"], "h_P");
  if (j.contains("hP_resolution")) c.hP_resolution = scalar(j["hP_resolution"], "hP_resolution");
  if (j.contains("h_max")) c.h_max = scalar(j["h_max"], "h_max");
  if (j.contains("a_tol")) c.a_tol = scalar(j["a_tol"], "a_tol");
  if (j.contains("a") && !j["a"].is_null()) c.a = scalar(j["a"], "a");
  if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("count_eps")) c.count_eps = j["count_eps"].get<bool>();
  if (j.contains("prefix_pruning")) c.prefix_pruning = j["prefix_pruning"].get<bool>();
  if (j.contains("assume_sat")) c.assume_sat = j["assume_sat"].get<bool>();
  if (j.contains("trivial_cap")) c.trivial_cap = j["trivial_cap"].get<std::uint64_t>();

  if (j.contains("solver")) {
    const json& s = j["solver"];
    if (!s.is_object()) throw ConfigError("field 'solver' must be an object");
    if (s.contains("path")) c.solver.path = s["path"].get<std::string>();
    if (s.contains("args")) c.solver.args = s["args"].get<std::vector<std::string>>();
    if (s.contains("per_query_budget_s")) c.solver.budget_s = s["per_query_budget_s"].get<double>();
    if (s.contains("workers")) c.solver.workers = s["workers"].get<int>();
    if (s.contains("reduce")) c.solver.reduce = s["reduce"].get<bool>();
  }
  if (const char* env = std::getenv("PETC_SOLVER"); env && *env) c.solver.path = env;
  if (!(c.solver.budget_s > 0)) throw ConfigError("solver.per_query_budget_s must be positive");
  if (c.solver.path.empty()) throw ConfigError("solver.path is empty");
  if (sgn(c.hP_resolution) <= 0) throw ConfigError("hP_resolution must be positive");
  if (sgn(c.a_tol) <= 0 || c.a_tol >= 1) throw ConfigError("a_tol must lie in (0, 1)");
  if (c.a && (sgn(*c.a) <= 0 || *c.a >= 1)) throw ConfigError("a must lie in (0, 1)");
  if (c.h_P && sgn(*c.h_P) <= 0) throw ConfigError("h_P must be positive");
  return c;
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config '" + path + "': " + e.what());
  }
  try {
    return parse_config(j);
  } catch (const json::exception& e) {
    throw ConfigError("config '" + path + "': " + e.what());
  }
}

json casestudy_json() {
  return json::parse(R"({
  "A": [[0, 1], [-2, 3]],
  "B": [[0], [1]],
  "K": [[1, -4]],
  "P_lyap": [[1, 0.25], [0.25, 1]],
  "Q_lyap": [[0.5, 0.25], [0.25, 1.5]],
  "rho": 0.8,
  "h": 0.1,
  "k_bar": 6,
  "r": 0.1,
  "V0": 1,
  "hP_resolution": 0.01,
  "a_tol": 0.001,
  "seed": 2021,
  "solver": {"path": "z3", "args": ["-in"], "per_query_budget_s": 30}
})");
}

Config casestudy_config() { return parse_config(casestudy_json()); }

}  // namespace petc
