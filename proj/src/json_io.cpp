#include "relaybc/json_io.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace relaybc {

using nlohmann::json;

namespace {

Coord coord_from(const json& j) {
  if (!j.is_array() || j.size() != 2) {
    throw std::invalid_argument("coordinates must be [x, y] arrays");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

double sigma2_from(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_object()) {
    if (j.contains("w_per_hz")) return j["w_per_hz"].get<double>();
    if (j.contains("dbm_per_hz")) {
      return std::pow(10.0, j["dbm_per_hz"].get<double>() / 10.0) * 1e-3;
    }
  }
  throw std::invalid_argument(
      "sigma2 must be a number, {\"w_per_hz\":..} or {\"dbm_per_hz\":..}");
}

}  // namespace

void apply_overrides(NetworkConfig& cfg, const json& j) {
  if (!j.is_object()) {
    throw std::invalid_argument("config must be a JSON object");
  }
  if (j.contains("coord_s")) cfg.coord_s = coord_from(j["coord_s"]);
  if (j.contains("coord_r")) cfg.coord_r = coord_from(j["coord_r"]);
  if (j.contains("coord_d")) cfg.coord_d = coord_from(j["coord_d"]);
  if (j.contains("alpha1")) cfg.alpha1 = j["alpha1"].get<double>();
  if (j.contains("alpha2")) cfg.alpha2 = j["alpha2"].get<double>();
  if (j.contains("alpha3")) cfg.alpha3 = j["alpha3"].get<double>();
  if (j.contains("xi_sd")) cfg.xi_sd = j["xi_sd"].get<double>();
  if (j.contains("xi_sr")) cfg.xi_sr = j["xi_sr"].get<double>();
  if (j.contains("xi_rd")) cfg.xi_rd = j["xi_rd"].get<double>();
  if (j.contains("Ts")) cfg.Ts = j["Ts"].get<double>();
  if (j.contains("W")) cfg.W = j["W"].get<double>();
  if (j.contains("sigma2")) cfg.sigma2 = sigma2_from(j["sigma2"]);
  if (j.contains("eta")) cfg.eta = j["eta"].get<double>();
  if (j.contains("Pc")) cfg.Pc = j["Pc"].get<double>();
  if (j.contains("P")) cfg.P = j["P"].get<double>();
  if (j.contains("Pmax")) cfg.Pmax = j["Pmax"].get<double>();
  if (j.contains("L")) cfg.L = j["L"].get<int>();
}

NetworkConfig config_from_json(const json& j) {
  NetworkConfig cfg = NetworkConfig::reference();
  apply_overrides(cfg, j);
  cfg.validate();
  return cfg;
}

NetworkConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config: " + path);
  json j;
  in >> j;
  return config_from_json(j);
}

json config_to_json(const NetworkConfig& cfg) {
  json j;
  j["coord_s"] = {cfg.coord_s.x, cfg.coord_s.y};
  j["coord_r"] = {cfg.coord_r.x, cfg.coord_r.y};
  j["coord_d"] = {cfg.coord_d.x, cfg.coord_d.y};
  j["alpha1"] = cfg.alpha1;
  j["alpha2"] = cfg.alpha2;
  j["alpha3"] = cfg.alpha3;
  j["xi_sd"] = cfg.xi_sd;
  j["xi_sr"] = cfg.xi_sr;
  j["xi_rd"] = cfg.xi_rd;
  j["Ts"] = cfg.Ts;
  j["W"] = cfg.W;
  j["sigma2"] = {{"w_per_hz", cfg.sigma2}};
  j["eta"] = cfg.eta;
  j["Pc"] = cfg.Pc;
  j["P"] = cfg.P;
  j["Pmax"] = cfg.Pmax;
  j["L"] = cfg.L;
  return j;
}

json breakdown_to_json(const RateBreakdown& bd) {
  return json{{"r_sd", bd.r_sd},
              {"r_sr", bd.r_sr},
              {"r_relay", bd.r_relay},
              {"r_sum", bd.r_sum},
              {"gamma_sd", bd.gamma_sd},
              {"gamma_sr", bd.gamma_sr},
              {"gamma_rd", bd.gamma_rd},
              {"case_label", to_string(bd.case_label)}};
}

json report_to_json(const SolverReport& rep, const NetworkConfig& cfg) {
  json j;
  j["feasible"] = rep.feasible;
  if (!rep.feasible) j["failed_stage"] = rep.failed_stage;
  j["throughput_bits"] = rep.throughput;
  j["allocation"] = {{"M", rep.allocation.M},
                     {"N", rep.allocation.N},
                     {"P0_w", rep.allocation.P0},
                     {"P1_w", rep.allocation.P1},
                     {"beta", rep.allocation.beta},
                     {"eigenvalues", rep.allocation.eigenvalues}};
  j["breakdown"] = breakdown_to_json(rep.breakdown);
  j["continuous"] = {{"feasible", rep.continuous.feasible},
                     {"P0_w", rep.continuous.P0},
                     {"P1_w", rep.continuous.P1},
                     {"rho", rep.continuous.rho},
                     {"beta", rep.continuous.beta},
                     {"t_bits", rep.continuous.t},
                     {"case", to_string(rep.continuous.branch)}};
  json trace = json::array();
  for (const auto& it : rep.sca_trace) {
    trace.push_back(
        {{"rho", it.rho}, {"a", it.a}, {"b", it.b}, {"t_bits", it.t}});
  }
  j["sca_trace"] = trace;
  j["integer_rule"] = to_string(rep.integer_rule);
  j["iterations"] = rep.iterations;
  j["E_joules"] = cfg.P * cfg.Ts;
  j["log_guard_activations"] = rep.log_guard_activations;
  return j;
}

}  // namespace relaybc
