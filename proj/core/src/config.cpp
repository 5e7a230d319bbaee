#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "armec/types.hpp"

namespace armec {

using nlohmann::json;

double distance(const Point3& a, const Point3& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  const double dz = a.z - b.z;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

ScenarioConfig default_config() {
  ScenarioConfig cfg;
  cfg.compute.users = {
      {250e3, 4e8, 700.0},
      {300e3, 5e8, 750.0},
      {350e3, 6e8, 800.0},
  };
  cfg.compute.edge_cpu_total_hz = 50e9;
  return cfg;
}

double active_amp_budget(const ScenarioConfig& cfg) {
  return cfg.amp_efficiency *
         (cfg.total_power_w - cfg.num_elements * (cfg.dc_bias_w + cfg.circuit_power_w));
}

double passive_power_budget(const ScenarioConfig& cfg) {
  return cfg.total_power_w - cfg.num_elements * cfg.circuit_power_w;
}

namespace {

void require_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw ConfigError(ConfigErrorCode::NonPositiveParameter,
                      std::string(name) + " must be positive and finite");
  }
}

void require_positive(int value, const char* name) {
  if (value <= 0) {
    throw ConfigError(ConfigErrorCode::NonPositiveParameter, std::string(name) + " must be positive");
  }
}

}  // namespace

ScenarioConfig validate_config(ScenarioConfig cfg, SurfaceMode mode) {
  require_positive(cfg.num_antennas, "num_antennas");
  require_positive(cfg.num_elements, "num_elements");
  require_positive(cfg.num_users(), "num_users");
  require_positive(cfg.bandwidth_hz, "bandwidth");
  require_positive(cfg.ris_noise_w, "ris_noise");
  require_positive(cfg.ap_noise_w, "ap_noise");
  require_positive(cfg.max_user_power_w, "max_user_power");
  require_positive(cfg.total_power_w, "total_power");
  require_positive(cfg.amp_efficiency, "amp_efficiency");
  if (cfg.amp_efficiency > 1.0) {
    throw ConfigError(ConfigErrorCode::NonPositiveParameter, "amp_efficiency must lie in (0, 1]");
  }
  require_positive(cfg.dc_bias_w, "dc_bias");
  require_positive(cfg.circuit_power_w, "circuit_power");
  require_positive(cfg.path_loss.user_ris, "path_loss.user_ris");
  require_positive(cfg.path_loss.ris_ap, "path_loss.ris_ap");
  require_positive(cfg.path_loss.user_ap, "path_loss.user_ap");
  for (const auto* g : {&cfg.gain_override.user_ris, &cfg.gain_override.ris_ap,
                        &cfg.gain_override.user_ap}) {
    if (g->has_value() && (!(**g >= 0.0) || !std::isfinite(**g))) {
      throw ConfigError(ConfigErrorCode::NonPositiveParameter, "gain overrides must be >= 0");
    }
  }
  for (const auto& u : cfg.compute.users) {
    require_positive(u.task_bits, "task_bits");
    require_positive(u.local_cpu_hz, "local_cpu_hz");
    require_positive(u.cycles_per_bit, "cycles_per_bit");
    if (u.task_bits != std::floor(u.task_bits)) {
      throw ConfigError(ConfigErrorCode::NonPositiveParameter, "task_bits must be an integer");
    }
  }
  require_positive(cfg.compute.edge_cpu_total_hz, "edge_cpu_total_hz");
  require_positive(cfg.algorithm.outer_max_iter, "outer_max_iter");
  require_positive(cfg.algorithm.sca_max_iter, "sca_max_iter");
  require_positive(cfg.algorithm.solver_tol, "solver_tol");
  require_positive(cfg.algorithm.solver_max_iter, "solver_max_iter");
  if (cfg.algorithm.outer_tol < 0.0 || cfg.algorithm.sca_tol < 0.0) {
    throw ConfigError(ConfigErrorCode::NonPositiveParameter, "tolerances must be >= 0");
  }

  const auto& geo = cfg.geometry;
  if (!geo.user_positions.empty() &&
      static_cast<int>(geo.user_positions.size()) != cfg.num_users()) {
    throw ConfigError(ConfigErrorCode::DimensionMismatch,
                      "user_positions must list one position per user");
  }
  if (geo.user_area_side < 0.0) {
    throw ConfigError(ConfigErrorCode::NonPositiveParameter, "user_area_side must be >= 0");
  }
  if (distance(geo.ap, geo.ris) <= 0.0) {
    throw ConfigError(ConfigErrorCode::NonPositiveParameter, "RIS and AP positions coincide");
  }
  for (const auto& p : geo.user_positions) {
    if (distance(p, geo.ap) <= 0.0 || distance(p, geo.ris) <= 0.0) {
      throw ConfigError(ConfigErrorCode::NonPositiveParameter, "a user coincides with the AP or RIS");
    }
  }

  if (mode == SurfaceMode::Passive) {
    if (passive_power_budget(cfg) < -1e-12 * cfg.total_power_w) {
      std::ostringstream os;
      os << "passive surface with M = " << cfg.num_elements
         << " draws more than P_tot in circuit power";
      throw ConfigError(ConfigErrorCode::NonPositiveBudget, os.str());
    }
    cfg.amp_budget_w = std::numeric_limits<double>::infinity();
    return cfg;
  }
  if (cfg.amp_budget_override_w.has_value()) {
    if (!(*cfg.amp_budget_override_w >= 0.0)) {
      throw ConfigError(ConfigErrorCode::NonPositiveBudget, "amplification budget override < 0");
    }
    cfg.amp_budget_w = *cfg.amp_budget_override_w;
  } else {
    cfg.amp_budget_w = active_amp_budget(cfg);
    if (!(cfg.amp_budget_w > 0.0)) {
      std::ostringstream os;
      os << "amplification budget xi*(P_tot - M*(P_DC + P_c)) = " << cfg.amp_budget_w
         << " W is not positive for M = " << cfg.num_elements;
      throw ConfigError(ConfigErrorCode::NonPositiveBudget, os.str());
    }
  }
  return cfg;
}

void check_channels(const ChannelSet& ch, const ScenarioConfig& cfg) {
  const int n = cfg.num_antennas;
  const int m = cfg.num_elements;
  const int k = cfg.num_users();
  if (ch.H.rows() != n || ch.H.cols() != m || ch.num_users() != k ||
      static_cast<int>(ch.g.size()) != k) {
    throw ConfigError(ConfigErrorCode::DimensionMismatch, "channel dimensions do not match config");
  }
  for (int u = 0; u < k; ++u) {
    if (ch.h[u].size() != m || ch.g[u].size() != n) {
      throw ConfigError(ConfigErrorCode::DimensionMismatch, "channel vector length mismatch");
    }
  }
  auto finite = [](const auto& mtx) { return mtx.allFinite(); };
  bool ok = finite(ch.H);
  for (int u = 0; u < k; ++u) ok = ok && finite(ch.h[u]) && finite(ch.g[u]);
  if (!ok) throw std::invalid_argument("channel contains non-finite entries");
}

double ris_amplification_power(const CVector& theta, const RVector& power, const ChannelSet& ch,
                               double ris_noise_w) {
  double total = theta.squaredNorm() * ris_noise_w;
  for (int k = 0; k < ch.num_users(); ++k) {
    total += power(k) * theta.cwiseProduct(ch.h[k]).squaredNorm();
  }
  return total;
}

FeasibilityReport check_feasibility(const SolutionState& s, const ScenarioConfig& cfg,
                                    const ChannelSet& ch, double tol,
                                    std::optional<double> amp_budget_w) {
  FeasibilityReport rep;
  const int num_users = cfg.num_users();
  auto flag = [&](double violation, const std::string& what) {
    rep.max_violation = std::max(rep.max_violation, violation);
    if (violation > tol) {
      rep.ok = false;
      rep.violations.push_back(what);
    }
  };
  if (s.power.size() != num_users || s.edge_cpu.size() != num_users ||
      static_cast<int>(s.offload_bits.size()) != num_users || s.theta.size() != cfg.num_elements) {
    rep.ok = false;
    rep.max_violation = std::numeric_limits<double>::infinity();
    rep.violations.push_back("state dimensions");
    return rep;
  }
  const double pmax = cfg.max_user_power_w;
  double cpu_sum = 0.0;
  for (int k = 0; k < num_users; ++k) {
    flag(std::max(0.0, -s.power(k)) / pmax, "p_k >= 0");
    flag(std::max(0.0, s.power(k) - pmax) / pmax, "p_k <= p_max");
    const double L = cfg.compute.users[k].task_bits;
    const auto l = s.offload_bits[k];
    if (l < 0 || static_cast<double>(l) > L) flag(1.0, "0 <= l_k <= L_k");
    flag(std::max(0.0, -s.edge_cpu(k)) / cfg.compute.edge_cpu_total_hz, "f_E,k >= 0");
    cpu_sum += s.edge_cpu(k);
  }
  flag(std::max(0.0, cpu_sum - cfg.compute.edge_cpu_total_hz) / cfg.compute.edge_cpu_total_hz,
       "sum f_E <= f_E^tot");
  const double budget = amp_budget_w.value_or(cfg.amp_budget_w);
  if (std::isfinite(budget)) {
    const double used = ris_amplification_power(s.theta, s.power, ch, cfg.ris_noise_w);
    const double scale = budget > 0.0 ? budget : 1.0;
    flag(std::max(0.0, used - budget) / scale, "RIS amplification power <= budget");
  }
  return rep;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

double read_power(const json& j, const std::string& stem, double fallback) {
  if (j.contains(stem + "_w")) return j.at(stem + "_w").get<double>();
  if (j.contains(stem + "_mw")) return j.at(stem + "_mw").get<double>() * 1e-3;
  if (j.contains(stem + "_dbm")) return dbm_to_watt(j.at(stem + "_dbm").get<double>());
  return fallback;
}

Point3 read_point(const json& j) {
  if (!j.is_array() || j.size() < 2 || j.size() > 3) {
    throw ConfigError(ConfigErrorCode::Malformed, "positions are [x, y] or [x, y, z]");
  }
  Point3 p{j[0].get<double>(), j[1].get<double>(), 0.0};
  if (j.size() == 3) p.z = j[2].get<double>();
  return p;
}

json write_point(const Point3& p) { return json::array({p.x, p.y, p.z}); }

template <typename T>
void read_opt(const json& j, const char* key, T& out) {
  if (j.contains(key) && !j.at(key).is_null()) out = j.at(key).get<T>();
}

void read_opt_gain(const json& j, const char* key, std::optional<double>& out) {
  if (j.contains(key) && !j.at(key).is_null()) out = j.at(key).get<double>();
}

}  // namespace

std::string config_to_json(const ScenarioConfig& cfg) {
  json j;
  j["schema"] = "armec.scenario/1";
  j["num_antennas"] = cfg.num_antennas;
  j["num_elements"] = cfg.num_elements;
  j["bandwidth_hz"] = cfg.bandwidth_hz;
  j["ris_noise_w"] = cfg.ris_noise_w;
  j["ap_noise_w"] = cfg.ap_noise_w;
  j["max_user_power_w"] = cfg.max_user_power_w;
  j["total_power_w"] = cfg.total_power_w;
  j["amp_efficiency"] = cfg.amp_efficiency;
  j["dc_bias_w"] = cfg.dc_bias_w;
  j["circuit_power_w"] = cfg.circuit_power_w;
  j["amp_budget_override_w"] =
      cfg.amp_budget_override_w ? json(*cfg.amp_budget_override_w) : json(nullptr);
  j["path_loss_exponents"] = {{"user_ris", cfg.path_loss.user_ris},
                              {"ris_ap", cfg.path_loss.ris_ap},
                              {"user_ap", cfg.path_loss.user_ap}};
  auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  j["gain_override"] = {{"user_ris", opt(cfg.gain_override.user_ris)},
                        {"ris_ap", opt(cfg.gain_override.ris_ap)},
                        {"user_ap", opt(cfg.gain_override.user_ap)}};
  const auto& geo = cfg.geometry;
  json users_pos = json::array();
  for (const auto& p : geo.user_positions) users_pos.push_back(write_point(p));
  j["geometry"] = {{"ap", write_point(geo.ap)},
                   {"ris", write_point(geo.ris)},
                   {"user_center", json::array({geo.user_center_x, geo.user_center_y})},
                   {"user_area_side_m", geo.user_area_side},
                   {"user_height_m", geo.user_height},
                   {"user_positions", users_pos}};
  json users = json::array();
  for (const auto& u : cfg.compute.users) {
    users.push_back({{"task_bits", u.task_bits},
                     {"local_cpu_hz", u.local_cpu_hz},
                     {"cycles_per_bit", u.cycles_per_bit}});
  }
  j["users"] = users;
  j["edge_cpu_total_hz"] = cfg.compute.edge_cpu_total_hz;
  j["rng_seed"] = cfg.rng_seed;
  const auto& a = cfg.algorithm;
  j["algorithm"] = {{"outer_tol", a.outer_tol},         {"outer_max_iter", a.outer_max_iter},
                    {"sca_tol", a.sca_tol},             {"sca_max_iter", a.sca_max_iter},
                    {"solver_tol", a.solver_tol},       {"solver_max_iter", a.solver_max_iter}};
  return j.dump(2);
}

ScenarioConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(ConfigErrorCode::Malformed, std::string("config JSON: ") + e.what());
  }
  ScenarioConfig cfg = default_config();
  try {
    read_opt(j, "num_antennas", cfg.num_antennas);
    read_opt(j, "num_elements", cfg.num_elements);
    if (j.contains("bandwidth_mhz")) cfg.bandwidth_hz = j.at("bandwidth_mhz").get<double>() * 1e6;
    read_opt(j, "bandwidth_hz", cfg.bandwidth_hz);
    cfg.ris_noise_w = read_power(j, "ris_noise", cfg.ris_noise_w);
    cfg.ap_noise_w = read_power(j, "ap_noise", cfg.ap_noise_w);
    cfg.max_user_power_w = read_power(j, "max_user_power", cfg.max_user_power_w);
    cfg.total_power_w = read_power(j, "total_power", cfg.total_power_w);
    read_opt(j, "amp_efficiency", cfg.amp_efficiency);
    cfg.dc_bias_w = read_power(j, "dc_bias", cfg.dc_bias_w);
    cfg.circuit_power_w = read_power(j, "circuit_power", cfg.circuit_power_w);
    for (const char* suffix : {"_w", "_mw", "_dbm"}) {
      const std::string key = std::string("amp_budget_override") + suffix;
      if (j.contains(key) && !j.at(key).is_null()) {
        cfg.amp_budget_override_w = read_power(j, "amp_budget_override", 0.0);
      }
    }
    if (j.contains("path_loss_exponents")) {
      const auto& pl = j.at("path_loss_exponents");
      read_opt(pl, "user_ris", cfg.path_loss.user_ris);
      read_opt(pl, "ris_ap", cfg.path_loss.ris_ap);
      read_opt(pl, "user_ap", cfg.path_loss.user_ap);
    }
    if (j.contains("gain_override")) {
      const auto& go = j.at("gain_override");
      read_opt_gain(go, "user_ris", cfg.gain_override.user_ris);
      read_opt_gain(go, "ris_ap", cfg.gain_override.ris_ap);
      read_opt_gain(go, "user_ap", cfg.gain_override.user_ap);
    }
    if (j.contains("geometry")) {
      const auto& g = j.at("geometry");
      auto& geo = cfg.geometry;
      if (g.contains("ap")) geo.ap = read_point(g.at("ap"));
      if (g.contains("ris")) geo.ris = read_point(g.at("ris"));
      if (g.contains("user_center")) {
        const Point3 c = read_point(g.at("user_center"));
        geo.user_center_x = c.x;
        geo.user_center_y = c.y;
      }
      read_opt(g, "user_area_side_m", geo.user_area_side);
      read_opt(g, "user_height_m", geo.user_height);
      if (g.contains("user_positions")) {
        geo.user_positions.clear();
        for (const auto& p : g.at("user_positions")) geo.user_positions.push_back(read_point(p));
      }
    }
    if (j.contains("users")) {
      cfg.compute.users.clear();
      for (const auto& u : j.at("users")) {
        UserProfile prof;
        if (u.contains("task_kbit")) prof.task_bits = u.at("task_kbit").get<double>() * 1e3;
        read_opt(u, "task_bits", prof.task_bits);
        read_opt(u, "local_cpu_hz", prof.local_cpu_hz);
        read_opt(u, "cycles_per_bit", prof.cycles_per_bit);
        cfg.compute.users.push_back(prof);
      }
    }
    if (j.contains("num_users") && j.at("num_users").get<int>() != cfg.num_users()) {
      throw ConfigError(ConfigErrorCode::DimensionMismatch,
                        "num_users does not match the length of users");
    }
    read_opt(j, "edge_cpu_total_hz", cfg.compute.edge_cpu_total_hz);
    read_opt(j, "rng_seed", cfg.rng_seed);
    if (j.contains("algorithm")) {
      const auto& a = j.at("algorithm");
      read_opt(a, "outer_tol", cfg.algorithm.outer_tol);
      read_opt(a, "outer_max_iter", cfg.algorithm.outer_max_iter);
      read_opt(a, "sca_tol", cfg.algorithm.sca_tol);
      read_opt(a, "sca_max_iter", cfg.algorithm.sca_max_iter);
      read_opt(a, "solver_tol", cfg.algorithm.solver_tol);
      read_opt(a, "solver_max_iter", cfg.algorithm.solver_max_iter);
    }
  } catch (const json::exception& e) {
    throw ConfigError(ConfigErrorCode::Malformed, std::string("config JSON: ") + e.what());
  }
  return cfg;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return config_from_json(ss.str());
}

}  // namespace armec
