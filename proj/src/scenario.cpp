#include "udn/scenario.hpp"

#include "udn/errors.hpp"
#include "udn/rng.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace udn {

double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

double ScenarioConfig::noise_w() const { return dbm_to_watt(noise_dbm); }
double ScenarioConfig::p_max_macro_w() const { return dbm_to_watt(p_max_macro_dbm); }
double ScenarioConfig::p_max_small_w() const { return dbm_to_watt(p_max_small_dbm); }

void BlockageConfig::validate() const {
  if (los_threshold_m <= 0.0) throw ConfigError("los_threshold_m must be positive");
  const double exps[] = {exp_los_bs_user, exp_nlos_bs_user, exp_los_bs_bs, exp_nlos_bs_bs};
  for (double e : exps)
    if (e <= 0.0) throw ConfigError("blockage path-loss exponents must be positive");
  if (exp_los_bs_user > exp_nlos_bs_user)
    throw ConfigError("LOS exponent must not exceed NLOS exponent (bs-user)");
  if (exp_los_bs_bs > exp_nlos_bs_bs)
    throw ConfigError("LOS exponent must not exceed NLOS exponent (bs-bs)");
  const double shadows[] = {shadow_los_bs_user, shadow_nlos_bs_user, shadow_los_bs_bs,
                            shadow_nlos_bs_bs};
  for (double s : shadows)
    if (s < 0.0) throw ConfigError("shadowing std devs must be non-negative");
}

void ScenarioConfig::validate() const {
  if (macro_radius_m <= 0.0) throw ConfigError("macro_radius_m must be positive");
  if (circuit_power_w <= 0.0) throw ConfigError("circuit_power_w must be positive");
  if (bandwidth_hz <= 0.0) throw ConfigError("bandwidth_hz must be positive");
  if (wavelength_m <= 0.0) throw ConfigError("wavelength_m must be positive");
  if (ref_distance_m <= 0.0) throw ConfigError("ref_distance_m must be positive");
  if (initial_power_w <= 0.0) throw ConfigError("initial_power_w must be positive");
  if (tx_antenna_gain <= 0.0 || rx_antenna_gain <= 0.0)
    throw ConfigError("antenna gains must be positive");
  if (pathloss_exponent < 2.0 || pathloss_exponent > 6.0)
    throw ConfigError("pathloss_exponent must lie in [2, 6]");
  if (harvest_eff < 0.0 || harvest_eff > 1.0)
    throw ConfigError("harvest_eff must lie in [0, 1]");
  if (qos_rate < 0.0) throw ConfigError("qos_rate must be non-negative");
  if (interference_cap_w <= 0.0) throw ConfigError("interference_cap_w must be positive");
  if (blockage) blockage->validate();
}

double distance(const BaseStation& b, const User& u) {
  return std::hypot(b.x_m - u.x_m, b.y_m - u.y_m);
}

double distance(const BaseStation& a, const BaseStation& b) {
  return std::hypot(a.x_m - b.x_m, a.y_m - b.y_m);
}

Topology generate_topology(const ScenarioConfig& cfg) {
  cfg.validate();
  Topology topo;
  Rng rng(cfg.rng_seed);

  auto draw_point = [&](double& x, double& y) {
    // inverse-CDF disk sampling: uniform over the area
    double r = cfg.macro_radius_m * std::sqrt(rng.uniform());
    double th = 2.0 * M_PI * rng.uniform();
    x = r * std::cos(th);
    y = r * std::sin(th);
  };

  BaseStation macro;
  macro.id = 0;
  macro.tier = Tier::Macro;
  macro.p_max_w = cfg.p_max_macro_w();
  macro.circuit_power_w = cfg.circuit_power_w;
  topo.base_stations.push_back(macro);

  for (std::size_t s = 0; s < cfg.n_small_cells; ++s) {
    BaseStation bs;
    bs.id = static_cast<int>(s + 1);
    bs.tier = Tier::Small;
    bs.p_max_w = cfg.p_max_small_w();
    bs.circuit_power_w = cfg.circuit_power_w;
    draw_point(bs.x_m, bs.y_m);
    topo.base_stations.push_back(bs);
  }
  for (std::size_t u = 0; u < cfg.n_users; ++u) {
    User usr;
    usr.id = static_cast<int>(u);
    draw_point(usr.x_m, usr.y_m);
    topo.users.push_back(usr);
  }
  return topo;
}

// ---------------------------------------------------------------------------
// config file io

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("bad numeric value for " + key + ": '" + v + "'");
  }
}

std::size_t parse_count(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    long long x = std::stoll(v, &pos);
    if (pos != v.size() || x < 0) throw std::invalid_argument(v);
    return static_cast<std::size_t>(x);
  } catch (const std::exception&) {
    throw ConfigError("bad count value for " + key + ": '" + v + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "on" || v == "1") return true;
  if (v == "false" || v == "off" || v == "0") return false;
  throw ConfigError("bad boolean value for " + key + ": '" + v + "'");
}

}  // namespace

ScenarioConfig load_scenario_config(std::istream& in, ScenarioConfig base) {
  ScenarioConfig cfg = base;
  BlockageConfig blk = base.blockage ? *base.blockage : BlockageConfig{};
  bool blockage_on = base.blockage.has_value();
  bool saw_blockage_key = false;

  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string s = line;
    std::size_t hash = s.find('#');
    if (hash != std::string::npos) s = s.substr(0, hash);
    s = trim(s);
    if (s.empty()) continue;
    std::size_t eq = s.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(s.substr(0, eq));
    std::string val = trim(s.substr(eq + 1));
    if (key.empty() || val.empty())
      throw ConfigError("line " + std::to_string(lineno) + ": empty key or value");

    if (key == "macro_radius_m") cfg.macro_radius_m = parse_double(key, val);
    else if (key == "n_small_cells") cfg.n_small_cells = parse_count(key, val);
    else if (key == "n_users") cfg.n_users = parse_count(key, val);
    else if (key == "p_max_macro_dbm") cfg.p_max_macro_dbm = parse_double(key, val);
    else if (key == "p_max_small_dbm") cfg.p_max_small_dbm = parse_double(key, val);
    else if (key == "circuit_power_w") cfg.circuit_power_w = parse_double(key, val);
    else if (key == "noise_dbm") cfg.noise_dbm = parse_double(key, val);
    else if (key == "bandwidth_hz") cfg.bandwidth_hz = parse_double(key, val);
    else if (key == "wavelength_m") cfg.wavelength_m = parse_double(key, val);
    else if (key == "ref_distance_m") cfg.ref_distance_m = parse_double(key, val);
    else if (key == "pathloss_exponent") cfg.pathloss_exponent = parse_double(key, val);
    else if (key == "harvest_eff") cfg.harvest_eff = parse_double(key, val);
    else if (key == "qos_rate") cfg.qos_rate = parse_double(key, val);
    else if (key == "interference_cap_w") cfg.interference_cap_w = parse_double(key, val);
    else if (key == "initial_power_w") cfg.initial_power_w = parse_double(key, val);
    else if (key == "tx_antenna_gain") cfg.tx_antenna_gain = parse_double(key, val);
    else if (key == "rx_antenna_gain") cfg.rx_antenna_gain = parse_double(key, val);
    else if (key == "rng_seed") cfg.rng_seed = parse_count(key, val);
    else if (key == "blockage") { blockage_on = parse_bool(key, val); saw_blockage_key = true; }
    else if (key == "los_threshold_m") { blk.los_threshold_m = parse_double(key, val); saw_blockage_key = true; }
    else if (key == "exp_los_bs_user") { blk.exp_los_bs_user = parse_double(key, val); saw_blockage_key = true; }
    else if (key == "exp_nlos_bs_user") { blk.exp_nlos_bs_user = parse_double(key, val); saw_blockage_key = true; }
    else if (key == "exp_los_bs_bs") { blk.exp_los_bs_bs = parse_double(key, val); saw_blockage_key = true; }
    else if (key == "exp_nlos_bs_bs") { blk.exp_nlos_bs_bs = parse_double(key, val); saw_blockage_key = true; }
    else if (key == "shadow_los_bs_user") { blk.shadow_los_bs_user = parse_double(key, val); saw_blockage_key = true; }
    else if (key == "shadow_nlos_bs_user") { blk.shadow_nlos_bs_user = parse_double(key, val); saw_blockage_key = true; }
    else if (key == "shadow_los_bs_bs") { blk.shadow_los_bs_bs = parse_double(key, val); saw_blockage_key = true; }
    else if (key == "shadow_nlos_bs_bs") { blk.shadow_nlos_bs_bs = parse_double(key, val); saw_blockage_key = true; }
    else if (key == "deterministic_shadowing") { blk.deterministic_shadowing = parse_bool(key, val); saw_blockage_key = true; }
    else
      throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
  }
  if (blockage_on)
    cfg.blockage = blk;
  else if (saw_blockage_key && !blockage_on)
    cfg.blockage.reset();
  cfg.validate();
  return cfg;
}

ScenarioConfig load_scenario_config_file(const std::string& path, ScenarioConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file: " + path);
  return load_scenario_config(in, base);
}

void save_scenario_config(const ScenarioConfig& cfg, std::ostream& out) {
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  out << "macro_radius_m = " << num(cfg.macro_radius_m) << "\n"
      << "n_small_cells = " << cfg.n_small_cells << "\n"
      << "n_users = " << cfg.n_users << "\n"
      << "p_max_macro_dbm = " << num(cfg.p_max_macro_dbm) << "\n"
      << "p_max_small_dbm = " << num(cfg.p_max_small_dbm) << "\n"
      << "circuit_power_w = " << num(cfg.circuit_power_w) << "\n"
      << "noise_dbm = " << num(cfg.noise_dbm) << "\n"
      << "bandwidth_hz = " << num(cfg.bandwidth_hz) << "\n"
      << "wavelength_m = " << num(cfg.wavelength_m) << "\n"
      << "ref_distance_m = " << num(cfg.ref_distance_m) << "\n"
      << "pathloss_exponent = " << num(cfg.pathloss_exponent) << "\n"
      << "harvest_eff = " << num(cfg.harvest_eff) << "\n"
      << "qos_rate = " << num(cfg.qos_rate) << "\n"
      << "interference_cap_w = " << num(cfg.interference_cap_w) << "\n"
      << "initial_power_w = " << num(cfg.initial_power_w) << "\n"
      << "tx_antenna_gain = " << num(cfg.tx_antenna_gain) << "\n"
      << "rx_antenna_gain = " << num(cfg.rx_antenna_gain) << "\n"
      << "rng_seed = " << cfg.rng_seed << "\n"
      << "blockage = " << (cfg.blockage ? "on" : "off") << "\n";
  if (cfg.blockage) {
    const BlockageConfig& b = *cfg.blockage;
    out << "los_threshold_m = " << num(b.los_threshold_m) << "\n"
        << "exp_los_bs_user = " << num(b.exp_los_bs_user) << "\n"
        << "exp_nlos_bs_user = " << num(b.exp_nlos_bs_user) << "\n"
        << "exp_los_bs_bs = " << num(b.exp_los_bs_bs) << "\n"
        << "exp_nlos_bs_bs = " << num(b.exp_nlos_bs_bs) << "\n"
        << "shadow_los_bs_user = " << num(b.shadow_los_bs_user) << "\n"
        << "shadow_nlos_bs_user = " << num(b.shadow_nlos_bs_user) << "\n"
        << "shadow_los_bs_bs = " << num(b.shadow_los_bs_bs) << "\n"
        << "shadow_nlos_bs_bs = " << num(b.shadow_nlos_bs_bs) << "\n"
        << "deterministic_shadowing = " << (b.deterministic_shadowing ? "true" : "false")
        << "\n";
  }
}

// ---------------------------------------------------------------------------
// topology table io

void save_topology(const Topology& topo, std::ostream& out) {
  char buf[256];
  out << "# id kind x_m y_m p_max_w p_c_w\n";
  for (const BaseStation& b : topo.base_stations) {
    std::snprintf(buf, sizeof buf, "%d %s %.17g %.17g %.17g %.17g\n", b.id,
                  b.tier == Tier::Macro ? "macro" : "small", b.x_m, b.y_m, b.p_max_w,
                  b.circuit_power_w);
    out << buf;
  }
  for (const User& u : topo.users) {
    std::snprintf(buf, sizeof buf, "%d user %.17g %.17g 0 0\n", u.id, u.x_m, u.y_m);
    out << buf;
  }
}

Topology load_topology(std::istream& in) {
  Topology topo;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string s = trim(line);
    if (s.empty() || s[0] == '#') continue;
    std::istringstream ls(s);
    int id;
    std::string kind;
    double x, y, pmax, pc;
    if (!(ls >> id >> kind >> x >> y >> pmax >> pc))
      throw ConfigError("topology line " + std::to_string(lineno) + ": malformed row");
    if (kind == "user") {
      topo.users.push_back(User{id, x, y});
    } else if (kind == "macro" || kind == "small") {
      BaseStation b;
      b.id = id;
      b.x_m = x;
      b.y_m = y;
      b.tier = kind == "macro" ? Tier::Macro : Tier::Small;
      b.p_max_w = pmax;
      b.circuit_power_w = pc;
      topo.base_stations.push_back(b);
    } else {
      throw ConfigError("topology line " + std::to_string(lineno) + ": unknown kind '" +
                        kind + "'");
    }
  }
  return topo;
}

ScenarioConfig desk_profile() {
  ScenarioConfig cfg;  // defaults are the desk profile
  return cfg;
}

ScenarioConfig paper_profile() {
  ScenarioConfig cfg;
  cfg.n_small_cells = 1500;
  cfg.n_users = 6000;
  return cfg;
}

}  // namespace udn
