// Network scenario: scalar configuration, seeded topology generation and the
// flat key-value config / topology table file formats.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace udn {

struct BlockageConfig {
  double los_threshold_m = 25.0;  // at or below: line of sight
  double exp_los_bs_user = 2.0;
  double exp_nlos_bs_user = 3.4;
  double exp_los_bs_bs = 2.0;
  double exp_nlos_bs_bs = 3.5;
  double shadow_los_bs_user = 5.9;   // shadowing std dev, dB
  double shadow_nlos_bs_user = 7.6;
  double shadow_los_bs_bs = 6.5;
  double shadow_nlos_bs_bs = 7.9;
  bool deterministic_shadowing = false;  // if set, shadowing term is 0 dB

  void validate() const;
};

struct ScenarioConfig {
  double macro_radius_m = 100.0;
  std::size_t n_small_cells = 30;
  std::size_t n_users = 120;
  double p_max_macro_dbm = 9.5;
  double p_max_small_dbm = 4.7;
  double circuit_power_w = 3e-4;  // per BS
  double noise_dbm = -134.0;
  double bandwidth_hz = 1.2e9;
  double wavelength_m = 0.005;
  double ref_distance_m = 1.0;
  double pathloss_exponent = 2.0;  // in [2, 6]
  double harvest_eff = 0.8;        // psi in [0, 1]
  double qos_rate = 1.0;           // R_t, spectral rate target of the served share
  double interference_cap_w = 1e-6;  // I_j, per BS
  double initial_power_w = 1e-5;     // p0
  double tx_antenna_gain = 1.0;      // linear
  double rx_antenna_gain = 1.0;      // linear
  std::uint64_t rng_seed = 17;
  std::optional<BlockageConfig> blockage;

  double noise_w() const;       // sigma^2 in Watts
  double p_max_macro_w() const;
  double p_max_small_w() const;

  void validate() const;  // throws ConfigError on violated invariants
};

// dBm <-> Watt conversions used everywhere a dB quantity enters the model.
double dbm_to_watt(double dbm);
double db_to_linear(double db);

enum class Tier { Macro, Small };

struct BaseStation {
  int id = 0;
  double x_m = 0.0;
  double y_m = 0.0;
  Tier tier = Tier::Small;
  double p_max_w = 0.0;
  double circuit_power_w = 0.0;
};

struct User {
  int id = 0;
  double x_m = 0.0;
  double y_m = 0.0;
};

struct Topology {
  std::vector<BaseStation> base_stations;  // index 0 is the macro, at the origin
  std::vector<User> users;

  std::size_t n_bs() const { return base_stations.size(); }
  std::size_t n_users() const { return users.size(); }
};

// Macro BS at the origin; small cells and users drawn independently and
// uniformly on the disk of radius macro_radius_m (inverse-CDF radius, so
// r = R*sqrt(u)). Identical config+seed gives an identical topology.
Topology generate_topology(const ScenarioConfig& cfg);

double distance(const BaseStation& b, const User& u);
double distance(const BaseStation& a, const BaseStation& b);

// --- config file: flat "key = value" lines, '#' comments, unknown keys rejected.
// Keys override the fields of `base`, which defaults to the desk profile.
ScenarioConfig load_scenario_config(std::istream& in, ScenarioConfig base = {});
ScenarioConfig load_scenario_config_file(const std::string& path, ScenarioConfig base = {});
void save_scenario_config(const ScenarioConfig& cfg, std::ostream& out);

// --- topology table: one line per node (id kind x_m y_m p_max_w p_c_w).
void save_topology(const Topology& topo, std::ostream& out);
Topology load_topology(std::istream& in);

// Shipped profiles. "desk" runs in CI scale, "paper" is the full-size setup.
ScenarioConfig desk_profile();
ScenarioConfig paper_profile();

}  // namespace udn
