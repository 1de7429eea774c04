#include "udn/channel.hpp"

#include "udn/errors.hpp"
#include "udn/power.hpp"
#include "udn/rng.hpp"
#include "udn/solver.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace udn {

double friis_gain(double d_m, const ScenarioConfig& cfg) {
  if (d_m <= 0.0) throw std::domain_error("friis_gain: distance must be positive");
  double ratio = d_m / cfg.ref_distance_m;
  return cfg.tx_antenna_gain * cfg.rx_antenna_gain * cfg.wavelength_m * cfg.wavelength_m /
         (16.0 * M_PI * M_PI * std::pow(ratio, cfg.pathloss_exponent));
}

double blockage_path_loss_db(double d_m, LinkClass link_class, const BlockageConfig& blk,
                             const ScenarioConfig& cfg, double shadow_draw) {
  if (d_m <= 0.0) throw std::domain_error("blockage_path_loss_db: distance must be positive");
  bool los = d_m <= blk.los_threshold_m;
  double eta, shadow_sd;
  if (link_class == LinkClass::BsUser) {
    eta = los ? blk.exp_los_bs_user : blk.exp_nlos_bs_user;
    shadow_sd = los ? blk.shadow_los_bs_user : blk.shadow_nlos_bs_user;
  } else {
    eta = los ? blk.exp_los_bs_bs : blk.exp_nlos_bs_bs;
    shadow_sd = los ? blk.shadow_los_bs_bs : blk.shadow_nlos_bs_bs;
  }
  double shadow_db = blk.deterministic_shadowing ? 0.0 : shadow_sd * shadow_draw;
  return 20.0 * std::log10(4.0 * M_PI * cfg.ref_distance_m / cfg.wavelength_m) +
         10.0 * eta * std::log10(d_m / cfg.ref_distance_m) + shadow_db;
}

GainMatrix build_gain_matrix(const Topology& topo, const ScenarioConfig& cfg) {
  const std::size_t nu = topo.n_users();
  const std::size_t nb = topo.n_bs();
  GainMatrix g;
  g.user_bs = Mat(nu, nb);
  g.bs_bs = Mat(nb, nb);

  // Gain randomness (shadowing) uses its own stream so the topology draws
  // stay stable whether or not blockage is enabled.
  Rng shadow_rng(Rng::derive(cfg.rng_seed, 0x6761696e73ULL));

  auto link_gain = [&](double d, LinkClass cls) {
    if (d < cfg.ref_distance_m) d = cfg.ref_distance_m;  // far-field clamp
    if (!cfg.blockage) return friis_gain(d, cfg);
    double draw = cfg.blockage->deterministic_shadowing ? 0.0 : shadow_rng.normal();
    double pl = blockage_path_loss_db(d, cls, *cfg.blockage, cfg, draw);
    return cfg.tx_antenna_gain * cfg.rx_antenna_gain * db_to_linear(-pl);
  };

  for (std::size_t i = 0; i < nu; ++i)
    for (std::size_t j = 0; j < nb; ++j)
      g.user_bs(i, j) = link_gain(distance(topo.base_stations[j], topo.users[i]),
                                  LinkClass::BsUser);

  for (std::size_t j = 0; j < nb; ++j)
    for (std::size_t m = 0; m < nb; ++m) {
      if (j == m) continue;  // diagonal unused
      g.bs_bs(j, m) = link_gain(distance(topo.base_stations[j], topo.base_stations[m]),
                                LinkClass::BsBs);
    }
  return g;
}

double interference_plus_noise(std::size_t i, std::size_t j, const PowerMatrix& P,
                               const AssociationMatrix& /*X*/, const GainMatrix& G,
                               const ScenarioConfig& cfg) {
  double sum = 0.0;
  for (std::size_t k = 0; k < G.n_bs(); ++k) {
    if (k == j) continue;
    sum += P(i, k) * G.user_bs(i, k);
  }
  return sum + cfg.noise_w();
}

double sinr(std::size_t i, std::size_t j, const PowerMatrix& P, const AssociationMatrix& X,
            const GainMatrix& G, const ScenarioConfig& cfg) {
  double p = P(i, j);
  if (p < 0.0) throw std::domain_error("sinr: negative power");
  return p * G.user_bs(i, j) / interference_plus_noise(i, j, P, X, G, cfg);
}

double achievable_rate(std::size_t i, std::size_t j, std::size_t k_j, const PowerMatrix& P,
                       const AssociationMatrix& X, const GainMatrix& G,
                       const ScenarioConfig& cfg) {
  if (k_j == 0) throw std::domain_error("achievable_rate: K_j must be >= 1");
  double s = sinr(i, j, P, X, G, cfg);
  return cfg.bandwidth_hz / static_cast<double>(k_j) * std::log2(1.0 + s);
}

LinkBudget link_budget(std::size_t i, std::size_t j, std::size_t k_j, const PowerMatrix& P,
                       const AssociationMatrix& X, const GainMatrix& G,
                       const ScenarioConfig& cfg) {
  if (k_j == 0) throw std::domain_error("link_budget: K_j must be >= 1");
  LinkBudget b;
  b.interference_plus_noise_w = interference_plus_noise(i, j, P, X, G, cfg);
  b.sinr = P(i, j) * G.user_bs(i, j) / b.interference_plus_noise_w;
  b.rate_bps = cfg.bandwidth_hz / static_cast<double>(k_j) * std::log2(1.0 + b.sinr);
  return b;
}

void save_gain_matrix(const GainMatrix& g, std::ostream& out) {
  char buf[48];
  auto row = [&](const Mat& m, std::size_t i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%s%.17g", j ? " " : "", m(i, j));
      out << buf;
    }
    out << "\n";
  };
  out << "# user_bs " << g.user_bs.rows() << " x " << g.user_bs.cols() << "\n";
  for (std::size_t i = 0; i < g.user_bs.rows(); ++i) row(g.user_bs, i);
  out << "# bs_bs " << g.bs_bs.rows() << " x " << g.bs_bs.cols() << "\n";
  for (std::size_t i = 0; i < g.bs_bs.rows(); ++i) row(g.bs_bs, i);
}

}  // namespace udn
