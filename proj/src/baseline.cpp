#include "udn/baseline.hpp"

#include <limits>

namespace udn {

std::pair<AssociationMatrix, PowerMatrix> max_sinr_associate(const Topology& topo,
                                                             const GainMatrix& G,
                                                             const ScenarioConfig& cfg) {
  const std::size_t nu = topo.n_users();
  const std::size_t nb = topo.n_bs();
  const double noise = cfg.noise_w();

  // association at full per-BS power
  AssociationMatrix X(nu, nb);
  for (std::size_t i = 0; i < nu; ++i) {
    double total = 0.0;
    for (std::size_t k = 0; k < nb; ++k)
      total += topo.base_stations[k].p_max_w * G.user_bs(i, k);
    std::size_t best = 0;
    double best_sinr = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < nb; ++j) {
      double sig = topo.base_stations[j].p_max_w * G.user_bs(i, j);
      double s = sig / (total - sig + noise);
      if (s > best_sinr) {  // ties keep the lowest BS id
        best_sinr = s;
        best = j;
      }
    }
    X.assign(i, best);
  }

  // equal split of each serving BS's budget; idle BSs transmit nothing
  std::vector<std::size_t> load = X.loads();
  PowerMatrix P(nu, nb, 0.0);
  for (std::size_t j = 0; j < nb; ++j) {
    if (load[j] == 0) continue;
    double split = topo.base_stations[j].p_max_w / static_cast<double>(load[j]);
    for (std::size_t i = 0; i < nu; ++i) P(i, j) = split;
  }
  return {X, P};
}

}  // namespace udn
