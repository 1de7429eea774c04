// MAX-SINR association baseline: every user takes the BS with the highest
// SINR evaluated at full per-BS power, then each BS splits its budget equally
// among the users it serves. One-shot, no iteration.
#pragma once

#include "udn/channel.hpp"
#include "udn/power.hpp"
#include "udn/scenario.hpp"
#include "udn/solver.hpp"

#include <utility>

namespace udn {

// Returns the association and the resulting power matrix. Every entry of a
// serving BS's column carries its split level p_max/K (the level it offers on
// any band slice); columns of empty BSs are zero (they do not transmit).
// Ties go to the lowest BS id.
std::pair<AssociationMatrix, PowerMatrix> max_sinr_associate(
    const Topology& topo, const GainMatrix& G, const ScenarioConfig& cfg);

}  // namespace udn
