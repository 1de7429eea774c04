// Link power gains (Friis and blockage-corrected LOS/NLOS), SINR and rates.
//
// Interference convention: the interference seen by user i when listening to
// BS j is  sum_{k != j} p_ik * g_ik + sigma^2,  one term per other base
// station, using the power level BS k maintains on its (i,k) link entry.
// Powers of links the victim is not part of never enter the sum.
#pragma once

#include "udn/matrix.hpp"
#include "udn/scenario.hpp"

#include <cstddef>
#include <iosfwd>
#include <vector>

namespace udn {

class AssociationMatrix;  // solver.hpp
class PowerMatrix;        // power.hpp

enum class LinkClass { BsUser, BsBs };

struct GainMatrix {
  Mat user_bs;  // rows = users, cols = base stations
  Mat bs_bs;    // bs_bs(j, m) = gain BS j -> BS m; diagonal unused (0)

  std::size_t n_users() const { return user_bs.rows(); }
  std::size_t n_bs() const { return user_bs.cols(); }
};

struct LinkBudget {
  double sinr = 0.0;
  double rate_bps = 0.0;
  double interference_plus_noise_w = 0.0;
};

// Friis power gain g = (gTx * gRx * wavelength^2) / (16 pi^2 (d/d0)^eta).
double friis_gain(double d_m, const ScenarioConfig& cfg);

// Blockage-corrected path loss in dB:
//   PL(d) = 20 log10(4 pi d0 / wavelength) + 10 eta log10(d/d0) + shadowing
// with eta picked by link class and the LOS test (d <= los_threshold_m).
// shadow_draw is a standard-normal value scaled by the class std dev; pass
// nothing (or set deterministic_shadowing) for a 0 dB shadowing term.
double blockage_path_loss_db(double d_m, LinkClass link_class,
                             const BlockageConfig& blk, const ScenarioConfig& cfg,
                             double shadow_draw = 0.0);

// Pairwise gains for the whole topology. Friis when cfg.blockage is unset,
// otherwise 10^(-PL/10) with per-class exponents/shadowing (seeded from
// cfg.rng_seed, independent of the topology stream). Coincident positions are
// clamped to ref_distance_m.
GainMatrix build_gain_matrix(const Topology& topo, const ScenarioConfig& cfg);

// sum_{k != j} p_ik g_ik + sigma^2; always >= sigma^2.
double interference_plus_noise(std::size_t i, std::size_t j, const PowerMatrix& P,
                               const AssociationMatrix& X, const GainMatrix& G,
                               const ScenarioConfig& cfg);

// p_ij g_ij / interference_plus_noise(i, j).
double sinr(std::size_t i, std::size_t j, const PowerMatrix& P,
            const AssociationMatrix& X, const GainMatrix& G,
            const ScenarioConfig& cfg);

// Shannon rate with the band split: (W / K_j) log2(1 + SINR). K_j >= 1.
double achievable_rate(std::size_t i, std::size_t j, std::size_t k_j,
                       const PowerMatrix& P, const AssociationMatrix& X,
                       const GainMatrix& G, const ScenarioConfig& cfg);

// SINR, rate and denominator of one link in a single evaluation.
LinkBudget link_budget(std::size_t i, std::size_t j, std::size_t k_j,
                       const PowerMatrix& P, const AssociationMatrix& X,
                       const GainMatrix& G, const ScenarioConfig& cfg);

void save_gain_matrix(const GainMatrix& g, std::ostream& out);

}  // namespace udn
