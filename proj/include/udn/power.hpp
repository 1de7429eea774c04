// Net power accounting with BS-to-BS energy harvesting, the per-link power
// utility and its derivatives, the Newton step with backtracking line search,
// the QoS power floor and the per-BS budget projection.
#pragma once

#include "udn/channel.hpp"
#include "udn/matrix.hpp"
#include "udn/scenario.hpp"

#include <cstddef>
#include <vector>

namespace udn {

class AssociationMatrix;

class PowerMatrix {
 public:
  PowerMatrix() = default;
  PowerMatrix(std::size_t n_users, std::size_t n_bs, double fill)
      : p_(n_users, n_bs, fill) {}

  double& operator()(std::size_t i, std::size_t j) { return p_(i, j); }
  double operator()(std::size_t i, std::size_t j) const { return p_(i, j); }
  std::size_t n_users() const { return p_.rows(); }
  std::size_t n_bs() const { return p_.cols(); }
  const Mat& mat() const { return p_; }
  Mat& mat() { return p_; }

 private:
  Mat p_;
};

struct NetPowerBreakdown {
  double circuit_w = 0.0;
  double transmit_w = 0.0;
  double harvested_w = 0.0;
  double net_w = 0.0;  // circuit + transmit - harvested
};

// sum_{m != j} |g_jm|^2 per BS; 1 - psi * this is the harvesting-adjusted
// power coefficient a_j and must stay positive.
std::vector<double> harvest_gain_sums(const GainMatrix& G);

// Net consumption: circuit + served transmit - psi * harvested, harvesting
// over m != j. Throws ModelViolationError if the result is not positive.
NetPowerBreakdown net_power(const AssociationMatrix& X, const PowerMatrix& P,
                            const GainMatrix& G, const Topology& topo,
                            const ScenarioConfig& cfg);

// Per-link power utility, evaluated over the served links:
//   f = sum log(rate_scale * log2(1+SINR_ij) / K_j) / (p_cj + a_j p_ij)
//       + sum_j lambda_j (p_max_j - sum_i x_ij p_ij)
// rate_scale = 1 reproduces the verbatim per-link objective; the solver runs
// its sweep with rate_scale = W to stay consistent with the association
// utility (see solver.hpp).
double power_objective(const PowerMatrix& P, const AssociationMatrix& X,
                       const std::vector<std::size_t>& K,
                       const std::vector<double>& lambda, const GainMatrix& G,
                       const Topology& topo, const ScenarioConfig& cfg,
                       double rate_scale = 1.0);

struct LinkDerivatives {
  double first = 0.0;
  double second = 0.0;
};

// Closed-form d f / d p_ij and d^2 f / d p_ij^2 for one served link with the
// rest of the network frozen. p_ij must be > 0 (1/p singularity).
LinkDerivatives power_gradient(std::size_t i, std::size_t j, const PowerMatrix& P,
                               const AssociationMatrix& X,
                               const std::vector<std::size_t>& K,
                               const std::vector<double>& lambda,
                               const GainMatrix& G, const Topology& topo,
                               const ScenarioConfig& cfg, double rate_scale = 1.0);

// One Newton pass over the served links: p += step * sign(f') |f'|/|f''| with
// a backtracking (Armijo) line search on the per-link objective; falls back to
// a plain gradient step when |f''| < 1e-12. Then applies the QoS floor and the
// per-BS budget projection. Gradients are evaluated on a frozen snapshot.
PowerMatrix newton_power_step(const PowerMatrix& P, const AssociationMatrix& X,
                              const std::vector<std::size_t>& K,
                              const std::vector<double>& lambda,
                              const GainMatrix& G, const Topology& topo,
                              const ScenarioConfig& cfg, double rate_scale = 1.0);

// Minimum transmit power meeting the rate target:
//   floor = (I_ij / g_ij) (2^Rt - 1).
double qos_power_floor(std::size_t i, std::size_t j, const GainMatrix& G,
                       const PowerMatrix& P, const AssociationMatrix& X,
                       const ScenarioConfig& cfg);

// Scale each over-budget BS's served powers uniformly so the served sum equals
// p_max(j). Idempotent; under-budget BSs are untouched.
PowerMatrix project_bs_budget(const PowerMatrix& P, const AssociationMatrix& X,
                              const Topology& topo);

}  // namespace udn
