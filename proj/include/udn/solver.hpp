// Dual-decomposition association / power loop.
//
// Each iteration runs (a) an association sweep that gives every user the
// argmax of the price-adjusted utility score, plus subgradient updates of the
// dual prices, and (b) a Newton power sweep with QoS floor and per-BS budget
// projection. State mutates only at sweep boundaries; per-user scores and
// per-link Newton steps are computed from a frozen snapshot, so one iteration
// costs O(B*U) score/link evaluations plus O(B + U) multiplier updates.
#pragma once

#include "udn/channel.hpp"
#include "udn/power.hpp"
#include "udn/scenario.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace udn {

// Binary user->BS assignment, one serving BS per user (row sums are 1 by
// construction).
class AssociationMatrix {
 public:
  AssociationMatrix() = default;
  AssociationMatrix(std::size_t n_users, std::size_t n_bs)
      : n_bs_(n_bs), served_(n_users, kNone) {}

  static constexpr int kNone = -1;  // pre-first-sweep only

  void assign(std::size_t user, std::size_t bs) { served_[user] = static_cast<int>(bs); }
  int served_bs(std::size_t user) const { return served_[user]; }
  bool x(std::size_t user, std::size_t bs) const {
    return served_[user] == static_cast<int>(bs);
  }
  std::size_t n_users() const { return served_.size(); }
  std::size_t n_bs() const { return n_bs_; }

  std::vector<std::size_t> loads() const;  // users per BS

  bool operator==(const AssociationMatrix& o) const {
    return n_bs_ == o.n_bs_ && served_ == o.served_;
  }

 private:
  std::size_t n_bs_ = 0;
  std::vector<int> served_;
};

struct Multipliers {
  std::vector<double> mu;      // per BS, load price (any sign)
  std::vector<double> lambda;  // per BS, power price, >= 0
  std::vector<double> nu;      // per user, QoS price, >= 0
  std::vector<double> tau;     // per BS, interference price, >= 0
};

enum class StepSchedule { Constant, InvSqrt };

struct SolverConfig {
  std::size_t max_iters = 200;
  double step_mu = 5.0;
  double step_lambda = 10.0;
  double step_nu = 1e-3;
  double step_tau = 1e3;
  StepSchedule schedule = StepSchedule::InvSqrt;
  double convergence_tol = 1e-3;  // relative objective change, 3 consecutive
  std::size_t inner_newton_steps = 1;

  void validate() const;
};

struct IterationTrace {
  std::size_t iter = 0;
  double objective = 0.0;      // rate-utility per Watt
  double net_power_w = 0.0;
  double sum_rate_bps = 0.0;
  std::size_t max_bs_load = 0;
  double power_residual = 0.0;         // max_j served power - p_max  (<=0 ok)
  double qos_residual = 0.0;           // max_i R_t - served spectral rate
  double interference_residual = 0.0;  // max_j suffered interference - I_j
};

struct SolverState {
  AssociationMatrix X;
  PowerMatrix P;
  Multipliers m;
  std::vector<double> K;  // per-BS load target, clamped to [0, N_U]
  std::size_t iteration = 0;
  std::vector<double> utility_trace;
  std::vector<double> ee_trace;  // bits/Joule
  std::vector<IterationTrace> iteration_trace;
  bool converged = false;
  bool infeasible = false;
  std::vector<std::size_t> qos_violators;  // users below target at termination
};

// Price-adjusted attractiveness of BS j for user i:
//   log[W log2(1+SINR_ij)] / U_P - mu_j - lambda_j p_ij + nu_i c_ij
//     - tau_j * (interference user i would suffer at BS j)
// c_ij enters in spectral form (log2(1+SINR), bps/Hz) so that it is
// commensurate with the R_t target used in the nu update.
double association_score(std::size_t i, std::size_t j, const SolverState& state,
                         const GainMatrix& G, const Topology& topo,
                         const ScenarioConfig& cfg);

// Argmax of association_score per user; exact ties go to the lowest BS id.
AssociationMatrix associate_users(const SolverState& state, const GainMatrix& G,
                                  const Topology& topo, const ScenarioConfig& cfg);

// K_j = exp(mu_j * U_P - 1), clamped to [0, N_U].
std::vector<double> update_load_targets(const SolverState& state,
                                        const GainMatrix& G, const Topology& topo,
                                        const ScenarioConfig& cfg);

// Subgradient steps on mu/lambda/nu/tau; lambda, nu, tau projected to >= 0.
Multipliers update_multipliers(const SolverState& state, const GainMatrix& G,
                               const Topology& topo, const ScenarioConfig& cfg,
                               const SolverConfig& scfg, std::size_t iter);

// Full loop: init p = p0 and zero multipliers, alternate association and
// power sweeps, stop after 3 consecutive relative objective changes below
// convergence_tol or at max_iters. QoS infeasibility (floors not coverable
// within budgets) is reported in the returned state, never thrown.
SolverState run_solver(const Topology& topo, const GainMatrix& G,
                       const ScenarioConfig& cfg, const SolverConfig& scfg);

// Objective value at a given state: sum over served links of
// log(W log2(1+SINR_ij) / K_j) / U_P with the realized integer loads.
double utility_objective(const AssociationMatrix& X, const PowerMatrix& P,
                         const GainMatrix& G, const Topology& topo,
                         const ScenarioConfig& cfg);

}  // namespace udn
