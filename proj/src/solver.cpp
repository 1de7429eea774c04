#include "udn/solver.hpp"

#include "udn/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace udn {

namespace {
constexpr double kLn2 = 0.6931471805599453;
}

std::vector<std::size_t> AssociationMatrix::loads() const {
  std::vector<std::size_t> l(n_bs_, 0);
  for (int j : served_)
    if (j >= 0) ++l[static_cast<std::size_t>(j)];
  return l;
}

void SolverConfig::validate() const {
  if (max_iters == 0) throw ConfigError("max_iters must be positive");
  if (step_mu <= 0.0 || step_lambda <= 0.0 || step_nu <= 0.0 || step_tau <= 0.0)
    throw ConfigError("step sizes must be positive");
  if (convergence_tol < 0.0) throw ConfigError("convergence_tol must be non-negative");
  if (inner_newton_steps == 0) throw ConfigError("inner_newton_steps must be positive");
}

double association_score(std::size_t i, std::size_t j, const SolverState& state,
                         const GainMatrix& G, const Topology& topo,
                         const ScenarioConfig& cfg) {
  double up = net_power(state.X, state.P, G, topo, cfg).net_w;
  double s = sinr(i, j, state.P, state.X, G, cfg);
  double l = std::log2(1.0 + s);
  double utility = l > 0.0 ? std::log(cfg.bandwidth_hz * l) / up
                           : -std::numeric_limits<double>::infinity();
  double interference =
      interference_plus_noise(i, j, state.P, state.X, G, cfg) - cfg.noise_w();
  return utility - state.m.mu[j] - state.m.lambda[j] * state.P(i, j) +
         state.m.nu[i] * l - state.m.tau[j] * interference;
}

AssociationMatrix associate_users(const SolverState& state, const GainMatrix& G,
                                  const Topology& topo, const ScenarioConfig& cfg) {
  AssociationMatrix X(state.X.n_users(), state.X.n_bs());
  for (std::size_t i = 0; i < X.n_users(); ++i) {
    std::size_t best = 0;
    double best_score = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < X.n_bs(); ++j) {
      double sc = association_score(i, j, state, G, topo, cfg);
      if (sc > best_score) {  // strict: ties keep the lowest BS id
        best_score = sc;
        best = j;
      }
    }
    X.assign(i, best);
  }
  return X;
}

std::vector<double> update_load_targets(const SolverState& state, const GainMatrix& G,
                                        const Topology& topo, const ScenarioConfig& cfg) {
  double up = net_power(state.X, state.P, G, topo, cfg).net_w;
  double n_u = static_cast<double>(state.X.n_users());
  std::vector<double> k(state.K.size(), 0.0);
  for (std::size_t j = 0; j < k.size(); ++j) {
    double v = std::exp(state.m.mu[j] * up - 1.0);  // overflow -> inf -> clamp
    k[j] = std::clamp(v, 0.0, n_u);
  }
  return k;
}

Multipliers update_multipliers(const SolverState& state, const GainMatrix& G,
                               const Topology& topo, const ScenarioConfig& cfg,
                               const SolverConfig& scfg, std::size_t iter) {
  const std::size_t nb = state.X.n_bs();
  const std::size_t nu = state.X.n_users();
  double decay = scfg.schedule == StepSchedule::InvSqrt
                     ? 1.0 / std::sqrt(static_cast<double>(std::max<std::size_t>(iter, 1)))
                     : 1.0;

  std::vector<std::size_t> load = state.X.loads();
  Multipliers m = state.m;

  std::vector<double> served_power(nb, 0.0);
  std::vector<double> served_interference(nb, 0.0);
  std::vector<double> served_rate(nu, 0.0);  // spectral, bps/Hz
  for (std::size_t i = 0; i < nu; ++i) {
    int jj = state.X.served_bs(i);
    if (jj < 0) continue;
    std::size_t j = static_cast<std::size_t>(jj);
    served_power[j] += state.P(i, j);
    double in = interference_plus_noise(i, j, state.P, state.X, G, cfg);
    served_interference[j] += in - cfg.noise_w();
    served_rate[i] = std::log2(1.0 + state.P(i, j) * G.user_bs(i, j) / in);
  }

  for (std::size_t j = 0; j < nb; ++j) {
    m.mu[j] -= scfg.step_mu * decay * (state.K[j] - static_cast<double>(load[j]));
    double lam = m.lambda[j] - scfg.step_lambda * decay *
                                   (topo.base_stations[j].p_max_w - served_power[j]);
    m.lambda[j] = std::max(0.0, lam);
    double tau = m.tau[j] - scfg.step_tau * decay *
                                (cfg.interference_cap_w - served_interference[j]);
    m.tau[j] = std::max(0.0, tau);
  }
  for (std::size_t i = 0; i < nu; ++i) {
    double nu_i = m.nu[i] - scfg.step_nu * decay * (served_rate[i] - cfg.qos_rate);
    m.nu[i] = std::max(0.0, nu_i);
  }
  return m;
}

double utility_objective(const AssociationMatrix& X, const PowerMatrix& P,
                         const GainMatrix& G, const Topology& topo,
                         const ScenarioConfig& cfg) {
  double up = net_power(X, P, G, topo, cfg).net_w;
  std::vector<std::size_t> load = X.loads();
  double sum = 0.0;
  for (std::size_t i = 0; i < X.n_users(); ++i) {
    int jj = X.served_bs(i);
    if (jj < 0) continue;
    std::size_t j = static_cast<std::size_t>(jj);
    double s = sinr(i, j, P, X, G, cfg);
    double l = std::log2(1.0 + s);
    if (l <= 0.0) throw std::domain_error("utility_objective: zero rate on a served link");
    sum += std::log(cfg.bandwidth_hz * l / static_cast<double>(load[j]));
  }
  return sum / up;
}

// ---------------------------------------------------------------------------
// main loop

namespace {

// Per-iteration snapshot used by the O(U*B) sweeps: the interference seen by
// user i listening to BS j is total_rx[i] - p_ij g_ij + sigma^2.
struct Snapshot {
  std::vector<double> total_rx;
  double noise = 0.0;

  void rebuild(const PowerMatrix& P, const GainMatrix& G, const ScenarioConfig& cfg) {
    noise = cfg.noise_w();
    total_rx.assign(P.n_users(), 0.0);
    for (std::size_t i = 0; i < P.n_users(); ++i) {
      double s = 0.0;
      for (std::size_t k = 0; k < P.n_bs(); ++k) s += P(i, k) * G.user_bs(i, k);
      total_rx[i] = s;
    }
  }

  double interference(std::size_t i, std::size_t j, const PowerMatrix& P,
                      const GainMatrix& G) const {
    return std::max(total_rx[i] - P(i, j) * G.user_bs(i, j), 0.0);
  }
};

}  // namespace

SolverState run_solver(const Topology& topo, const GainMatrix& G,
                       const ScenarioConfig& cfg, const SolverConfig& scfg) {
  cfg.validate();
  scfg.validate();
  const std::size_t nu = topo.n_users();
  const std::size_t nb = topo.n_bs();
  const double W = cfg.bandwidth_hz;
  const double qos_target = std::pow(2.0, cfg.qos_rate) - 1.0;

  // Harvesting must leave every BS a positive net-power coefficient.
  std::vector<double> h = harvest_gain_sums(G);
  for (std::size_t j = 0; j < nb; ++j)
    if (1.0 - cfg.harvest_eff * h[j] <= 0.0)
      throw ModelViolationError("harvesting coefficient not positive for BS " +
                                std::to_string(j));

  SolverState st;
  st.X = AssociationMatrix(nu, nb);
  st.P = PowerMatrix(nu, nb, cfg.initial_power_w);
  st.m.mu.assign(nb, 0.0);
  st.m.lambda.assign(nb, 0.0);
  st.m.nu.assign(nu, 0.0);
  st.m.tau.assign(nb, 0.0);
  st.K.assign(nb, std::exp(-1.0));  // load target at zero price

  Snapshot snap;
  std::size_t consecutive_small = 0;

  for (std::size_t t = 1; t <= scfg.max_iters; ++t) {
    st.iteration = t;
    snap.rebuild(st.P, G, cfg);
    double up = net_power(st.X, st.P, G, topo, cfg).net_w;

    // association sweep over the frozen snapshot
    AssociationMatrix X_new(nu, nb);
    for (std::size_t i = 0; i < nu; ++i) {
      std::size_t best = 0;
      double best_score = -std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < nb; ++j) {
        double p = st.P(i, j);
        double in = snap.interference(i, j, st.P, G) + snap.noise;
        double l = std::log2(1.0 + p * G.user_bs(i, j) / in);
        double utility = l > 0.0 ? std::log(W * l) / up
                                 : -std::numeric_limits<double>::infinity();
        double sc = utility - st.m.mu[j] - st.m.lambda[j] * p + st.m.nu[i] * l -
                    st.m.tau[j] * (in - snap.noise);
        if (sc > best_score) {
          best_score = sc;
          best = j;
        }
      }
      X_new.assign(i, best);
    }
    // abandoned links drop back to the initial hypothesis power, so unserved
    // entries always carry p0 (applied after the sweep: scores above read the
    // frozen snapshot)
    for (std::size_t i = 0; i < nu; ++i) {
      int old = st.X.served_bs(i);
      if (old >= 0 && old != X_new.served_bs(i))
        st.P(i, static_cast<std::size_t>(old)) = cfg.initial_power_w;
    }
    st.X = X_new;

    // load targets and price updates from the current state (both read the
    // pre-update values, then commit together)
    std::vector<double> k_next = update_load_targets(st, G, topo, cfg);
    st.m = update_multipliers(st, G, topo, cfg, scfg, t);
    st.K = k_next;

    // newton power sweep(s) over the served links
    std::vector<std::size_t> load = st.X.loads();
    for (std::size_t pass = 0; pass < scfg.inner_newton_steps; ++pass)
      st.P = newton_power_step(st.P, st.X, load, st.m.lambda, G, topo, cfg, W);

    // feasibility: every served link must sit at or above its QoS target;
    // the floors guarantee it unless a budget projection clipped them
    st.qos_violators.clear();
    snap.rebuild(st.P, G, cfg);
    for (std::size_t i = 0; i < nu; ++i) {
      std::size_t j = static_cast<std::size_t>(st.X.served_bs(i));
      double in = snap.interference(i, j, st.P, G) + snap.noise;
      double s = st.P(i, j) * G.user_bs(i, j) / in;
      if (s < qos_target) st.qos_violators.push_back(i);
    }
    st.infeasible = !st.qos_violators.empty();

    // traces
    IterationTrace row;
    row.iter = t;
    NetPowerBreakdown np = net_power(st.X, st.P, G, topo, cfg);
    row.net_power_w = np.net_w;
    double objective = 0.0;
    double sum_rate = 0.0;
    double qos_res = -std::numeric_limits<double>::infinity();
    std::vector<double> served_power(nb, 0.0), served_interference(nb, 0.0);
    for (std::size_t i = 0; i < nu; ++i) {
      std::size_t j = static_cast<std::size_t>(st.X.served_bs(i));
      double in = snap.interference(i, j, st.P, G) + snap.noise;
      double s = st.P(i, j) * G.user_bs(i, j) / in;
      double l = std::log2(1.0 + s);
      objective += std::log(W * l / static_cast<double>(load[j]));
      sum_rate += W / static_cast<double>(load[j]) * l;
      qos_res = std::max(qos_res, cfg.qos_rate - l);
      served_power[j] += st.P(i, j);
      served_interference[j] += in - snap.noise;
    }
    objective /= np.net_w;
    row.objective = objective;
    row.sum_rate_bps = sum_rate;
    row.max_bs_load = *std::max_element(load.begin(), load.end());
    row.qos_residual = qos_res;
    double pres = -std::numeric_limits<double>::infinity();
    double ires = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < nb; ++j) {
      pres = std::max(pres, served_power[j] - topo.base_stations[j].p_max_w);
      ires = std::max(ires, served_interference[j] - cfg.interference_cap_w);
    }
    row.power_residual = pres;
    row.interference_residual = ires;
    st.iteration_trace.push_back(row);
    st.utility_trace.push_back(objective);
    st.ee_trace.push_back(sum_rate / np.net_w);

    // convergence: three consecutive sufficiently small relative changes
    std::size_t n = st.utility_trace.size();
    if (n >= 2) {
      double prev = st.utility_trace[n - 2];
      double rel = std::abs(st.utility_trace[n - 1] - prev) / std::abs(prev);
      consecutive_small = rel < scfg.convergence_tol ? consecutive_small + 1 : 0;
      if (consecutive_small >= 3 && scfg.convergence_tol > 0.0) {
        st.converged = true;
        break;
      }
    }
  }
  return st;
}

}  // namespace udn
