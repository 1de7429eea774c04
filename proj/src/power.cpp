#include "udn/power.hpp"

#include "udn/errors.hpp"
#include "udn/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace udn {

namespace {

constexpr double kLn2 = 0.6931471805599453;
// Raising to the floor by a hair above the exact bound keeps the terminal
// SINR >= target despite rounding in the I/g round trip.
constexpr double kFloorNudge = 1.0 + 1e-12;
constexpr double kCurvatureEps = 1e-12;
constexpr double kArmijoSlope = 1e-4;
constexpr double kBacktrackFactor = 0.5;
constexpr int kMaxBacktracks = 30;

// Per-link utility u(p)/q(p) - lambda*p with frozen interference; theta is
// the SINR per unit power g_ij / I_ij.
struct LinkContext {
  double theta = 0.0;
  double a = 0.0;    // harvesting-adjusted coefficient of BS j
  double pc = 0.0;   // circuit power of BS j
  double k = 1.0;    // realized load of BS j
  double lambda = 0.0;
  double rate_scale = 1.0;
};

double link_value(double p, const LinkContext& c) {
  double s = p * c.theta;
  double l = std::log2(1.0 + s);
  if (l <= 0.0) return -std::numeric_limits<double>::infinity();
  double q = c.pc + c.a * p;
  return std::log(c.rate_scale * l / c.k) / q - c.lambda * p;
}

LinkDerivatives link_derivatives(double p, const LinkContext& c) {
  double s = p * c.theta;
  double l = std::log2(1.0 + s);
  double q = c.pc + c.a * p;
  double u = std::log(c.rate_scale * l / c.k);
  double u1 = c.theta / ((1.0 + s) * kLn2 * l);
  double u2 = -c.theta * c.theta * (1.0 + kLn2 * l) /
              ((1.0 + s) * (1.0 + s) * kLn2 * kLn2 * l * l);
  LinkDerivatives d;
  d.first = u1 / q - c.a * u / (q * q) - c.lambda;
  d.second = u2 / q - 2.0 * c.a * u1 / (q * q) + 2.0 * c.a * c.a * u / (q * q * q);
  return d;
}

}  // namespace

std::vector<double> harvest_gain_sums(const GainMatrix& G) {
  const std::size_t nb = G.n_bs();
  std::vector<double> h(nb, 0.0);
  for (std::size_t j = 0; j < nb; ++j) {
    double s = 0.0;
    for (std::size_t m = 0; m < nb; ++m) {
      if (m == j) continue;
      double g = G.bs_bs(j, m);
      s += g * g;
    }
    h[j] = s;
  }
  return h;
}

NetPowerBreakdown net_power(const AssociationMatrix& X, const PowerMatrix& P,
                            const GainMatrix& G, const Topology& topo,
                            const ScenarioConfig& cfg) {
  NetPowerBreakdown b;
  for (const BaseStation& bs : topo.base_stations) b.circuit_w += bs.circuit_power_w;

  std::vector<double> h = harvest_gain_sums(G);
  for (std::size_t i = 0; i < X.n_users(); ++i) {
    int j = X.served_bs(i);
    if (j < 0) continue;
    double p = P(i, static_cast<std::size_t>(j));
    b.transmit_w += p;
    b.harvested_w += cfg.harvest_eff * p * h[static_cast<std::size_t>(j)];
  }
  b.net_w = b.circuit_w + b.transmit_w - b.harvested_w;
  if (b.net_w <= 0.0)
    throw ModelViolationError("net power is not positive (harvesting exceeds supply)");
  return b;
}

double power_objective(const PowerMatrix& P, const AssociationMatrix& X,
                       const std::vector<std::size_t>& K, const std::vector<double>& lambda,
                       const GainMatrix& G, const Topology& topo, const ScenarioConfig& cfg,
                       double rate_scale) {
  std::vector<double> h = harvest_gain_sums(G);
  double f = 0.0;
  for (std::size_t i = 0; i < X.n_users(); ++i) {
    int jj = X.served_bs(i);
    if (jj < 0) continue;
    std::size_t j = static_cast<std::size_t>(jj);
    if (K[j] == 0) throw std::domain_error("power_objective: served BS with K_j = 0");
    double p = P(i, j);
    double s = p * G.user_bs(i, j) / interference_plus_noise(i, j, P, X, G, cfg);
    double l = std::log2(1.0 + s);
    if (l <= 0.0) throw std::domain_error("power_objective: log of non-positive rate");
    double a = 1.0 - cfg.harvest_eff * h[j];
    double q = topo.base_stations[j].circuit_power_w + a * p;
    f += std::log(rate_scale * l / static_cast<double>(K[j])) / q;
  }
  for (std::size_t j = 0; j < X.n_bs(); ++j) {
    double served = 0.0;
    for (std::size_t i = 0; i < X.n_users(); ++i)
      if (X.x(i, j)) served += P(i, j);
    f += lambda[j] * (topo.base_stations[j].p_max_w - served);
  }
  return f;
}

LinkDerivatives power_gradient(std::size_t i, std::size_t j, const PowerMatrix& P,
                               const AssociationMatrix& X, const std::vector<std::size_t>& K,
                               const std::vector<double>& lambda, const GainMatrix& G,
                               const Topology& topo, const ScenarioConfig& cfg,
                               double rate_scale) {
  if (!X.x(i, j)) throw std::domain_error("power_gradient: link is not served");
  double p = P(i, j);
  if (p <= 0.0) throw std::domain_error("power_gradient: p_ij must be positive");
  std::vector<double> h = harvest_gain_sums(G);
  LinkContext c;
  c.theta = G.user_bs(i, j) / interference_plus_noise(i, j, P, X, G, cfg);
  c.a = 1.0 - cfg.harvest_eff * h[j];
  c.pc = topo.base_stations[j].circuit_power_w;
  c.k = static_cast<double>(std::max<std::size_t>(K[j], 1));
  c.lambda = lambda[j];
  c.rate_scale = rate_scale;
  return link_derivatives(p, c);
}

double qos_power_floor(std::size_t i, std::size_t j, const GainMatrix& G,
                       const PowerMatrix& P, const AssociationMatrix& X,
                       const ScenarioConfig& cfg) {
  double g = G.user_bs(i, j);
  if (g <= 0.0) throw std::domain_error("qos_power_floor: gain must be positive");
  double target = std::pow(2.0, cfg.qos_rate) - 1.0;
  return interference_plus_noise(i, j, P, X, G, cfg) / g * target;
}

PowerMatrix project_bs_budget(const PowerMatrix& P, const AssociationMatrix& X,
                              const Topology& topo) {
  PowerMatrix out = P;
  for (std::size_t j = 0; j < X.n_bs(); ++j) {
    double served = 0.0;
    for (std::size_t i = 0; i < X.n_users(); ++i)
      if (X.x(i, j)) served += out(i, j);
    double pmax = topo.base_stations[j].p_max_w;
    if (served > pmax && served > 0.0) {
      double scale = pmax / served;
      for (std::size_t i = 0; i < X.n_users(); ++i)
        if (X.x(i, j)) out(i, j) *= scale;
    }
  }
  return out;
}

PowerMatrix newton_power_step(const PowerMatrix& P, const AssociationMatrix& X,
                              const std::vector<std::size_t>& K,
                              const std::vector<double>& lambda, const GainMatrix& G,
                              const Topology& topo, const ScenarioConfig& cfg,
                              double rate_scale) {
  PowerMatrix out = P;
  std::vector<double> h = harvest_gain_sums(G);

  for (std::size_t i = 0; i < X.n_users(); ++i) {
    int jj = X.served_bs(i);
    if (jj < 0) continue;
    std::size_t j = static_cast<std::size_t>(jj);
    double p = P(i, j);
    if (p <= 0.0) continue;

    LinkContext c;
    c.theta = G.user_bs(i, j) / interference_plus_noise(i, j, P, X, G, cfg);
    c.a = 1.0 - cfg.harvest_eff * h[j];
    c.pc = topo.base_stations[j].circuit_power_w;
    c.k = static_cast<double>(std::max<std::size_t>(K[j], 1));
    c.lambda = lambda[j];
    c.rate_scale = rate_scale;

    LinkDerivatives d = link_derivatives(p, c);
    double dp;
    if (std::abs(d.second) < kCurvatureEps)
      dp = d.first;  // degenerate curvature: plain gradient direction
    else
      dp = d.first / std::abs(d.second);  // signed along the ascent direction
    if (dp == 0.0) continue;

    double f0 = link_value(p, c);
    double step = 1.0;
    for (int bt = 0; bt < kMaxBacktracks; ++bt) {
      double trial = p + step * dp;
      if (trial > 0.0 &&
          link_value(trial, c) >= f0 + kArmijoSlope * step * d.first * dp) {
        out(i, j) = std::min(trial, topo.base_stations[j].p_max_w);
        break;
      }
      step *= kBacktrackFactor;
    }
  }

  // QoS floor over the served links. The floor of a link depends only on the
  // other columns of its own row, which this pass never touches, so one pass
  // is exact.
  for (std::size_t i = 0; i < X.n_users(); ++i) {
    int jj = X.served_bs(i);
    if (jj < 0) continue;
    std::size_t j = static_cast<std::size_t>(jj);
    double floor = qos_power_floor(i, j, G, out, X, cfg) * kFloorNudge;
    if (out(i, j) < floor) out(i, j) = floor;
  }

  return project_bs_budget(out, X, topo);
}

}  // namespace udn
