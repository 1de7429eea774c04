#include "udn/metrics.hpp"

#include "udn/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace udn {

std::pair<std::vector<double>, double> energy_efficiency(
    const std::vector<double>& rates_bps, const NetPowerBreakdown& breakdown) {
  if (breakdown.net_w <= 0.0)
    throw ModelViolationError("energy_efficiency: net power must be positive");
  double sum = 0.0;
  for (double r : rates_bps) sum += r;
  double aggregate = sum / breakdown.net_w;
  std::vector<double> per_user(rates_bps.size());
  if (!rates_bps.empty()) {
    double share = breakdown.net_w / static_cast<double>(rates_bps.size());
    for (std::size_t i = 0; i < rates_bps.size(); ++i)
      per_user[i] = rates_bps[i] / share;
  }
  return {per_user, aggregate};
}

std::vector<std::pair<double, double>> empirical_cdf(std::vector<double> values) {
  if (values.empty()) throw std::domain_error("empirical_cdf: empty input");
  std::sort(values.begin(), values.end());
  std::vector<std::pair<double, double>> cdf;
  std::size_t n = values.size();
  for (std::size_t i = 0; i < n; ++i) {
    // keep only the last occurrence of a value: right-continuous steps
    if (i + 1 < n && values[i + 1] == values[i]) continue;
    cdf.emplace_back(values[i], static_cast<double>(i + 1) / static_cast<double>(n));
  }
  return cdf;
}

MetricsReport evaluate_metrics(const AssociationMatrix& X, const PowerMatrix& P,
                               const Topology& topo, const GainMatrix& G,
                               const ScenarioConfig& cfg,
                               std::size_t iterations_to_converge) {
  MetricsReport r;
  r.per_bs_load = X.loads();
  r.iterations_to_converge = iterations_to_converge;
  double target = std::pow(2.0, cfg.qos_rate) - 1.0;

  for (std::size_t i = 0; i < X.n_users(); ++i) {
    int jj = X.served_bs(i);
    if (jj < 0) {
      r.per_user_rate.push_back(0.0);
      r.per_user_sinr.push_back(0.0);
      continue;
    }
    std::size_t j = static_cast<std::size_t>(jj);
    LinkBudget lb = link_budget(i, j, r.per_bs_load[j], P, X, G, cfg);
    r.per_user_sinr.push_back(lb.sinr);
    r.per_user_rate.push_back(lb.rate_bps);
    if (lb.sinr < target) r.qos_violators.push_back(i);
  }
  r.infeasible = !r.qos_violators.empty();
  r.net_power = net_power(X, P, G, topo, cfg);
  auto [per_user, aggregate] = energy_efficiency(r.per_user_rate, r.net_power);
  r.per_user_ee = std::move(per_user);
  r.aggregate_ee = aggregate;
  for (double rate : r.per_user_rate) r.sum_rate_bps += rate;
  return r;
}

namespace {

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace

void write_load_csv(const MetricsReport& r, const Topology& topo, std::ostream& out) {
  out << "bs_id,tier,users\n";
  for (std::size_t j = 0; j < r.per_bs_load.size(); ++j)
    out << topo.base_stations[j].id << ','
        << (topo.base_stations[j].tier == Tier::Macro ? "macro" : "small") << ','
        << r.per_bs_load[j] << "\n";
}

void write_cdf_csv(const std::vector<std::pair<double, double>>& cdf,
                   const std::string& value_header, std::ostream& out) {
  out << value_header << ",cum_prob\n";
  for (const auto& [v, p] : cdf) out << fmt(v) << ',' << fmt(p) << "\n";
}

void write_trace_csv(const std::vector<IterationTrace>& trace, std::ostream& out) {
  out << "iter,objective,net_power_w,sum_rate_bps,max_bs_load,power_residual,"
         "qos_residual,interference_residual\n";
  for (const IterationTrace& t : trace)
    out << t.iter << ',' << fmt(t.objective) << ',' << fmt(t.net_power_w) << ','
        << fmt(t.sum_rate_bps) << ',' << t.max_bs_load << ',' << fmt(t.power_residual)
        << ',' << fmt(t.qos_residual) << ',' << fmt(t.interference_residual) << "\n";
}

}  // namespace udn
