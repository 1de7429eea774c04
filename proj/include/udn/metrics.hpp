// Evaluation quantities: per-user and aggregate energy efficiency, load
// distributions, rate CDFs, and the CSV/JSON emitters.
#pragma once

#include "udn/channel.hpp"
#include "udn/power.hpp"
#include "udn/scenario.hpp"
#include "udn/solver.hpp"

#include <cstddef>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace udn {

struct MetricsReport {
  std::vector<double> per_user_ee;    // bits/Joule
  std::vector<double> per_user_rate;  // bps
  std::vector<double> per_user_sinr;
  std::vector<std::size_t> per_bs_load;
  double aggregate_ee = 0.0;  // bits/Joule
  double sum_rate_bps = 0.0;
  NetPowerBreakdown net_power;
  std::size_t iterations_to_converge = 0;
  bool infeasible = false;
  std::vector<std::size_t> qos_violators;
};

// Aggregate EE = sum(rates) / net power. Per-user EE attributes the network
// net power equally: ee_i = rate_i / (net_w / n_users).
std::pair<std::vector<double>, double> energy_efficiency(
    const std::vector<double>& rates_bps, const NetPowerBreakdown& breakdown);

// Right-continuous empirical step CDF over the sorted distinct values; the
// last cumulative probability is exactly 1. Throws std::domain_error on empty
// input.
std::vector<std::pair<double, double>> empirical_cdf(std::vector<double> values);

// Full evaluation of an (X, P) operating point.
MetricsReport evaluate_metrics(const AssociationMatrix& X, const PowerMatrix& P,
                               const Topology& topo, const GainMatrix& G,
                               const ScenarioConfig& cfg,
                               std::size_t iterations_to_converge = 0);

// CSV emitters; fixed column order, no timestamps.
void write_load_csv(const MetricsReport& r, const Topology& topo, std::ostream& out);
void write_cdf_csv(const std::vector<std::pair<double, double>>& cdf,
                   const std::string& value_header, std::ostream& out);
void write_trace_csv(const std::vector<IterationTrace>& trace, std::ostream& out);

}  // namespace udn
