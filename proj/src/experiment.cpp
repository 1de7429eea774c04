#include "udn/experiment.hpp"

#include "udn/baseline.hpp"
#include "udn/errors.hpp"
#include "udn/metrics.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <ostream>

namespace udn {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

double load_stddev(const std::vector<std::size_t>& loads) {
  if (loads.empty()) return 0.0;
  double mean = 0.0;
  for (std::size_t l : loads) mean += static_cast<double>(l);
  mean /= static_cast<double>(loads.size());
  double var = 0.0;
  for (std::size_t l : loads) {
    double d = static_cast<double>(l) - mean;
    var += d * d;
  }
  return std::sqrt(var / static_cast<double>(loads.size()));
}

// Trace row for a one-shot operating point (the baseline emits a flat trace).
IterationTrace point_trace(const AssociationMatrix& X, const PowerMatrix& P,
                           const Topology& topo, const GainMatrix& G,
                           const ScenarioConfig& cfg, const MetricsReport& r) {
  IterationTrace row;
  row.iter = 0;
  row.net_power_w = r.net_power.net_w;
  row.sum_rate_bps = r.sum_rate_bps;
  row.max_bs_load = 0;
  for (std::size_t l : r.per_bs_load) row.max_bs_load = std::max(row.max_bs_load, l);
  row.objective = utility_objective(X, P, G, topo, cfg);
  double qres = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < X.n_users(); ++i)
    qres = std::max(qres, cfg.qos_rate - std::log2(1.0 + r.per_user_sinr[i]));
  row.qos_residual = qres;
  std::vector<double> served_power(topo.n_bs(), 0.0), served_if(topo.n_bs(), 0.0);
  for (std::size_t i = 0; i < X.n_users(); ++i) {
    int jj = X.served_bs(i);
    if (jj < 0) continue;
    std::size_t j = static_cast<std::size_t>(jj);
    served_power[j] += P(i, j);
    served_if[j] += interference_plus_noise(i, j, P, X, G, cfg) - cfg.noise_w();
  }
  double pres = -std::numeric_limits<double>::infinity();
  double ires = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < topo.n_bs(); ++j) {
    pres = std::max(pres, served_power[j] - topo.base_stations[j].p_max_w);
    ires = std::max(ires, served_if[j] - cfg.interference_cap_w);
  }
  row.power_residual = pres;
  row.interference_residual = ires;
  return row;
}

void write_file(const fs::path& path, const std::function<void(std::ostream&)>& emit) {
  std::ofstream out(path);
  if (!out) throw std::ios_base::failure("cannot open for writing: " + path.string());
  emit(out);
  out.flush();
  if (!out.good()) throw std::ios_base::failure("write failed: " + path.string());
}

void write_metrics_files(const fs::path& dir, const MetricsReport& r,
                         const std::vector<IterationTrace>& trace, const Topology& topo) {
  write_file(dir / "trace.csv", [&](std::ostream& o) { write_trace_csv(trace, o); });
  write_file(dir / "load.csv", [&](std::ostream& o) { write_load_csv(r, topo, o); });
  write_file(dir / "ee_cdf.csv", [&](std::ostream& o) {
    write_cdf_csv(empirical_cdf(r.per_user_ee), "ee_bits_per_joule", o);
  });
  write_file(dir / "rate_cdf.csv", [&](std::ostream& o) {
    write_cdf_csv(empirical_cdf(r.per_user_rate), "rate_bps", o);
  });
}

ordered_json config_json(const ScenarioConfig& c) {
  ordered_json j;
  j["macro_radius_m"] = c.macro_radius_m;
  j["n_small_cells"] = c.n_small_cells;
  j["n_users"] = c.n_users;
  j["p_max_macro_dbm"] = c.p_max_macro_dbm;
  j["p_max_small_dbm"] = c.p_max_small_dbm;
  j["circuit_power_w"] = c.circuit_power_w;
  j["noise_dbm"] = c.noise_dbm;
  j["bandwidth_hz"] = c.bandwidth_hz;
  j["wavelength_m"] = c.wavelength_m;
  j["ref_distance_m"] = c.ref_distance_m;
  j["pathloss_exponent"] = c.pathloss_exponent;
  j["harvest_eff"] = c.harvest_eff;
  j["qos_rate"] = c.qos_rate;
  j["interference_cap_w"] = c.interference_cap_w;
  j["initial_power_w"] = c.initial_power_w;
  j["tx_antenna_gain"] = c.tx_antenna_gain;
  j["rx_antenna_gain"] = c.rx_antenna_gain;
  j["rng_seed"] = c.rng_seed;
  j["blockage"] = c.blockage.has_value();
  if (c.blockage) {
    const BlockageConfig& b = *c.blockage;
    j["los_threshold_m"] = b.los_threshold_m;
    j["exp_los_bs_user"] = b.exp_los_bs_user;
    j["exp_nlos_bs_user"] = b.exp_nlos_bs_user;
    j["exp_los_bs_bs"] = b.exp_los_bs_bs;
    j["exp_nlos_bs_bs"] = b.exp_nlos_bs_bs;
    j["shadow_los_bs_user"] = b.shadow_los_bs_user;
    j["shadow_nlos_bs_user"] = b.shadow_nlos_bs_user;
    j["shadow_los_bs_bs"] = b.shadow_los_bs_bs;
    j["shadow_nlos_bs_bs"] = b.shadow_nlos_bs_bs;
    j["deterministic_shadowing"] = b.deterministic_shadowing;
  }
  return j;
}

ordered_json report_json(const MetricsReport& r, bool converged) {
  ordered_json j;
  j["aggregate_ee_bits_per_joule"] = r.aggregate_ee;
  j["sum_rate_bps"] = r.sum_rate_bps;
  j["net_power_w"] = r.net_power.net_w;
  j["circuit_w"] = r.net_power.circuit_w;
  j["transmit_w"] = r.net_power.transmit_w;
  j["harvested_w"] = r.net_power.harvested_w;
  j["iterations"] = r.iterations_to_converge;
  j["converged"] = converged;
  j["infeasible"] = r.infeasible;
  j["qos_violators"] = r.qos_violators;
  j["macro_load"] = r.per_bs_load.empty() ? 0 : r.per_bs_load[0];
  j["load_stddev"] = load_stddev(r.per_bs_load);
  return j;
}

}  // namespace

SolverConfig scaled_solver_config(const ScenarioConfig& cfg) {
  SolverConfig s;
  if (cfg.n_users > 0)
    s.step_mu = 0.2 / (cfg.circuit_power_w * static_cast<double>(cfg.n_users));
  return s;
}

ResolvedConfig resolve_config(const ExperimentArgs& args) {
  if (args.scale != "desk" && args.scale != "paper")
    throw ConfigError("unknown scale '" + args.scale + "' (desk|paper)");
  ResolvedConfig rc;
  rc.scenario = args.scale == "paper" ? paper_profile() : desk_profile();
  if (args.config_path)
    rc.scenario = load_scenario_config_file(*args.config_path, rc.scenario);
  if (args.seed) rc.scenario.rng_seed = *args.seed;
  if (args.blockage) {
    if (*args.blockage && !rc.scenario.blockage) rc.scenario.blockage = BlockageConfig{};
    if (!*args.blockage) rc.scenario.blockage.reset();
  }
  rc.solver = scaled_solver_config(rc.scenario);
  if (args.iters) rc.solver.max_iters = *args.iters;
  rc.scenario.validate();
  rc.solver.validate();
  return rc;
}

int run_experiment(const ExperimentArgs& args, std::ostream& out, std::ostream& err) {
  ResolvedConfig rc;
  try {
    rc = resolve_config(args);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfigError;
  }

  try {
    fs::create_directories(args.out_dir);
  } catch (const std::exception& e) {
    err << "io error: " << e.what() << "\n";
    return kExitIoError;
  }

  try {
    Topology topo = generate_topology(rc.scenario);
    GainMatrix G = build_gain_matrix(topo, rc.scenario);

    ordered_json summary;
    summary["scale"] = args.scale;
    summary["seed"] = rc.scenario.rng_seed;
    summary["config"] = config_json(rc.scenario);
    {
      ordered_json sj;
      sj["max_iters"] = rc.solver.max_iters;
      sj["step_mu"] = rc.solver.step_mu;
      sj["step_lambda"] = rc.solver.step_lambda;
      sj["step_nu"] = rc.solver.step_nu;
      sj["step_tau"] = rc.solver.step_tau;
      sj["schedule"] = rc.solver.schedule == StepSchedule::InvSqrt ? "inv_sqrt" : "constant";
      sj["convergence_tol"] = rc.solver.convergence_tol;
      summary["solver"] = sj;
    }

    bool run_gradient = args.algo != Algo::MaxSinr;
    bool run_baseline = args.algo != Algo::Gradient;
    bool both = args.algo == Algo::Both;
    bool gradient_infeasible = false;
    double ee_gradient = 0.0, ee_baseline = 0.0;
    double macro_gradient = 0.0, macro_baseline = 0.0;

    if (run_gradient) {
      SolverState st = run_solver(topo, G, rc.scenario, rc.solver);
      MetricsReport r = evaluate_metrics(st.X, st.P, topo, G, rc.scenario, st.iteration);
      r.infeasible = st.infeasible;
      r.qos_violators = st.qos_violators;
      gradient_infeasible = st.infeasible;
      ee_gradient = r.aggregate_ee;
      macro_gradient = static_cast<double>(r.per_bs_load.empty() ? 0 : r.per_bs_load[0]);
      fs::path dir = both ? fs::path(args.out_dir) / "gradient" : fs::path(args.out_dir);
      fs::create_directories(dir);
      write_metrics_files(dir, r, st.iteration_trace, topo);
      summary["gradient"] = report_json(r, st.converged);
      out << "gradient: " << st.iteration << " iterations, aggregate EE " << r.aggregate_ee
          << " bits/J, macro load " << macro_gradient << "\n";
      if (st.infeasible)
        err << "gradient: QoS infeasible for " << st.qos_violators.size() << " user(s)\n";
    }

    if (run_baseline) {
      auto [X, P] = max_sinr_associate(topo, G, rc.scenario);
      MetricsReport r = evaluate_metrics(X, P, topo, G, rc.scenario, 1);
      ee_baseline = r.aggregate_ee;
      macro_baseline = static_cast<double>(r.per_bs_load.empty() ? 0 : r.per_bs_load[0]);
      fs::path dir = both ? fs::path(args.out_dir) / "max_sinr" : fs::path(args.out_dir);
      fs::create_directories(dir);
      std::vector<IterationTrace> trace = {point_trace(X, P, topo, G, rc.scenario, r)};
      write_metrics_files(dir, r, trace, topo);
      summary["max_sinr"] = report_json(r, true);
      out << "max-sinr: aggregate EE " << r.aggregate_ee << " bits/J, macro load "
          << macro_baseline << "\n";
    }

    if (both) {
      ordered_json cmp;
      cmp["ee_ratio"] = ee_baseline > 0.0 ? ee_gradient / ee_baseline : 0.0;
      cmp["macro_load_ratio"] =
          macro_baseline > 0.0 ? macro_gradient / macro_baseline : 0.0;
      summary["comparison"] = cmp;
      out << "comparison: EE ratio " << cmp["ee_ratio"].get<double>() << ", macro load ratio "
          << cmp["macro_load_ratio"].get<double>() << "\n";
    }

    summary["timestamp"] =
        std::chrono::duration_cast<std::chrono::milliseconds>(
            std::chrono::system_clock::now().time_since_epoch())
            .count();
    write_file(fs::path(args.out_dir) / "summary.json",
               [&](std::ostream& o) { o << summary.dump(2) << "\n"; });

    if (gradient_infeasible) return kExitInfeasible;
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const ModelViolationError& e) {
    err << "model violation: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::ios_base::failure& e) {
    err << "io error: " << e.what() << "\n";
    return kExitIoError;
  } catch (const fs::filesystem_error& e) {
    err << "io error: " << e.what() << "\n";
    return kExitIoError;
  }
}

}  // namespace udn
