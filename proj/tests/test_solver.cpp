#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "udn/baseline.hpp"
#include "udn/errors.hpp"
#include "udn/metrics.hpp"
#include "udn/rng.hpp"
#include "udn/solver.hpp"

#include <cmath>
#include <vector>

using namespace udn;

namespace {

Topology make_topo(std::vector<double> p_max, std::vector<double> p_c) {
  Topology t;
  for (std::size_t j = 0; j < p_max.size(); ++j) {
    BaseStation b;
    b.id = static_cast<int>(j);
    b.tier = j == 0 ? Tier::Macro : Tier::Small;
    b.p_max_w = p_max[j];
    b.circuit_power_w = p_c[j];
    t.base_stations.push_back(b);
  }
  return t;
}

// one user, three stations, fully pinned-down state for hand oracles
struct ThreeBs {
  ScenarioConfig cfg;
  Topology topo;
  GainMatrix G;
  SolverState st;

  ThreeBs() : cfg(desk_profile()), topo(make_topo({0.01, 0.003, 0.003}, {3e-4, 3e-4, 3e-4})) {
    cfg.harvest_eff = 0.0;
    G.user_bs = Mat(1, 3, 0.0);
    G.bs_bs = Mat(3, 3, 0.0);
    G.user_bs(0, 0) = 2e-9;
    G.user_bs(0, 1) = 8e-10;
    G.user_bs(0, 2) = 1e-10;
    st.X = AssociationMatrix(1, 3);
    st.X.assign(0, 0);
    st.P = PowerMatrix(1, 3, 0.0);
    st.P(0, 0) = 3e-5;
    st.P(0, 1) = 1e-5;
    st.P(0, 2) = 2e-5;
    st.m.mu = {0.02, 0.01, 0.0};
    st.m.lambda = {1.0, 2.0, 0.5};
    st.m.nu = {0.003};
    st.m.tau = {5.0, 1.0, 0.0};
    st.K = {1.0, 0.4, 0.4};
  }
};

}  // namespace

TEST_CASE("association score: term-by-term hand oracle") {
  ThreeBs t;
  double up = net_power(t.st.X, t.st.P, t.G, t.topo, t.cfg).net_w;
  CHECK(up == doctest::Approx(3 * 3e-4 + 3e-5).epsilon(1e-12));

  for (std::size_t j = 0; j < 3; ++j) {
    double inj = 0.0;
    for (std::size_t k = 0; k < 3; ++k)
      if (k != j) inj += t.st.P(0, k) * t.G.user_bs(0, k);
    double s = t.st.P(0, j) * t.G.user_bs(0, j) / (inj + t.cfg.noise_w());
    double l = std::log2(1.0 + s);
    double expected = std::log(t.cfg.bandwidth_hz * l) / up - t.st.m.mu[j] -
                      t.st.m.lambda[j] * t.st.P(0, j) + t.st.m.nu[0] * l -
                      t.st.m.tau[j] * inj;
    double got = association_score(0, j, t.st, t.G, t.topo, t.cfg);
    CHECK(got == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("association score: additive load price") {
  ThreeBs t;
  double base = association_score(0, 1, t.st, t.G, t.topo, t.cfg);
  t.st.m.mu[1] += 0.25;
  CHECK(association_score(0, 1, t.st, t.G, t.topo, t.cfg) ==
        doctest::Approx(base - 0.25).epsilon(1e-12));

  // with all prices zero and one BS the score reduces to the utility term
  SolverState st;
  st.X = AssociationMatrix(1, 1);
  st.X.assign(0, 0);
  st.P = PowerMatrix(1, 1, 1e-5);
  st.m.mu = {0.0};
  st.m.lambda = {0.0};
  st.m.nu = {0.0};
  st.m.tau = {0.0};
  st.K = {1.0};
  GainMatrix G;
  G.user_bs = Mat(1, 1, 1e-9);
  G.bs_bs = Mat(1, 1, 0.0);
  Topology topo = make_topo({0.01}, {3e-4});
  double up = net_power(st.X, st.P, G, topo, t.cfg).net_w;
  double s = 1e-5 * 1e-9 / t.cfg.noise_w();
  CHECK(association_score(0, 0, st, G, topo, t.cfg) ==
        doctest::Approx(std::log(t.cfg.bandwidth_hz * std::log2(1.0 + s)) / up)
            .epsilon(1e-12));
}

TEST_CASE("associate_users picks the argmax and breaks ties low") {
  ThreeBs t;
  AssociationMatrix X = associate_users(t.st, t.G, t.topo, t.cfg);
  // recompute the argmax through the public score
  std::size_t best = 0;
  double best_score = -1e300;
  for (std::size_t j = 0; j < 3; ++j) {
    double sc = association_score(0, j, t.st, t.G, t.topo, t.cfg);
    if (sc > best_score) { best_score = sc; best = j; }
  }
  CHECK(X.served_bs(0) == static_cast<int>(best));

  // exact tie: identical gains, powers and prices on stations 1 and 2
  ThreeBs tie;
  tie.G.user_bs(0, 2) = tie.G.user_bs(0, 1);
  tie.st.P(0, 2) = tie.st.P(0, 1);
  tie.st.m.mu = {1e6, 0.0, 0.0};  // macro priced far out (scores scale as 1/U_P)
  tie.st.m.lambda = {0.0, 0.0, 0.0};
  tie.st.m.nu = {0.0};
  tie.st.m.tau = {0.0, 0.0, 0.0};
  double s1 = association_score(0, 1, tie.st, tie.G, tie.topo, tie.cfg);
  double s2 = association_score(0, 2, tie.st, tie.G, tie.topo, tie.cfg);
  REQUIRE(s1 == s2);
  AssociationMatrix Xt = associate_users(tie.st, tie.G, tie.topo, tie.cfg);
  CHECK(Xt.served_bs(0) == 1);

  // every user ends up somewhere: loads sum to the user count
  ScenarioConfig cfg = desk_profile();
  cfg.n_small_cells = 8;
  cfg.n_users = 40;
  Topology topo = generate_topology(cfg);
  GainMatrix G = build_gain_matrix(topo, cfg);
  SolverState st;
  st.X = AssociationMatrix(40, 9);
  st.P = PowerMatrix(40, 9, cfg.initial_power_w);
  st.m.mu.assign(9, 0.0);
  st.m.lambda.assign(9, 0.0);
  st.m.nu.assign(40, 0.0);
  st.m.tau.assign(9, 0.0);
  st.K.assign(9, 1.0);
  AssociationMatrix Xa = associate_users(st, G, topo, cfg);
  std::size_t total = 0;
  for (std::size_t l : Xa.loads()) total += l;
  CHECK(total == 40);
}

TEST_CASE("raising a BS price never raises its user count") {
  ScenarioConfig cfg = desk_profile();
  cfg.n_small_cells = 8;
  cfg.n_users = 60;
  cfg.rng_seed = 5;
  Topology topo = generate_topology(cfg);
  GainMatrix G = build_gain_matrix(topo, cfg);
  SolverState st;
  st.X = AssociationMatrix(60, 9);
  st.P = PowerMatrix(60, 9, cfg.initial_power_w);
  st.m.mu.assign(9, 0.0);
  st.m.lambda.assign(9, 0.0);
  st.m.nu.assign(60, 0.0);
  st.m.tau.assign(9, 0.0);
  st.K.assign(9, 1.0);

  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    for (std::size_t j = 0; j < 9; ++j) st.m.mu[j] = 0.05 * rng.uniform();
    std::size_t target = static_cast<std::size_t>(rng.uniform() * 9);
    std::size_t before = associate_users(st, G, topo, cfg).loads()[target];
    st.m.mu[target] += 0.5 + rng.uniform();
    std::size_t after = associate_users(st, G, topo, cfg).loads()[target];
    CHECK(after <= before);
  }
}

TEST_CASE("load target update") {
  ThreeBs t;
  t.st.m.mu = {0.0, 0.0, 0.0};
  std::vector<double> K = update_load_targets(t.st, t.G, t.topo, t.cfg);
  CHECK(K[0] == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));

  double up = net_power(t.st.X, t.st.P, t.G, t.topo, t.cfg).net_w;
  t.st.m.mu = {1.0 / up, 0.0, 0.0};
  K = update_load_targets(t.st, t.G, t.topo, t.cfg);
  CHECK(K[0] == doctest::Approx(1.0).epsilon(1e-12));

  // exponent overflow clamps at the user count
  t.st.m.mu = {1e6, 0.0, 0.0};
  K = update_load_targets(t.st, t.G, t.topo, t.cfg);
  CHECK(K[0] == 1.0);  // N_U = 1 here

  ScenarioConfig cfg2 = t.cfg;
  SolverState big;
  big.X = AssociationMatrix(120, 1);
  big.P = PowerMatrix(120, 1, 1e-5);
  big.m.mu = {1e6};
  big.K = {0.0};
  Topology topo1 = make_topo({0.01}, {3e-4});
  GainMatrix G1;
  G1.user_bs = Mat(120, 1, 1e-9);
  G1.bs_bs = Mat(1, 1, 0.0);
  for (std::size_t i = 0; i < 120; ++i) big.X.assign(i, 0);
  CHECK(update_load_targets(big, G1, topo1, cfg2)[0] == 120.0);
}

TEST_CASE("multiplier updates follow the subgradients and stay projected") {
  ScenarioConfig cfg = desk_profile();
  cfg.harvest_eff = 0.0;
  Topology topo = make_topo({0.01, 0.003}, {3e-4, 3e-4});
  GainMatrix G;
  G.user_bs = Mat(5, 2, 0.0);
  G.bs_bs = Mat(2, 2, 0.0);
  for (std::size_t i = 0; i < 5; ++i) {
    G.user_bs(i, 0) = 1e-9;
    G.user_bs(i, 1) = 1e-10;
  }
  SolverState st;
  st.X = AssociationMatrix(5, 2);
  for (std::size_t i = 0; i < 3; ++i) st.X.assign(i, 0);
  st.X.assign(3, 1);
  st.X.assign(4, 1);
  st.P = PowerMatrix(5, 2, 1e-5);
  st.m.mu = {1.0, 0.0};
  st.m.lambda = {0.0, 0.0};
  st.m.nu.assign(5, 0.0);
  st.m.tau = {0.0, 0.0};
  st.K = {5.0, 0.5};

  SolverConfig scfg;
  scfg.step_mu = 0.1;
  scfg.schedule = StepSchedule::Constant;

  Multipliers m = update_multipliers(st, G, topo, cfg, scfg, 1);
  // mu_0 = 1 - 0.1 * (K=5 - load=3) = 0.8
  CHECK(m.mu[0] == doctest::Approx(0.8).epsilon(1e-12));
  // budgets have slack: lambda pinned at zero
  CHECK(m.lambda[0] == 0.0);
  CHECK(m.lambda[1] == 0.0);
  CHECK(m.tau[0] >= 0.0);
  for (double v : m.nu) CHECK(v >= 0.0);

  // exactly tight load target leaves mu unchanged
  st.K = {3.0, 2.0};
  m = update_multipliers(st, G, topo, cfg, scfg, 1);
  CHECK(m.mu[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(m.mu[1] == doctest::Approx(0.0).epsilon(1e-12));

  // a violated budget raises lambda; slack afterwards projects it back to 0
  for (std::size_t i = 0; i < 3; ++i) st.P(i, 0) = 0.02;  // 0.06 > 0.01
  m = update_multipliers(st, G, topo, cfg, scfg, 1);
  CHECK(m.lambda[0] == doctest::Approx(scfg.step_lambda * (0.06 - 0.01)).epsilon(1e-9));
  for (std::size_t i = 0; i < 3; ++i) st.P(i, 0) = 1e-5;
  st.m.lambda = {1e-12, 0.0};
  m = update_multipliers(st, G, topo, cfg, scfg, 1);
  CHECK(m.lambda[0] == 0.0);  // projected
}

TEST_CASE("single user, single BS converges immediately and feasibly") {
  ScenarioConfig cfg = desk_profile();
  cfg.n_small_cells = 0;
  cfg.n_users = 1;
  Topology topo = generate_topology(cfg);
  GainMatrix G = build_gain_matrix(topo, cfg);
  SolverConfig scfg;

  SolverState st = run_solver(topo, G, cfg, scfg);
  CHECK(st.converged);
  CHECK(!st.infeasible);
  CHECK(st.X.served_bs(0) == 0);
  double p = st.P(0, 0);
  CHECK(p > 0.0);
  CHECK(p <= topo.base_stations[0].p_max_w + 1e-9);
  CHECK(sinr(0, 0, st.P, st.X, G, cfg) >= std::pow(2.0, cfg.qos_rate) - 1.0);
  // the objective settles within the first three iterations
  REQUIRE(st.utility_trace.size() >= 3);
  for (std::size_t t = 2; t < st.utility_trace.size(); ++t)
    CHECK(std::abs(st.utility_trace[t] - st.utility_trace[1]) /
              std::abs(st.utility_trace[1]) <
          1e-3);
}

TEST_CASE("solver runs are bit-identical for a fixed seed") {
  ScenarioConfig cfg = desk_profile();
  cfg.n_small_cells = 10;
  cfg.n_users = 40;
  cfg.rng_seed = 23;
  Topology topo = generate_topology(cfg);
  GainMatrix G = build_gain_matrix(topo, cfg);
  SolverConfig scfg;

  SolverState a = run_solver(topo, G, cfg, scfg);
  SolverState b = run_solver(topo, G, cfg, scfg);
  REQUIRE(a.utility_trace.size() == b.utility_trace.size());
  for (std::size_t t = 0; t < a.utility_trace.size(); ++t) {
    CHECK(a.utility_trace[t] == b.utility_trace[t]);
    CHECK(a.ee_trace[t] == b.ee_trace[t]);
  }
  CHECK(a.X == b.X);
}

TEST_CASE("termination state is feasible and prices stay projected") {
  ScenarioConfig cfg = desk_profile();
  cfg.rng_seed = 23;
  Topology topo = generate_topology(cfg);
  GainMatrix G = build_gain_matrix(topo, cfg);
  SolverConfig scfg;

  SolverState st = run_solver(topo, G, cfg, scfg);
  REQUIRE(!st.infeasible);
  std::vector<std::size_t> load = st.X.loads();
  std::size_t total = 0;
  for (std::size_t l : load) total += l;
  CHECK(total == topo.n_users());

  double target = std::pow(2.0, cfg.qos_rate) - 1.0;
  for (std::size_t i = 0; i < topo.n_users(); ++i) {
    std::size_t j = static_cast<std::size_t>(st.X.served_bs(i));
    CHECK(sinr(i, j, st.P, st.X, G, cfg) >= target);
  }
  for (std::size_t j = 0; j < topo.n_bs(); ++j) {
    double served = 0.0;
    for (std::size_t i = 0; i < topo.n_users(); ++i)
      if (st.X.x(i, j)) served += st.P(i, j);
    CHECK(served <= topo.base_stations[j].p_max_w + 1e-9);
    CHECK(st.m.lambda[j] >= 0.0);
    CHECK(st.m.tau[j] >= 0.0);
  }
  for (double v : st.m.nu) CHECK(v >= 0.0);
  // interference stays under the per-BS cap
  for (const IterationTrace& row : st.iteration_trace)
    CHECK(row.interference_residual <= 1e-6);
}

TEST_CASE("dominant gains with flat prices reproduce the max-sinr choice") {
  ScenarioConfig cfg = desk_profile();
  Topology topo = make_topo({1e-3, 1e-3, 1e-3}, {3e-4, 3e-4, 3e-4});
  for (int i = 0; i < 4; ++i) topo.users.push_back(User{i, 0.0, 0.0});
  GainMatrix G;
  G.user_bs = Mat(4, 3, 0.0);
  G.bs_bs = Mat(3, 3, 0.0);
  // per user, one station dominates by two orders of magnitude
  std::size_t dominant[4] = {2, 0, 1, 2};
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      G.user_bs(i, j) = j == dominant[i] ? 1e-8 : 1e-10;

  SolverState st;
  st.X = AssociationMatrix(4, 3);
  st.P = PowerMatrix(4, 3, cfg.initial_power_w);
  st.m.mu.assign(3, 0.0);
  st.m.lambda.assign(3, 0.0);
  st.m.nu.assign(4, 0.0);
  st.m.tau.assign(3, 0.0);
  st.K.assign(3, 1.0);

  AssociationMatrix Xg = associate_users(st, G, topo, cfg);
  auto [Xm, Pm] = max_sinr_associate(topo, G, cfg);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(Xg.served_bs(i) == static_cast<int>(dominant[i]));
    CHECK(Xm.served_bs(i) == Xg.served_bs(i));
  }
}

TEST_CASE("a non-positive harvesting coefficient is rejected at start") {
  ScenarioConfig cfg = desk_profile();
  cfg.n_small_cells = 1;
  cfg.n_users = 2;
  Topology topo = generate_topology(cfg);
  GainMatrix G = build_gain_matrix(topo, cfg);
  G.bs_bs(0, 1) = 2.0;  // |g|^2 = 4: station 0 would harvest more than it spends
  CHECK_THROWS_AS(run_solver(topo, G, cfg, SolverConfig{}), ModelViolationError);
}

TEST_CASE("tiny instance beats every association at grid powers") {
  // 2 stations x 3 users; exhaustive oracle over the 8 binary associations
  // with a per-link power grid, evaluated with the same frozen-candidate
  // interference convention as the solver
  ScenarioConfig cfg = desk_profile();
  cfg.n_small_cells = 1;
  cfg.n_users = 3;
  cfg.macro_radius_m = 50.0;
  cfg.rng_seed = 5;
  Topology topo = generate_topology(cfg);
  GainMatrix G = build_gain_matrix(topo, cfg);
  SolverConfig scfg;
  scfg.max_iters = 80;

  SolverState st = run_solver(topo, G, cfg, scfg);
  REQUIRE(!st.infeasible);
  double solver_obj = utility_objective(st.X, st.P, G, topo, cfg);

  const int npts = 60;  // coarse grid here; the acceptance suite runs 200
  double best = -1e300;
  double qos_target = std::pow(2.0, cfg.qos_rate) - 1.0;
  for (int assoc = 0; assoc < 8; ++assoc) {
    AssociationMatrix X(3, 2);
    for (std::size_t i = 0; i < 3; ++i) X.assign(i, (assoc >> i) & 1);
    std::vector<double> grid[3];
    for (std::size_t i = 0; i < 3; ++i) {
      std::size_t j = static_cast<std::size_t>(X.served_bs(i));
      double hi = topo.base_stations[j].p_max_w;
      for (int k = 0; k < npts; ++k)
        grid[i].push_back(1e-9 * std::pow(hi / 1e-9, double(k) / (npts - 1)));
    }
    PowerMatrix P(3, 2, cfg.initial_power_w);
    for (double p0 : grid[0])
      for (double p1 : grid[1])
        for (double p2 : grid[2]) {
          P(0, static_cast<std::size_t>(X.served_bs(0))) = p0;
          P(1, static_cast<std::size_t>(X.served_bs(1))) = p1;
          P(2, static_cast<std::size_t>(X.served_bs(2))) = p2;
          double served0 = 0.0, served1 = 0.0;
          bool ok = true;
          for (std::size_t i = 0; i < 3; ++i) {
            std::size_t j = static_cast<std::size_t>(X.served_bs(i));
            (j == 0 ? served0 : served1) += P(i, j);
            if (sinr(i, j, P, X, G, cfg) < qos_target) ok = false;
          }
          if (!ok || served0 > topo.base_stations[0].p_max_w ||
              served1 > topo.base_stations[1].p_max_w)
            continue;
          best = std::max(best, utility_objective(X, P, G, topo, cfg));
        }
  }
  REQUIRE(best > -1e300);
  CHECK(solver_obj >= best - 0.02 * std::abs(best));
}
