#include <algorithm>
#include <cmath>

#include "armec/bcd.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace armec;

TEST_CASE("initial point") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto sc = testing::make_scenario(default_config(), seed);
    const NoisePowers noise = noise_for(sc.cfg, SurfaceMode::Active);
    const SolutionState s = init_solution(sc.cfg, sc.ch, SurfaceMode::Active, seed);
    const double used = ris_amplification_power(s.theta, s.power, sc.ch, noise.ris_w);
    CHECK(std::abs(used - 0.9 * sc.cfg.amp_budget_w) <= 1e-9 * sc.cfg.amp_budget_w);
    CHECK((s.power.array() == sc.cfg.max_user_power_w).all());
    CHECK(s.edge_cpu.sum() == doctest::Approx(sc.cfg.compute.edge_cpu_total_hz));
    CHECK(check_feasibility(s, sc.cfg, sc.ch, 1e-8, sc.cfg.amp_budget_w).ok);
    for (int k = 0; k < sc.cfg.num_users(); ++k) {
      CHECK(s.aux_v(k) == doctest::Approx(1.0 / mse(k, s.F, s.theta, s.power, sc.ch, noise)));
    }

    const SolutionState again = init_solution(sc.cfg, sc.ch, SurfaceMode::Active, seed);
    CHECK(again.theta == s.theta);
    CHECK(again.F == s.F);
    CHECK(again.offload_bits == s.offload_bits);
  }
  auto sc = testing::make_scenario(default_config(), 1);
  const SolutionState p = init_solution(sc.cfg, sc.ch, SurfaceMode::Passive, 1);
  for (int m = 0; m < p.theta.size(); ++m) CHECK(std::abs(p.theta(m)) == doctest::Approx(1.0));
}

TEST_CASE("zero tolerance and a single pass") {
  ScenarioConfig cfg = default_config();
  cfg.algorithm.outer_tol = 0.0;
  cfg.algorithm.outer_max_iter = 1;
  auto sc = testing::make_scenario(cfg, 3);
  const BcdResult res = bcd_solve(sc.cfg, sc.ch, {.seed = 3});
  CHECK(res.iterations == 1);
  CHECK(res.trace.size() == 1);
  CHECK_FALSE(res.converged);
  CHECK(res.failure.empty());
  CHECK(check_feasibility(res.state, sc.cfg, sc.ch, 1e-8, sc.cfg.amp_budget_w).ok);
}

TEST_CASE("full solve") {
  for (std::uint64_t seed : {1, 2}) {
    auto sc = testing::make_scenario(default_config(), seed);
    const BcdResult res = bcd_solve(sc.cfg, sc.ch, {.seed = seed});
    REQUIRE(res.failure.empty());
    CHECK(res.converged);
    CHECK(check_feasibility(res.state, sc.cfg, sc.ch, 1e-8, sc.cfg.amp_budget_w).ok);

    // monotone trace, starting below the initial point
    const NoisePowers noise = noise_for(sc.cfg, SurfaceMode::Active);
    const SolutionState init = init_solution(sc.cfg, sc.ch, SurfaceMode::Active, seed);
    double prev = evaluate_state(init, sc.ch, noise, sc.cfg, 0).mcl_s;
    for (const auto& t : res.trace) {
      CHECK(t.mcl_s <= prev * (1.0 + 1e-9));
      CHECK(t.ris_power_w <= sc.cfg.amp_budget_w * (1.0 + 1e-9));
      prev = t.mcl_s;
    }
    CHECK(res.relaxed_mcl_s <= res.trace.back().mcl_s * (1.0 + 1e-9));

    // interior users balance local and edge latency
    for (int k = 0; k < sc.cfg.num_users(); ++k) {
      const double l = res.state.relaxed_offload(k);
      if (l <= 0.0 || l >= sc.cfg.compute.users[k].task_bits) continue;
      const UserLatency u = user_latency(sc.cfg.compute.users[k], l, res.rates(k), res.state.edge_cpu(k));
      CHECK(std::abs(u.local_s - u.edge_s) <= 0.01 * res.relaxed_mcl_s);
    }

    // integer offloading costs at most one bit of latency
    CHECK(res.final_mcl_s >= res.relaxed_mcl_s * (1.0 - 1e-9));
    CHECK(res.final_mcl_s <= res.relaxed_mcl_s * (1.0 + 1e-3));

    for (double r : res.optimal_kkt_residuals) CHECK(r <= sc.cfg.algorithm.solver_tol);

    // restarting from the result moves the objective by less than the tolerance
    ScenarioConfig one = sc.cfg;
    one.algorithm.outer_max_iter = 1;
    BcdOptions warm;
    warm.warm_start = res.state;
    const BcdResult again = bcd_solve(one, sc.ch, warm);
    REQUIRE(again.trace.size() == 1);
    CHECK(std::abs(again.trace[0].mcl_s - res.relaxed_mcl_s) / res.relaxed_mcl_s < sc.cfg.algorithm.outer_tol);
  }
}

TEST_CASE("solve is deterministic") {
  ScenarioConfig cfg = default_config();
  cfg.algorithm.outer_max_iter = 4;
  auto sc = testing::make_scenario(cfg, 9);
  const BcdResult a = bcd_solve(sc.cfg, sc.ch, {.seed = 9});
  const BcdResult b = bcd_solve(sc.cfg, sc.ch, {.seed = 9});
  CHECK(trace_to_csv(a.trace) == trace_to_csv(b.trace));
  CHECK(a.state.theta == b.state.theta);
}

TEST_CASE("fixed power keeps the cap") {
  ScenarioConfig cfg = default_config();
  cfg.algorithm.outer_max_iter = 3;
  auto sc = testing::make_scenario(cfg, 4);
  BcdOptions opt;
  opt.fixed_power = true;
  opt.seed = 4;
  const BcdResult res = bcd_solve(sc.cfg, sc.ch, opt);
  CHECK((res.state.power.array() == sc.cfg.max_user_power_w).all());
}

TEST_CASE("trace csv") {
  ScenarioConfig cfg = default_config();
  cfg.algorithm.outer_max_iter = 2;
  auto sc = testing::make_scenario(cfg, 1);
  const BcdResult res = bcd_solve(sc.cfg, sc.ch, {.seed = 1});
  const std::string csv = trace_to_csv(res.trace);
  CHECK(csv.rfind("# armec-csv v1 trace\niter,mcl_s,T_L_1,T_L_2,T_L_3,T_E_1,T_E_2,T_E_3,eps,ris_power_W\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 2 + static_cast<long>(res.trace.size()));
  CHECK(trace_to_csv({}) == "# armec-csv v1 trace\niter,mcl_s,eps,ris_power_W\n");
}
