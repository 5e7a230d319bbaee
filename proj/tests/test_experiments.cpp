#include <cmath>
#include <numbers>
#include <random>
#include <tuple>

#include "armec/experiments.hpp"
#include "armec/passive.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace armec;

namespace {
constexpr double kPi = std::numbers::pi;

double phase_of(cplx z) {
  double a = std::arg(z);
  return a < 0 ? a + 2 * kPi : a;
}
}  // namespace

TEST_CASE("phase quantization") {
  CVector th(6);
  th << std::polar(0.7, 0.3), std::polar(1.0, kPi / 4), std::polar(2.0, 7 * kPi / 4),
      std::polar(1.0, 2.0), std::polar(1.5, -0.1), std::polar(1.0, 3 * kPi / 4);
  const CVector q = quantize_phases(th);
  const double expect[] = {0.0, 0.0, 1.5 * kPi, 0.5 * kPi, 0.0, 0.5 * kPi};
  for (int m = 0; m < 6; ++m) {
    CHECK(std::abs(q(m)) == doctest::Approx(std::abs(th(m))));
    const double got = phase_of(q(m));
    CHECK(std::min(std::abs(got - expect[m]), std::abs(got - expect[m] - 2 * kPi)) < 1e-12);
  }
  CHECK_THROWS_AS(quantize_phases(th, 1), std::invalid_argument);
  const CVector b = quantize_phases(th, 2);
  CHECK(phase_of(b(3)) == doctest::Approx(kPi));
}

TEST_CASE("quantized design fits the budget") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto sc = testing::make_scenario(default_config(), seed);
    std::mt19937_64 rng(seed);
    const RVector p = RVector::Constant(3, sc.cfg.max_user_power_w);
    // over budget on purpose
    CVector th = testing::draw_cvec(rng, 16, 1.0);
    th *= 3.0 * std::sqrt(sc.cfg.amp_budget_w / ris_amplification_power(th, p, sc.ch, sc.cfg.ris_noise_w));
    const CVector fitted = fit_amplification_budget(quantize_phases(th), p, sc.ch, sc.cfg.ris_noise_w,
                                                    sc.cfg.amp_budget_w);
    CHECK(ris_amplification_power(fitted, p, sc.ch, sc.cfg.ris_noise_w) <= sc.cfg.amp_budget_w * (1 + 1e-12));
    const CVector small = th * 1e-3;
    CHECK(fit_amplification_budget(small, p, sc.ch, sc.cfg.ris_noise_w, sc.cfg.amp_budget_w) == small);
  }
}

TEST_CASE("variant names") {
  for (Variant v : {Variant::Active, Variant::Active2Bit, Variant::Passive})
    CHECK(variant_from_string(to_string(v)) == v);
  CHECK_THROWS_AS(variant_from_string("semi"), std::invalid_argument);
}

TEST_CASE("passive sweeps never raise the edge latency") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto sc = testing::make_scenario(default_config(), seed, SurfaceMode::Passive);
    const NoisePowers noise = noise_for(sc.cfg, SurfaceMode::Passive);
    SolutionState s = init_solution(sc.cfg, sc.ch, SurfaceMode::Passive, seed);
    const SubproblemResult r = update_theta_passive(s, sc.ch, noise, sc.cfg);
    CHECK(r.after <= r.before);
    for (int m = 0; m < s.theta.size(); ++m) CHECK(std::abs(s.theta(m)) == doctest::Approx(1.0));
  }
}

TEST_CASE("two-element passive update against a phase grid") {
  // one user, so the sweep minimizes that user's MSE at fixed receivers
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    std::mt19937_64 rng(100 + seed);
    ScenarioConfig cfg = validate_config(testing::sized_config(1, 2, 2), SurfaceMode::Passive);
    ChannelSet ch = testing::draw_channels(rng, 1, 2, 2);
    ch.g[0] *= 0.3;
    for (auto& h : ch.h) h *= 1e-3;
    ch.H *= 1e-3;
    for (auto& g : ch.g) g *= 1e-3;
    const NoisePowers noise = noise_for(cfg, SurfaceMode::Passive);
    SolutionState s = init_solution(cfg, ch, SurfaceMode::Passive, seed);
    REQUIRE(s.relaxed_offload(0) > 0.0);
    const SolutionState before = s;
    update_theta_passive(s, ch, noise, cfg, 50);
    const double got = mse(0, before.F, s.theta, before.power, ch, noise);

    double grid = 1e300;
    const int n = 720;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        CVector th(2);
        th << std::polar(1.0, 2 * kPi * i / n), std::polar(1.0, 2 * kPi * j / n);
        grid = std::min(grid, mse(0, before.F, th, before.power, ch, noise));
      }
    }
    CHECK(got <= grid * (1 + 1e-3));
  }
}

TEST_CASE("passive element cap") {
  ScenarioConfig cfg = default_config();
  cfg.num_elements = 101;
  cfg.algorithm.outer_max_iter = 1;
  std::mt19937_64 rng(1);
  const ChannelSet ch = testing::draw_channels(rng, 3, 101, 4);
  CHECK_THROWS_AS(passive_baseline(cfg, ch), ConfigError);
  ExperimentOptions opt;
  opt.seeds = {1};
  opt.variants = {Variant::Passive};
  CHECK(sweep_elements(cfg, {101}, {10e-3}, opt).empty());
}

TEST_CASE("sweep csv is reproducible and ordered") {
  ScenarioConfig cfg = default_config();
  cfg.algorithm.outer_max_iter = 3;
  ExperimentOptions opt;
  opt.seeds = {2, 1};
  opt.workers = 1;
  const auto a = sweep_elements(cfg, {8, 4}, {10e-3}, opt);
  CHECK(a.size() == 12);
  opt.workers = 3;
  const auto b = sweep_elements(cfg, {8, 4}, {10e-3}, opt);
  CHECK(sweep_elements_csv(a, 3) == sweep_elements_csv(b, 3));
  for (std::size_t i = 1; i < a.size(); ++i) {
    CHECK(std::tie(a[i - 1].variant, a[i - 1].num_elements, a[i - 1].seed) <
          std::tie(a[i].variant, a[i].num_elements, a[i].seed));
  }
  const std::string csv = sweep_elements_csv(a, 3);
  CHECK(csv.rfind("# armec-csv v1 sweep-m\nvariant,P_tot_W,M,seed,converged,iterations,mcl_s,relaxed_mcl_s,T_1,T_2,T_3\n",
                  0) == 0);

  const auto loc1 = sweep_location(cfg, {280, 240}, opt);
  const auto loc2 = sweep_location(cfg, {280, 240}, opt);
  CHECK(sweep_location_csv(loc1, 3) == sweep_location_csv(loc2, 3));
  CHECK(loc1.front().ris_x_m == 240.0);
}

TEST_CASE("empty sweeps give a header only") {
  ExperimentOptions opt;
  opt.seeds = {1};
  CHECK(sweep_elements_csv(sweep_elements(default_config(), {}, {10e-3}, opt), 3) ==
        "# armec-csv v1 sweep-m\nvariant,P_tot_W,M,seed,converged,iterations,mcl_s,relaxed_mcl_s,T_1,T_2,T_3\n");
  CHECK(convergence_csv(run_convergence(default_config(), {}, opt), 3) ==
        "# armec-csv v1 converge\nM,seed,converged,iter,mcl_s,T_L_1,T_L_2,T_L_3,T_E_1,T_E_2,T_E_3,eps,ris_power_W\n");
}

TEST_CASE("convergence runs pin the amplification budget") {
  ScenarioConfig cfg = default_config();
  cfg.algorithm.outer_max_iter = 2;
  ExperimentOptions opt;
  opt.seeds = {1};
  const auto runs = run_convergence(cfg, {32}, opt, 10e-3);
  REQUIRE(runs.size() == 1);
  for (const auto& t : runs[0].result.trace) CHECK(t.ris_power_w <= 10e-3 * (1 + 1e-9));
}
