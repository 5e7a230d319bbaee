#include "armec/bcd.hpp"

#include <cmath>
#include <iomanip>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

#include "armec/channel.hpp"
#include "armec/passive.hpp"

namespace armec {

namespace {

bool any_dead_user(const RVector& rates) { return (rates.array() <= 0.0).any(); }

void track(BcdResult& res, const SubproblemResult& sub) {
  if (!sub.solved) return;
  if (sub.report.status == conic::SolveStatus::Optimal) {
    res.optimal_kkt_residuals.push_back(sub.report.kkt_residual());
  } else if (sub.report.status == conic::SolveStatus::MaxIter) {
    ++res.max_iter_solves;
  }
}

// Balanced offloading, SCA edge-CPU allocation, then offloading again for the
// new shares. Rates are unchanged by either step.
bool allocate_compute(SolutionState& s, const RVector& rates, const ScenarioConfig& cfg,
                      const conic::SolverSettings& solver, BcdResult& res) {
  const auto& alg = cfg.algorithm;
  refresh_offload(s, rates, cfg.compute);
  try {
    const ScaResult sca =
        sca_resource_allocation(rates, cfg.compute, s.edge_cpu, {alg.sca_tol, alg.sca_max_iter, solver});
    for (const auto& rep : sca.reports) {
      if (rep.status == conic::SolveStatus::Optimal) res.optimal_kkt_residuals.push_back(rep.kkt_residual());
      if (rep.status == conic::SolveStatus::MaxIter) ++res.max_iter_solves;
    }
    s.edge_cpu = sca.edge_cpu;
  } catch (const std::runtime_error& e) {
    res.failure = e.what();
    return false;
  }
  refresh_offload(s, rates, cfg.compute);
  return true;
}

std::string failure_text(const char* block, const SubproblemResult& sub) {
  return std::string(block) + " subproblem reported " + conic::to_string(sub.report.status);
}

}  // namespace

NoisePowers noise_for(const ScenarioConfig& cfg, SurfaceMode mode) {
  return {mode == SurfaceMode::Active ? cfg.ris_noise_w : 0.0, cfg.ap_noise_w};
}

void refresh_offload(SolutionState& s, const RVector& rates, const ComputeProfile& profile) {
  const int K = profile.num_users();
  s.relaxed_offload.resize(K);
  for (int k = 0; k < K; ++k) s.relaxed_offload(k) = optimal_offload_volume(k, rates(k), s.edge_cpu(k), profile).relaxed;
}

void round_offload(SolutionState& s, const RVector& rates, const ComputeProfile& profile) {
  const int K = profile.num_users();
  s.offload_bits.assign(K, 0);
  for (int k = 0; k < K; ++k) s.offload_bits[k] = optimal_offload_volume(k, rates(k), s.edge_cpu(k), profile).bits;
}

SolutionState init_solution(const ScenarioConfig& cfg, const ChannelSet& ch, SurfaceMode mode,
                            std::uint64_t seed) {
  const int K = cfg.num_users();
  const int M = ch.num_elements();
  const NoisePowers noise = noise_for(cfg, mode);
  SolutionState s;
  s.power = RVector::Constant(K, cfg.max_user_power_w);
  s.edge_cpu = RVector::Constant(K, cfg.compute.edge_cpu_total_hz / K);

  double amplitude = 1.0;
  if (mode == SurfaceMode::Active) {
    double per_unit = 0.0;  // amplification power of a unit-modulus theta
    for (int m = 0; m < M; ++m) {
      double col = noise.ris_w;
      for (int k = 0; k < K; ++k) col += s.power(k) * std::norm(ch.h[k](m));
      per_unit += col;
    }
    amplitude = cfg.amp_budget_w > 0.0 ? std::sqrt(0.9 * cfg.amp_budget_w / per_unit) : 0.0;
  }

  std::mt19937_64 rng(derive_seed(seed, 3));
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  RVector rates;
  for (int attempt = 0; attempt < 10; ++attempt) {
    s.theta.resize(M);
    for (int m = 0; m < M; ++m) s.theta(m) = std::polar(amplitude, phase(rng));
    s.F = mmse_receivers(s.theta, s.power, ch, noise);
    rates = state_rates(s, ch, noise, cfg.bandwidth_hz);
    if (!any_dead_user(rates)) break;
  }
  refresh_offload(s, rates, cfg.compute);
  round_offload(s, rates, cfg.compute);
  s.aux_v = optimal_aux_weights(s, ch, noise);
  return s;
}

IterationTrace evaluate_state(const SolutionState& s, const ChannelSet& ch, const NoisePowers& noise,
                              const ScenarioConfig& cfg, int iter) {
  const RVector rates = state_rates(s, ch, noise, cfg.bandwidth_hz);
  const LatencyReport lat = latencies(s.relaxed_offload, s.edge_cpu, rates, cfg.compute);
  IterationTrace t;
  t.iter = iter;
  t.mcl_s = lat.mcl;
  const int K = cfg.num_users();
  t.local_s.resize(K);
  t.edge_s.resize(K);
  for (int k = 0; k < K; ++k) {
    t.local_s(k) = lat.users[k].local_s;
    t.edge_s(k) = lat.users[k].edge_s;
  }
  t.eps = t.edge_s.maxCoeff();
  t.ris_power_w = ris_amplification_power(s.theta, s.power, ch, noise.ris_w);
  return t;
}

BcdResult bcd_solve(const ScenarioConfig& cfg, const ChannelSet& ch, const BcdOptions& options) {
  check_channels(ch, cfg);
  const NoisePowers noise = noise_for(cfg, options.mode);
  const auto& alg = cfg.algorithm;
  const conic::SolverSettings solver{alg.solver_tol, alg.solver_max_iter};

  BcdResult res;
  SolutionState s = options.warm_start ? *options.warm_start : init_solution(cfg, ch, options.mode, options.seed);
  if (options.fixed_power) s.power.setConstant(cfg.max_user_power_w);
  if (options.warm_start || options.fixed_power) {
    s.F = mmse_receivers(s.theta, s.power, ch, noise);
    refresh_offload(s, state_rates(s, ch, noise, cfg.bandwidth_hz), cfg.compute);
  }

  if (!options.warm_start && any_dead_user(state_rates(s, ch, noise, cfg.bandwidth_hz))) {
    res.failure = "initialization: some user has zero rate after 10 phase draws";
  }

  double previous = evaluate_state(s, ch, noise, cfg, 0).mcl_s;
  for (int it = 1; it <= alg.outer_max_iter && res.failure.empty(); ++it) {
    // offloading and edge CPU
    if (!allocate_compute(s, state_rates(s, ch, noise, cfg.bandwidth_hz), cfg, solver, res)) break;

    // receivers
    s.aux_v = optimal_aux_weights(s, ch, noise);
    s.F = mmse_receivers(s.theta, s.power, ch, noise);

    // reflection coefficients
    if (options.optimize_theta) {
      s.aux_v = optimal_aux_weights(s, ch, noise);
      const SubproblemResult th = options.mode == SurfaceMode::Active
                                      ? update_theta(s, ch, noise, cfg, cfg.amp_budget_w)
                                      : update_theta_passive(s, ch, noise, cfg);
      track(res, th);
      if (th.solved && th.report.status == conic::SolveStatus::Infeasible) {
        res.failure = failure_text("theta", th);
        break;
      }
    }

    // transmit powers
    if (!options.fixed_power && options.optimize_power) {
      s.aux_v = optimal_aux_weights(s, ch, noise);
      const SubproblemResult pw = update_power(s, ch, noise, cfg, cfg.amp_budget_w);
      track(res, pw);
      if (pw.solved && pw.report.status == conic::SolveStatus::Infeasible) {
        res.failure = failure_text("power", pw);
        break;
      }
    }

    // balance point for the new rates, else a local-bound user hides the gain
    refresh_offload(s, state_rates(s, ch, noise, cfg.bandwidth_hz), cfg.compute);
    const IterationTrace t = evaluate_state(s, ch, noise, cfg, it);
    res.trace.push_back(t);
    res.iterations = it;
    const double change = std::abs(previous - t.mcl_s) / t.mcl_s;
    previous = t.mcl_s;
    if (change < alg.outer_tol) {
      res.converged = true;
      break;
    }
  }

  // final receivers and compute allocation for the last transmission design
  if (res.failure.empty()) {
    s.F = mmse_receivers(s.theta, s.power, ch, noise);
    allocate_compute(s, state_rates(s, ch, noise, cfg.bandwidth_hz), cfg, solver, res);
  }
  s.aux_v = optimal_aux_weights(s, ch, noise);
  res.rates = state_rates(s, ch, noise, cfg.bandwidth_hz);
  refresh_offload(s, res.rates, cfg.compute);
  res.relaxed_mcl_s = latencies(s.relaxed_offload, s.edge_cpu, res.rates, cfg.compute).mcl;
  round_offload(s, res.rates, cfg.compute);
  RVector bits(cfg.num_users());
  for (int k = 0; k < cfg.num_users(); ++k) bits(k) = static_cast<double>(s.offload_bits[k]);
  res.final_latency = latencies(bits, s.edge_cpu, res.rates, cfg.compute);
  res.final_mcl_s = res.final_latency.mcl;
  res.state = std::move(s);
  if (!res.failure.empty()) res.converged = false;
  return res;
}

std::string trace_to_csv(const std::vector<IterationTrace>& trace) {
  std::ostringstream os;
  os << "# armec-csv v1 trace\n";
  const int K = trace.empty() ? 0 : static_cast<int>(trace.front().local_s.size());
  os << "iter,mcl_s";
  for (int k = 1; k <= K; ++k) os << ",T_L_" << k;
  for (int k = 1; k <= K; ++k) os << ",T_E_" << k;
  os << ",eps,ris_power_W\n";
  os << std::setprecision(17);
  for (const auto& t : trace) {
    os << t.iter << ',' << t.mcl_s;
    for (int k = 0; k < K; ++k) os << ',' << t.local_s(k);
    for (int k = 0; k < K; ++k) os << ',' << t.edge_s(k);
    os << ',' << t.eps << ',' << t.ris_power_w << '\n';
  }
  return os.str();
}

}  // namespace armec
