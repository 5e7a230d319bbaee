#include "armec/passive.hpp"

#include <cmath>
#include <numbers>

namespace armec {

namespace {

constexpr double kSharpness = 50.0;

}  // namespace

SubproblemResult update_theta_passive(SolutionState& s, const ChannelSet& ch, const NoisePowers& noise,
                                      const ScenarioConfig& cfg, int max_rounds) {
  SubproblemResult res;
  const double B = cfg.bandwidth_hz;
  const int K = ch.num_users();
  const int M = ch.num_elements();
  const RVector rates = state_rates(s, ch, noise, B);
  res.before = max_edge_latency(s.relaxed_offload, rates, s.edge_cpu, cfg.compute);
  res.after = res.before;

  RVector edge = RVector::Zero(K);
  for (int k = 0; k < K; ++k) {
    const double l = s.relaxed_offload(k);
    if (l > 0.0 && rates(k) > 0.0 && s.edge_cpu(k) > 0.0)
      edge(k) = l / rates(k) + l * cfg.compute.users[k].cycles_per_bit / s.edge_cpu(k);
  }
  const double worst = edge.maxCoeff();
  if (!(worst > 0.0) || !std::isfinite(res.before)) return res;

  // dT_E/dd = (l B / (ln2 R^2)) v at the tight point; sharpen towards the
  // bottleneck so the sweep attacks the max rather than the sum
  const ThetaQuadratics tq = build_theta_quadratics(s.F, s.power, ch, s.aux_v, noise, B);
  CMatrix Q = CMatrix::Zero(M, M);
  CVector b = CVector::Zero(M);
  for (int k = 0; k < K; ++k) {
    if (edge(k) <= 0.0) continue;
    const double w = s.relaxed_offload(k) * B / (std::numbers::ln2 * rates(k) * rates(k)) *
                     std::exp(kSharpness * (edge(k) / worst - 1.0)) * s.aux_v(k);
    Q += w * tq.mse[k].quad;
    b += w * tq.mse[k].lin;
  }

  CVector theta = s.theta;
  for (int round = 0; round < max_rounds; ++round) {
    for (int m = 0; m < M; ++m) {
      cplx zm = b(m);
      for (int n = 0; n < M; ++n)
        if (n != m) zm += Q(m, n) * theta(n);
      if (std::abs(zm) > 0.0) theta(m) = -zm / std::abs(zm);
    }
    SolutionState trial = s;
    trial.theta = theta;
    const double after = max_edge_latency(trial.relaxed_offload, state_rates(trial, ch, noise, B),
                                          trial.edge_cpu, cfg.compute);
    if (after <= res.after) {
      s.theta = theta;
      res.after = after;
      res.accepted = true;
    } else {
      break;
    }
  }
  return res;
}

BcdResult passive_baseline(const ScenarioConfig& cfg, const ChannelSet& ch, BcdOptions options) {
  const ScenarioConfig checked = validate_config(cfg, SurfaceMode::Passive);
  options.mode = SurfaceMode::Passive;
  return bcd_solve(checked, ch, options);
}

}  // namespace armec
