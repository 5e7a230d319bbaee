#include "armec/transmission.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace armec {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<int> offloading_users(const SolutionState& s) {
  std::vector<int> users;
  for (int k = 0; k < s.relaxed_offload.size(); ++k)
    if (s.relaxed_offload(k) > 0.0 && s.edge_cpu(k) > 0.0) users.push_back(k);
  return users;
}

RVector surrogate_rates(const SolutionState& s, const ChannelSet& ch, const NoisePowers& noise,
                        double bandwidth_hz) {
  RVector r(ch.num_users());
  for (int k = 0; k < ch.num_users(); ++k)
    r(k) = std::max(0.0, mmse_rate(s.aux_v(k), mse(k, s.F, s.theta, s.power, ch, noise), bandwidth_hz));
  return r;
}

// Normalization of the epigraph variable; falls back to the local-only
// latency when the current edge latency is not finite.
double latency_scale_for(const SolutionState& s, const ChannelSet& ch, const NoisePowers& noise,
                         const ScenarioConfig& cfg) {
  double scale = max_edge_latency_surrogate(s, ch, noise, cfg);
  if (!std::isfinite(scale) || scale <= 0.0) {
    scale = 0.0;
    for (const auto& u : cfg.compute.users)
      scale = std::max(scale, u.task_bits * u.cycles_per_bit / u.local_cpu_hz);
  }
  return scale;
}

// t'_k (y - l c / (f eps_s)) >= l / (B eps_s)
conic::RotatedConeConstraint rate_epigraph(int n, int t_index, int y_index, double l, double c,
                                           double f, double bandwidth_hz, double eps_scale) {
  conic::RotatedConeConstraint rc;
  rc.u.coeffs = RVector::Zero(n);
  rc.u.coeffs(t_index) = 1.0;
  rc.v.coeffs = RVector::Zero(n);
  rc.v.coeffs(y_index) = 1.0;
  rc.v.offset = -l * c / (f * eps_scale);
  rc.W = RMatrix::Zero(1, n);
  rc.w0 = RVector::Constant(1, std::sqrt(l / (bandwidth_hz * eps_scale)));
  return rc;
}

}  // namespace

RVector state_rates(const SolutionState& s, const ChannelSet& ch, const NoisePowers& noise,
                    double bandwidth_hz) {
  RVector r(ch.num_users());
  for (int k = 0; k < ch.num_users(); ++k) {
    if (s.F.col(k).squaredNorm() == 0.0 || s.power(k) <= 0.0) {
      r(k) = 0.0;
    } else {
      r(k) = sinr_and_rate(k, s.F, s.theta, s.power, ch, noise, bandwidth_hz).rate;
    }
  }
  return r;
}

RVector optimal_aux_weights(const SolutionState& s, const ChannelSet& ch, const NoisePowers& noise) {
  RVector v(ch.num_users());
  for (int k = 0; k < ch.num_users(); ++k) v(k) = 1.0 / mse(k, s.F, s.theta, s.power, ch, noise);
  return v;
}

double max_edge_latency(const RVector& offload_bits, const RVector& rates, const RVector& edge_cpu,
                        const ComputeProfile& profile) {
  double worst = 0.0;
  for (int k = 0; k < profile.num_users(); ++k) {
    const double l = offload_bits(k);
    if (l <= 0.0) continue;
    if (rates(k) <= 0.0 || edge_cpu(k) <= 0.0) return kInf;
    worst = std::max(worst, l / rates(k) + l * profile.users[k].cycles_per_bit / edge_cpu(k));
  }
  return worst;
}

double max_edge_latency_surrogate(const SolutionState& s, const ChannelSet& ch,
                                  const NoisePowers& noise, const ScenarioConfig& cfg) {
  return max_edge_latency(s.relaxed_offload, surrogate_rates(s, ch, noise, cfg.bandwidth_hz),
                          s.edge_cpu, cfg.compute);
}

conic::ConvexProgram build_theta_program(const SolutionState& s, const ChannelSet& ch,
                                         const NoisePowers& noise, const ScenarioConfig& cfg,
                                         double amp_budget_w, double* theta_scale,
                                         double* latency_scale) {
  if (!(amp_budget_w > 0.0) || !std::isfinite(amp_budget_w)) {
    throw std::invalid_argument("theta program needs a positive finite amplification budget");
  }
  const int M = ch.num_elements();
  const double B = cfg.bandwidth_hz;
  const std::vector<int> users = offloading_users(s);
  const int n = 2 * M + 1 + static_cast<int>(users.size());
  const int y = 2 * M;

  const ThetaQuadratics tq = build_theta_quadratics(s.F, s.power, ch, s.aux_v, noise, B);
  const RVector pdiag = tq.power.quad.diagonal().real();
  const double st = std::sqrt(amp_budget_w / pdiag.mean());
  const double eps = latency_scale_for(s, ch, noise, cfg);
  if (theta_scale) *theta_scale = st;
  if (latency_scale) *latency_scale = eps;

  conic::ConvexProgram prog(n);
  prog.cost(y) = 1.0;
  for (std::size_t j = 0; j < users.size(); ++j) {
    const int k = users[j];
    const int t = y + 1 + static_cast<int>(j);
    const RealQuadraticForm loss = conic::lift_complex_quadratic(tq.rate_loss[k]);
    // t'_k + rate_loss_k(theta) / B <= 0
    conic::QuadraticConstraint qc;
    qc.Q = RMatrix::Zero(n, n);
    qc.Q.topLeftCorner(2 * M, 2 * M) = (st * st / B) * loss.quad;
    qc.q = RVector::Zero(n);
    qc.q.head(2 * M) = (2.0 * st / B) * loss.lin;
    qc.q(t) = 1.0;
    qc.r = loss.constant / B;
    prog.quadratic.push_back(std::move(qc));
    prog.rotated.push_back(rate_epigraph(n, t, y, s.relaxed_offload(k), cfg.compute.users[k].cycles_per_bit,
                                         s.edge_cpu(k), B, eps));
  }
  conic::QuadraticConstraint budget;
  budget.Q = RMatrix::Zero(n, n);
  budget.Q.diagonal().head(M) = pdiag * (st * st / amp_budget_w);
  budget.Q.diagonal().segment(M, M) = pdiag * (st * st / amp_budget_w);
  budget.q = RVector::Zero(n);
  budget.r = -1.0;
  prog.quadratic.push_back(std::move(budget));
  return prog;
}

SubproblemResult update_theta(SolutionState& s, const ChannelSet& ch, const NoisePowers& noise,
                              const ScenarioConfig& cfg, double amp_budget_w) {
  SubproblemResult res;
  const double B = cfg.bandwidth_hz;
  res.before = max_edge_latency(s.relaxed_offload, state_rates(s, ch, noise, B), s.edge_cpu, cfg.compute);
  res.after = res.before;
  if (amp_budget_w <= 0.0) {
    if (s.theta.squaredNorm() > 0.0) {
      s.theta.setZero();
      res.accepted = true;
      res.after = max_edge_latency(s.relaxed_offload, state_rates(s, ch, noise, B), s.edge_cpu, cfg.compute);
    }
    return res;
  }
  if (offloading_users(s).empty()) return res;

  double st = 1.0;
  const conic::ConvexProgram prog = build_theta_program(s, ch, noise, cfg, amp_budget_w, &st);
  res.report = conic::solve(prog, {cfg.algorithm.solver_tol, cfg.algorithm.solver_max_iter});
  res.solved = true;
  if (res.report.status != conic::SolveStatus::Optimal && res.report.status != conic::SolveStatus::MaxIter)
    return res;

  SolutionState trial = s;
  trial.theta = st * conic::unstack_real(res.report.x.head(2 * ch.num_elements()));
  const double used = ris_amplification_power(trial.theta, trial.power, ch, noise.ris_w);
  if (used > amp_budget_w) trial.theta *= std::sqrt(amp_budget_w / used);
  if (!trial.theta.allFinite()) return res;
  const double after =
      max_edge_latency(trial.relaxed_offload, state_rates(trial, ch, noise, B), trial.edge_cpu, cfg.compute);
  if (after <= res.before) {
    s.theta = trial.theta;
    res.accepted = true;
    res.after = after;
  }
  return res;
}

conic::ConvexProgram build_power_program(const SolutionState& s, const ChannelSet& ch,
                                         const NoisePowers& noise, const ScenarioConfig& cfg,
                                         double amp_budget_w, double* latency_scale) {
  const int K = ch.num_users();
  const double B = cfg.bandwidth_hz;
  const double qmax = std::sqrt(cfg.max_user_power_w);
  const std::vector<int> users = offloading_users(s);
  const int n = K + 1 + static_cast<int>(users.size());
  const int y = K;

  const PowerQuadratics pq = build_power_quadratics(s.F, s.theta, ch, s.aux_v, noise, B);
  const double eps = latency_scale_for(s, ch, noise, cfg);
  if (latency_scale) *latency_scale = eps;

  conic::ConvexProgram prog(n);
  prog.cost(y) = 1.0;
  for (std::size_t j = 0; j < users.size(); ++j) {
    const int k = users[j];
    const int t = y + 1 + static_cast<int>(j);
    const RealQuadraticForm& loss = pq.rate_loss[k];
    conic::QuadraticConstraint qc;
    qc.Q = RMatrix::Zero(n, n);
    qc.Q.topLeftCorner(K, K) = (qmax * qmax / B) * loss.quad;
    qc.q = RVector::Zero(n);
    qc.q.head(K) = (2.0 * qmax / B) * loss.lin;
    qc.q(t) = 1.0;
    qc.r = loss.constant / B;
    prog.quadratic.push_back(std::move(qc));
    prog.rotated.push_back(rate_epigraph(n, t, y, s.relaxed_offload(k), cfg.compute.users[k].cycles_per_bit,
                                         s.edge_cpu(k), B, eps));
  }
  for (int k = 0; k < K; ++k) prog.boxes.push_back({k, 0.0, 1.0});
  if (std::isfinite(amp_budget_w)) {
    conic::QuadraticConstraint budget;
    budget.Q = RMatrix::Zero(n, n);
    budget.Q.topLeftCorner(K, K) = (qmax * qmax / amp_budget_w) * pq.power.quad;
    budget.q = RVector::Zero(n);
    budget.r = pq.power.constant / amp_budget_w - 1.0;
    prog.quadratic.push_back(std::move(budget));
  }
  return prog;
}

SubproblemResult update_power(SolutionState& s, const ChannelSet& ch, const NoisePowers& noise,
                              const ScenarioConfig& cfg, double amp_budget_w) {
  SubproblemResult res;
  const int K = ch.num_users();
  const double B = cfg.bandwidth_hz;
  res.before = max_edge_latency(s.relaxed_offload, state_rates(s, ch, noise, B), s.edge_cpu, cfg.compute);
  res.after = res.before;
  if (cfg.max_user_power_w <= 0.0) {
    if (s.power.squaredNorm() > 0.0) {
      s.power.setZero();
      res.accepted = true;
      res.after = max_edge_latency(s.relaxed_offload, state_rates(s, ch, noise, B), s.edge_cpu, cfg.compute);
    }
    return res;
  }
  if (offloading_users(s).empty()) return res;

  const conic::ConvexProgram prog = build_power_program(s, ch, noise, cfg, amp_budget_w);
  res.report = conic::solve(prog, {cfg.algorithm.solver_tol, cfg.algorithm.solver_max_iter});
  res.solved = true;
  if (res.report.status != conic::SolveStatus::Optimal && res.report.status != conic::SolveStatus::MaxIter)
    return res;

  SolutionState trial = s;
  const RVector z = res.report.x.head(K).cwiseMax(0.0).cwiseMin(1.0);
  trial.power = cfg.max_user_power_w * z.cwiseProduct(z);
  if (std::isfinite(amp_budget_w)) {
    const double fixed = s.theta.squaredNorm() * noise.ris_w;
    const double used = ris_amplification_power(trial.theta, trial.power, ch, noise.ris_w);
    if (used > amp_budget_w) trial.power *= std::max(0.0, (amp_budget_w - fixed) / (used - fixed));
  }
  if (!trial.power.allFinite()) return res;
  const double after =
      max_edge_latency(trial.relaxed_offload, state_rates(trial, ch, noise, B), trial.edge_cpu, cfg.compute);
  if (after <= res.before) {
    s.power = trial.power;
    res.accepted = true;
    res.after = after;
  }
  return res;
}

}  // namespace armec
