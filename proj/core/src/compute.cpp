#include "armec/compute.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace armec {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

UserLatency user_latency(const UserProfile& user, double offload_bits, double rate, double edge_cpu) {
  UserLatency t;
  t.local_s = (user.task_bits - offload_bits) * user.cycles_per_bit / user.local_cpu_hz;
  if (offload_bits <= 0.0) {
    t.edge_s = 0.0;
  } else if (rate <= 0.0 || edge_cpu <= 0.0) {
    t.edge_s = kInf;
  } else {
    t.edge_s = offload_bits / rate + offload_bits * user.cycles_per_bit / edge_cpu;
  }
  t.total_s = std::max(t.local_s, t.edge_s);
  return t;
}

LatencyReport latencies(const RVector& offload_bits, const RVector& edge_cpu, const RVector& rates,
                        const ComputeProfile& profile) {
  LatencyReport rep;
  for (int k = 0; k < profile.num_users(); ++k) {
    const UserLatency t = user_latency(profile.users[k], offload_bits(k), rates(k), edge_cpu(k));
    rep.finite = rep.finite && std::isfinite(t.total_s);
    rep.mcl = std::max(rep.mcl, t.total_s);
    rep.users.push_back(t);
  }
  return rep;
}

OffloadVolume optimal_offload_volume(int k, double rate, double edge_cpu, const ComputeProfile& profile) {
  const UserProfile& u = profile.users.at(k);
  OffloadVolume out;
  const double L = u.task_bits;
  const double c = u.cycles_per_bit;
  const double fl = u.local_cpu_hz;
  if (rate <= 0.0 || edge_cpu <= 0.0) return out;
  if (!std::isfinite(rate) && !std::isfinite(edge_cpu)) {
    out.relaxed = L;
  } else {
    out.relaxed = L * c * rate * edge_cpu / (fl * edge_cpu + c * rate * (fl + edge_cpu));
  }
  out.relaxed = std::clamp(out.relaxed, 0.0, L);
  const double lo = std::floor(out.relaxed);
  const double hi = std::ceil(out.relaxed);
  const double t_lo = user_latency(u, lo, rate, edge_cpu).total_s;
  const double t_hi = user_latency(u, hi, rate, edge_cpu).total_s;
  out.bits = static_cast<std::int64_t>(t_hi < t_lo ? hi : lo);
  return out;
}

double balanced_latency(const UserProfile& user, double rate, double edge_cpu) {
  const double L = user.task_bits;
  const double c = user.cycles_per_bit;
  const double fl = user.local_cpu_hz;
  const double den = fl * edge_cpu + c * rate * (fl + edge_cpu);
  if (den <= 0.0) return L * c / fl;
  return (L * c * edge_cpu + L * c * c * rate) / den;
}

double allocation_objective(const RVector& edge_cpu, const RVector& rates, const ComputeProfile& profile) {
  double worst = 0.0;
  for (int k = 0; k < profile.num_users(); ++k)
    worst = std::max(worst, balanced_latency(profile.users[k], rates(k), edge_cpu(k)));
  return worst;
}

double sca_convex_term(const UserProfile& user, double rate, double edge_cpu) {
  const double crf = user.cycles_per_bit * rate * user.local_cpu_hz;
  return crf / edge_cpu + user.local_cpu_hz + user.cycles_per_bit * rate;
}

double sca_tangent_term(const UserProfile& user, double rate, double edge_cpu, double anchor) {
  const double crf = user.cycles_per_bit * rate * user.local_cpu_hz;
  return crf / anchor - crf / (anchor * anchor) * (edge_cpu - anchor) + user.local_cpu_hz +
         user.cycles_per_bit * rate;
}

ScaResult sca_resource_allocation(const RVector& rates, const ComputeProfile& profile,
                                  const RVector& start, const ScaOptions& options) {
  const int K = profile.num_users();
  const double ftot = profile.edge_cpu_total_hz;
  if (start.size() != K || (start.array() < 0.0).any() || start.sum() > ftot * (1.0 + 1e-12)) {
    throw std::invalid_argument("SCA start point is infeasible");
  }
  ScaResult res;
  res.edge_cpu = start;
  double current = allocation_objective(start, rates, profile);
  res.objective_history.push_back(current);

  const double floor_share = 1e-9 * ftot;
  // variables: [eta, phi_1..K, a_1..K, b_1..K]; f = ftot * phi, times / scale
  const int n = 1 + 3 * K;
  auto phi_idx = [](int k) { return 1 + k; };
  auto a_idx = [K](int k) { return 1 + K + k; };
  auto b_idx = [K](int k) { return 1 + 2 * K + k; };

  for (int r = 0; r < options.max_iter; ++r) {
    const double tscale = current;
    conic::ConvexProgram prog(n);
    prog.cost(0) = 1.0;
    RVector sum_row = RVector::Zero(n);
    for (int k = 0; k < K; ++k) {
      const UserProfile& u = profile.users[k];
      const double L = u.task_bits;
      const double c = u.cycles_per_bit;
      const double fl = u.local_cpu_hz;
      const double R = rates(k);
      const double anchor = std::max(res.edge_cpu(k), floor_share);

      const double g0 = sca_convex_term(u, R, anchor);
      const double h0 = sca_tangent_term(u, R, anchor, anchor);
      if (std::abs(g0 - h0) > 1e-12 * std::abs(g0)) {
        throw std::logic_error("SCA surrogate is not tight at its anchor");
      }
      const double slope = c * R * fl / (anchor * anchor);
      const double intercept = 2.0 * c * R * fl / anchor + fl + c * R;

      // L c / a <= h(f | f^r)  as  a * h >= L c
      conic::RotatedConeConstraint cone_a;
      cone_a.u.coeffs = RVector::Zero(n);
      cone_a.u.coeffs(a_idx(k)) = 1.0;
      cone_a.v.coeffs = RVector::Zero(n);
      cone_a.v.coeffs(phi_idx(k)) = -tscale / (L * c) * slope * ftot;
      cone_a.v.offset = tscale / (L * c) * intercept;
      cone_a.W = RMatrix::Zero(1, n);
      cone_a.w0 = RVector::Ones(1);
      prog.rotated.push_back(cone_a);

      if (R > 0.0) {
        // L c^2 R / b <= (f_L + c R) f + c R f_L
        conic::RotatedConeConstraint cone_b;
        cone_b.u.coeffs = RVector::Zero(n);
        cone_b.u.coeffs(b_idx(k)) = 1.0;
        cone_b.v.coeffs = RVector::Zero(n);
        const double norm = tscale / (L * c * c * R);
        cone_b.v.coeffs(phi_idx(k)) = norm * (fl + c * R) * ftot;
        cone_b.v.offset = norm * c * R * fl;
        cone_b.W = RMatrix::Zero(1, n);
        cone_b.w0 = RVector::Ones(1);
        prog.rotated.push_back(cone_b);
      } else {
        prog.boxes.push_back({b_idx(k), 0.0, std::numeric_limits<double>::infinity()});
      }

      conic::LinearInequality sum_ab;  // a + b <= eta
      sum_ab.a = RVector::Zero(n);
      sum_ab.a(a_idx(k)) = 1.0;
      sum_ab.a(b_idx(k)) = 1.0;
      sum_ab.a(0) = -1.0;
      sum_ab.b = 0.0;
      prog.linear.push_back(sum_ab);

      prog.boxes.push_back({phi_idx(k), 0.0, std::numeric_limits<double>::infinity()});
      sum_row(phi_idx(k)) = 1.0;
    }
    prog.linear.push_back({sum_row, 1.0});

    conic::SolveReport rep = conic::solve(prog, options.solver);
    res.reports.push_back(rep);
    res.iterations = r + 1;
    if (rep.status != conic::SolveStatus::Optimal && rep.status != conic::SolveStatus::MaxIter) {
      throw std::runtime_error(std::string("SCA subproblem failed: ") + conic::to_string(rep.status));
    }
    RVector next = (rep.x.segment(1, K) * ftot).cwiseMax(0.0);
    if (next.sum() > ftot) next *= ftot / next.sum();
    const double value = allocation_objective(next, rates, profile);
    if (!(value <= current * (1.0 + 1e-12))) {
      // restriction solved inexactly; the anchor is still the best point
      res.converged = rep.status == conic::SolveStatus::Optimal;
      break;
    }
    const double change = std::abs(current - value) / current;
    res.edge_cpu = next;
    current = value;
    res.objective_history.push_back(current);
    if (change < options.tol) {
      res.converged = true;
      break;
    }
  }
  return res;
}

}  // namespace armec
