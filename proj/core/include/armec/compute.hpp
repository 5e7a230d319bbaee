#pragma once

#include <cstdint>
#include <vector>

#include "armec/conic.hpp"
#include "armec/types.hpp"

namespace armec {

struct UserLatency {
  double local_s = 0.0;  ///< T_L,k
  double edge_s = 0.0;   ///< T_E,k, infinite if bits are offloaded over a dead link
  double total_s = 0.0;  ///< max of the two
};

struct LatencyReport {
  std::vector<UserLatency> users;
  double mcl = 0.0;     ///< max_k T_k
  bool finite = true;   ///< false if some user offloads with R_k = 0 or f_E,k = 0
};

UserLatency user_latency(const UserProfile& user, double offload_bits, double rate, double edge_cpu);

LatencyReport latencies(const RVector& offload_bits, const RVector& edge_cpu, const RVector& rates,
                        const ComputeProfile& profile);

struct OffloadVolume {
  double relaxed = 0.0;     ///< balance point where T_L = T_E
  std::int64_t bits = 0;    ///< integer choice among floor/ceil
};

/// Closed-form offloading split of user k. Ties between floor and ceil go to
/// the floor.
OffloadVolume optimal_offload_volume(int k, double rate, double edge_cpu, const ComputeProfile& profile);

/// Latency of user k when its offloaded volume sits at the balance point, as a
/// function of its edge CPU share: (L c f + L c^2 R) / (f_L f + c R (f_L + f)).
double balanced_latency(const UserProfile& user, double rate, double edge_cpu);

/// max_k balanced_latency: the edge-CPU allocation objective.
double allocation_objective(const RVector& edge_cpu, const RVector& rates, const ComputeProfile& profile);

/// Convex term of the SCA decomposition and its tangent surrogate:
/// g(f) = c R f_L / f + f_L + c R, h(f | f0) = g(f0) + g'(f0) (f - f0).
double sca_convex_term(const UserProfile& user, double rate, double edge_cpu);
double sca_tangent_term(const UserProfile& user, double rate, double edge_cpu, double anchor);

struct ScaOptions {
  double tol = 1e-6;
  int max_iter = 50;
  conic::SolverSettings solver;
};

struct ScaResult {
  RVector edge_cpu;
  std::vector<double> objective_history;  ///< objective at the start point, then per iterate
  std::vector<conic::SolveReport> reports;
  int iterations = 0;
  bool converged = false;
};

/// Successive convex approximation of the min-max edge-CPU allocation. Each
/// step solves the convex restriction obtained by replacing g with its
/// tangent at the current iterate. `start` must be feasible with positive
/// entries.
ScaResult sca_resource_allocation(const RVector& rates, const ComputeProfile& profile,
                                  const RVector& start, const ScaOptions& options = {});

}  // namespace armec
