#pragma once

#include <optional>
#include <string>
#include <vector>

#include "armec/compute.hpp"
#include "armec/conic.hpp"
#include "armec/rate.hpp"
#include "armec/transmission.hpp"
#include "armec/types.hpp"

namespace armec {

/// Noise powers seen by the receiver for the given surface type.
NoisePowers noise_for(const ScenarioConfig& cfg, SurfaceMode mode);

struct IterationTrace {
  int iter = 0;
  double mcl_s = 0.0;
  RVector local_s;   ///< T_L,k
  RVector edge_s;    ///< T_E,k
  double eps = 0.0;  ///< max_k T_E,k
  double ris_power_w = 0.0;
};

struct BcdOptions {
  SurfaceMode mode = SurfaceMode::Active;
  bool fixed_power = false;  ///< keep p = p_max
  bool optimize_theta = true;
  bool optimize_power = true;  ///< false: keep the starting powers
  /// Starting point; replaces the random initialization when set.
  std::optional<SolutionState> warm_start;
  std::uint64_t seed = 1;
};

struct BcdResult {
  SolutionState state;  ///< integer offloading filled in
  std::vector<IterationTrace> trace;
  bool converged = false;
  int iterations = 0;
  double relaxed_mcl_s = 0.0;  ///< last trace value
  double final_mcl_s = 0.0;    ///< with integer offloading
  LatencyReport final_latency;
  RVector rates;
  std::string failure;  ///< empty on success
  /// KKT residual of every conic solve that reported Optimal.
  std::vector<double> optimal_kkt_residuals;
  int max_iter_solves = 0;
};

/// Starting point: full transmit power, random phases with a common amplitude
/// using 90% of the amplification budget (unit modulus for passive), MMSE
/// receivers, equal edge CPU shares and balanced offloading. Phases are
/// redrawn (up to 10 times) while some user has zero rate.
SolutionState init_solution(const ScenarioConfig& cfg, const ChannelSet& ch, SurfaceMode mode,
                            std::uint64_t seed);

/// Relaxed offloading at the balance point for the given rates and CPU shares.
void refresh_offload(SolutionState& s, const RVector& rates, const ComputeProfile& profile);

/// Integer offloading from the current rates and CPU shares.
void round_offload(SolutionState& s, const RVector& rates, const ComputeProfile& profile);

/// Current maximum latency with relaxed offloading and true rates.
IterationTrace evaluate_state(const SolutionState& s, const ChannelSet& ch, const NoisePowers& noise,
                              const ScenarioConfig& cfg, int iter);

/// Block coordinate descent over offloading, edge CPU, receivers, reflection
/// coefficients and powers. Stops when the relative change of the maximum
/// latency drops below the outer tolerance or after the iteration cap. `cfg`
/// must be validated for the same surface mode; its amp_budget_w is the cap.
BcdResult bcd_solve(const ScenarioConfig& cfg, const ChannelSet& ch, const BcdOptions& options = {});

/// CSV with header iter,mcl_s,T_L_1..K,T_E_1..K,eps,ris_power_W preceded by a
/// "# armec-csv v1 trace" line.
std::string trace_to_csv(const std::vector<IterationTrace>& trace);

}  // namespace armec
