#pragma once

#include <limits>

#include "armec/conic.hpp"
#include "armec/rate.hpp"
#include "armec/types.hpp"

namespace armec {

/// Rates of all users at the state; a user with a zero beamformer (zero
/// transmit power) gets rate 0.
RVector state_rates(const SolutionState& s, const ChannelSet& ch, const NoisePowers& noise,
                    double bandwidth_hz);

/// v_k = 1 / d_k at the current (F, theta, p).
RVector optimal_aux_weights(const SolutionState& s, const ChannelSet& ch, const NoisePowers& noise);

/// max_k over users with l_k > 0 of l_k / R_k + l_k c_k / f_E,k, with R_k
/// given. Infinite if some such user has R_k = 0.
double max_edge_latency(const RVector& offload_bits, const RVector& rates, const RVector& edge_cpu,
                        const ComputeProfile& profile);

/// Same with R_k replaced by the MMSE surrogate rate at the stored weights.
double max_edge_latency_surrogate(const SolutionState& s, const ChannelSet& ch,
                                  const NoisePowers& noise, const ScenarioConfig& cfg);

struct SubproblemResult {
  conic::SolveReport report;
  bool solved = false;     ///< a conic program was built and solved
  bool accepted = false;   ///< the new block value replaced the old one
  double before = 0.0;     ///< max edge latency with true rates, before
  double after = 0.0;      ///< same after the update (equal to before if rejected)
};

/// Minimizes the worst edge latency over the reflection coefficients with the
/// beamformers, powers, weights, offloading and edge CPU fixed. `amp_budget_w`
/// is the amplification power cap. The program is built around the scaled
/// variable theta / s_theta so that every block is O(1).
conic::ConvexProgram build_theta_program(const SolutionState& s, const ChannelSet& ch,
                                         const NoisePowers& noise, const ScenarioConfig& cfg,
                                         double amp_budget_w, double* theta_scale = nullptr,
                                         double* latency_scale = nullptr);

SubproblemResult update_theta(SolutionState& s, const ChannelSet& ch, const NoisePowers& noise,
                              const ScenarioConfig& cfg, double amp_budget_w);

/// Same over q = sqrt(p), with q_k in [0, sqrt(p_max)]. An infinite
/// amplification budget drops that constraint.
conic::ConvexProgram build_power_program(const SolutionState& s, const ChannelSet& ch,
                                         const NoisePowers& noise, const ScenarioConfig& cfg,
                                         double amp_budget_w, double* latency_scale = nullptr);

SubproblemResult update_power(SolutionState& s, const ChannelSet& ch, const NoisePowers& noise,
                              const ScenarioConfig& cfg,
                              double amp_budget_w = std::numeric_limits<double>::infinity());

}  // namespace armec
