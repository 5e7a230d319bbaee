#pragma once

#include "armec/bcd.hpp"

namespace armec {

/// Unit-modulus phase update by element-wise coordinate descent on a weighted
/// sum of MSEs. The weights follow the local sensitivity of each user's edge
/// latency to its MSE, sharpened towards the bottleneck user. A sweep is kept
/// only if the worst edge latency (true rates, beamformers fixed) does not
/// increase.
SubproblemResult update_theta_passive(SolutionState& s, const ChannelSet& ch, const NoisePowers& noise,
                                      const ScenarioConfig& cfg, int max_rounds = 5);

/// Same pipeline as the active design with a passive surface of the same
/// size. `cfg` is validated in passive mode here (ConfigError if M*P_c
/// exceeds P_tot).
BcdResult passive_baseline(const ScenarioConfig& cfg, const ChannelSet& ch, BcdOptions options = {});

}  // namespace armec
