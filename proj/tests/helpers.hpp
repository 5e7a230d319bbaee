#pragma once

#include <random>

#include "armec/bcd.hpp"
#include "armec/channel.hpp"
#include "armec/types.hpp"

namespace armec::testing {

inline cplx draw_cn(std::mt19937_64& rng, double var = 1.0) {
  std::normal_distribution<double> nd(0.0, std::sqrt(var / 2.0));
  return {nd(rng), nd(rng)};
}

inline CVector draw_cvec(std::mt19937_64& rng, int n, double var = 1.0) {
  CVector v(n);
  for (int i = 0; i < n; ++i) v(i) = draw_cn(rng, var);
  return v;
}

/// Channels of unit-ish magnitude so that every term of the SINR is O(1).
inline ChannelSet draw_channels(std::mt19937_64& rng, int K, int M, int N) {
  ChannelSet ch;
  ch.H.resize(N, M);
  for (int n = 0; n < N; ++n)
    for (int m = 0; m < M; ++m) ch.H(n, m) = draw_cn(rng);
  for (int k = 0; k < K; ++k) {
    ch.h.push_back(draw_cvec(rng, M));
    ch.g.push_back(draw_cvec(rng, N));
  }
  return ch;
}

/// Default scenario trimmed or extended to K users with M elements and N
/// antennas. Not validated.
inline ScenarioConfig sized_config(int K, int M, int N) {
  ScenarioConfig cfg = default_config();
  const auto base = cfg.compute.users;
  cfg.compute.users.clear();
  for (int k = 0; k < K; ++k) cfg.compute.users.push_back(base[k % base.size()]);
  cfg.num_elements = M;
  cfg.num_antennas = N;
  return cfg;
}

/// Scenario and a channel realization drawn from its geometry.
struct Scenario {
  ScenarioConfig cfg;
  ChannelSet ch;
};

inline Scenario make_scenario(ScenarioConfig cfg, std::uint64_t seed,
                              SurfaceMode mode = SurfaceMode::Active) {
  cfg = validate_config(cfg, mode);
  ChannelSet ch = synthesize_channels(build_geometry(cfg, seed), cfg, seed);
  return {cfg, ch};
}

}  // namespace armec::testing
