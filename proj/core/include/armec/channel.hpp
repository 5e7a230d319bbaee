#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "armec/types.hpp"

namespace armec {

/// Node positions and the link distances derived from them.
struct Geometry {
  Point3 ap;
  Point3 ris;
  std::vector<Point3> users;
  double ris_ap_distance = 0.0;             ///< d_RA
  std::vector<double> user_ris_distance;    ///< d_UR,k
  std::vector<double> user_ap_distance;     ///< d_UA,k
};

/// Places the nodes. Users are drawn uniformly in the configured square at the
/// configured height unless explicit positions are set; the draw depends only
/// on `seed`.
Geometry build_geometry(const ScenarioConfig& cfg, std::uint64_t seed);

/// Geometry with explicit user positions (no randomness).
Geometry make_geometry(const Point3& ap, const Point3& ris, std::vector<Point3> users);

/// Linear gain 10^(PL/10) of PL = -10*alpha*log10(d) - 30 dB. Throws
/// std::invalid_argument for d <= 0.
double path_loss_linear(double distance_m, double exponent);
double path_loss_db(double distance_m, double exponent);

/// Rayleigh-faded channels: i.i.d. CN(0, 1) entries scaled by the square root
/// of the link gain. Deterministic in `seed`.
ChannelSet synthesize_channels(const Geometry& geom, const ScenarioConfig& cfg, std::uint64_t seed);

/// Seeded stream derivation so that geometry, fading and initialization use
/// independent generators for the same scenario seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

// Channel dump format: JSON object {"schema": "armec.channels/1", "N", "M",
// "K", "H": {"re": [...], "im": [...]}, "h": [{"re","im"}...], "g": [...]}
// with matrices stored row-major.
std::string channels_to_json(const ChannelSet& ch);
ChannelSet channels_from_json(const std::string& text);

}  // namespace armec
