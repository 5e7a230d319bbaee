#include "armec/channel.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace armec {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 over (seed, stream)
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

Geometry make_geometry(const Point3& ap, const Point3& ris, std::vector<Point3> users) {
  Geometry g;
  g.ap = ap;
  g.ris = ris;
  g.users = std::move(users);
  g.ris_ap_distance = distance(ris, ap);
  for (const auto& u : g.users) {
    g.user_ris_distance.push_back(distance(u, ris));
    g.user_ap_distance.push_back(distance(u, ap));
  }
  return g;
}

Geometry build_geometry(const ScenarioConfig& cfg, std::uint64_t seed) {
  const auto& gs = cfg.geometry;
  std::vector<Point3> users = gs.user_positions;
  if (users.empty()) {
    std::mt19937_64 rng(derive_seed(seed, 1));
    std::uniform_real_distribution<double> offset(-0.5 * gs.user_area_side, 0.5 * gs.user_area_side);
    for (int k = 0; k < cfg.num_users(); ++k) {
      const double dx = offset(rng);
      const double dy = offset(rng);
      users.push_back({gs.user_center_x + dx, gs.user_center_y + dy, gs.user_height});
    }
  }
  return make_geometry(gs.ap, gs.ris, std::move(users));
}

double path_loss_db(double distance_m, double exponent) {
  if (!(distance_m > 0.0)) throw std::invalid_argument("path loss needs a positive distance");
  return -10.0 * exponent * std::log10(distance_m) - 30.0;
}

double path_loss_linear(double distance_m, double exponent) {
  return db_to_linear(path_loss_db(distance_m, exponent));
}

namespace {

class ComplexGaussian {
 public:
  explicit ComplexGaussian(std::uint64_t seed) : rng_(seed) {}
  // CN(0, 1): real and imaginary parts each N(0, 1/2)
  cplx operator()() {
    const double re = normal_(rng_);
    const double im = normal_(rng_);
    return {re * kScale, im * kScale};
  }

 private:
  static constexpr double kScale = 0.70710678118654752440;
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace

ChannelSet synthesize_channels(const Geometry& geom, const ScenarioConfig& cfg, std::uint64_t seed) {
  const int n = cfg.num_antennas;
  const int m = cfg.num_elements;
  const int num_users = static_cast<int>(geom.users.size());
  if (num_users != cfg.num_users()) {
    throw ConfigError(ConfigErrorCode::DimensionMismatch, "geometry and config disagree on K");
  }
  ComplexGaussian draw(derive_seed(seed, 2));
  const auto& ov = cfg.gain_override;
  ChannelSet ch;

  const double gain_ra = ov.ris_ap.value_or(path_loss_linear(geom.ris_ap_distance, cfg.path_loss.ris_ap));
  ch.H.resize(n, m);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < m; ++c) ch.H(r, c) = std::sqrt(gain_ra) * draw();

  for (int k = 0; k < num_users; ++k) {
    const double gain_ur =
        ov.user_ris.value_or(path_loss_linear(geom.user_ris_distance[k], cfg.path_loss.user_ris));
    const double gain_ua =
        ov.user_ap.value_or(path_loss_linear(geom.user_ap_distance[k], cfg.path_loss.user_ap));
    CVector h(m);
    for (int i = 0; i < m; ++i) h(i) = std::sqrt(gain_ur) * draw();
    CVector g(n);
    for (int i = 0; i < n; ++i) g(i) = std::sqrt(gain_ua) * draw();
    ch.h.push_back(std::move(h));
    ch.g.push_back(std::move(g));
  }
  return ch;
}

// ---------------------------------------------------------------------------

namespace {

using nlohmann::json;

json encode(const CMatrix& a) {
  json re = json::array();
  json im = json::array();
  for (Eigen::Index r = 0; r < a.rows(); ++r)
    for (Eigen::Index c = 0; c < a.cols(); ++c) {
      re.push_back(a(r, c).real());
      im.push_back(a(r, c).imag());
    }
  return {{"re", re}, {"im", im}};
}

CMatrix decode(const json& j, Eigen::Index rows, Eigen::Index cols) {
  const auto& re = j.at("re");
  const auto& im = j.at("im");
  if (static_cast<Eigen::Index>(re.size()) != rows * cols ||
      static_cast<Eigen::Index>(im.size()) != rows * cols) {
    throw ConfigError(ConfigErrorCode::DimensionMismatch, "channel dump has wrong entry count");
  }
  CMatrix a(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) {
      const auto idx = static_cast<std::size_t>(r * cols + c);
      a(r, c) = {re[idx].get<double>(), im[idx].get<double>()};
    }
  return a;
}

}  // namespace

std::string channels_to_json(const ChannelSet& ch) {
  json j;
  j["schema"] = "armec.channels/1";
  j["N"] = ch.num_antennas();
  j["M"] = ch.num_elements();
  j["K"] = ch.num_users();
  j["H"] = encode(ch.H);
  j["h"] = json::array();
  j["g"] = json::array();
  for (int k = 0; k < ch.num_users(); ++k) {
    j["h"].push_back(encode(ch.h[k]));
    j["g"].push_back(encode(ch.g[k]));
  }
  return j.dump();
}

ChannelSet channels_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    const int n = j.at("N").get<int>();
    const int m = j.at("M").get<int>();
    const int num_users = j.at("K").get<int>();
    ChannelSet ch;
    ch.H = decode(j.at("H"), n, m);
    if (static_cast<int>(j.at("h").size()) != num_users ||
        static_cast<int>(j.at("g").size()) != num_users) {
      throw ConfigError(ConfigErrorCode::DimensionMismatch, "channel dump has wrong user count");
    }
    for (int k = 0; k < num_users; ++k) {
      ch.h.push_back(decode(j.at("h")[k], m, 1));
      ch.g.push_back(decode(j.at("g")[k], n, 1));
    }
    return ch;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(ConfigErrorCode::Malformed, std::string("channel JSON: ") + e.what());
  }
}

}  // namespace armec
