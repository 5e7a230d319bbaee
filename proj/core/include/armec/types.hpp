#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace armec {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

// Unit conversions. Everything inside the library is SI: watts, bit/s, bits,
// cycles/s, seconds.
inline double dbm_to_watt(double dbm) { return std::pow(10.0, dbm / 10.0) * 1e-3; }
inline double watt_to_dbm(double watt) { return 10.0 * std::log10(watt * 1e3); }
inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

enum class ConfigErrorCode { NonPositiveBudget, DimensionMismatch, NonPositiveParameter, Malformed };

class ConfigError : public std::invalid_argument {
 public:
  ConfigError(ConfigErrorCode code, const std::string& what)
      : std::invalid_argument(what), code_(code) {}
  ConfigErrorCode code() const noexcept { return code_; }

 private:
  ConfigErrorCode code_;
};

struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

double distance(const Point3& a, const Point3& b);

/// Computing resources of one user.
struct UserProfile {
  double task_bits = 0.0;       ///< L_k, integer-valued
  double local_cpu_hz = 0.0;    ///< f_L,k
  double cycles_per_bit = 0.0;  ///< c_k
};

struct ComputeProfile {
  std::vector<UserProfile> users;
  double edge_cpu_total_hz = 0.0;  ///< f_E^tot, shared by all users

  int num_users() const { return static_cast<int>(users.size()); }
};

struct PathLossExponents {
  double user_ris = 2.2;
  double ris_ap = 2.2;
  double user_ap = 2.8;
};

/// Optional linear-gain overrides per link; used for controlled experiments
/// (for instance switching a link off with a zero gain).
struct PathGainOverrides {
  std::optional<double> user_ris;
  std::optional<double> ris_ap;
  std::optional<double> user_ap;
};

/// Node placement. Users are dropped uniformly in an axis-aligned square
/// unless explicit positions are given.
struct GeometrySettings {
  Point3 ap{0.0, 0.0, 30.0};
  Point3 ris{260.0, 0.0, 10.0};
  double user_center_x = 280.0;
  double user_center_y = 10.0;
  double user_area_side = 10.0;
  double user_height = 1.5;
  std::vector<Point3> user_positions;  ///< empty: random drop
};

struct AlgorithmSettings {
  double outer_tol = 1e-4;  ///< zeta, relative MCL change
  int outer_max_iter = 100;
  double sca_tol = 1e-6;  ///< relative objective change of the edge-CPU SCA
  int sca_max_iter = 50;
  double solver_tol = 1e-8;  ///< KKT tolerance of the embedded conic solver
  int solver_max_iter = 120;
};

struct ScenarioConfig {
  int num_antennas = 4;   ///< N
  int num_elements = 16;  ///< M
  double bandwidth_hz = 1e6;
  double ris_noise_w = dbm_to_watt(-70.0);  ///< sigma^2
  double ap_noise_w = dbm_to_watt(-80.0);   ///< delta^2
  double max_user_power_w = 1e-3;
  double total_power_w = 10e-3;
  double amp_efficiency = 0.8;  ///< xi
  double dc_bias_w = dbm_to_watt(-5.0);
  double circuit_power_w = dbm_to_watt(-10.0);
  /// Replaces xi*(P_tot - M*(P_DC + P_c)) when set.
  std::optional<double> amp_budget_override_w;
  PathLossExponents path_loss;
  PathGainOverrides gain_override;
  GeometrySettings geometry;
  ComputeProfile compute;
  std::uint64_t rng_seed = 1;
  AlgorithmSettings algorithm;

  // Filled by validate_config.
  double amp_budget_w = 0.0;

  int num_users() const { return compute.num_users(); }
};

/// Default scenario: three users, N=4, M=16, P_tot=10 mW.
ScenarioConfig default_config();

/// Active: amplifying surface with thermal noise and a power budget on the
/// amplified signal. Passive: unit-modulus reflection, no amplifier noise and
/// no amplification budget.
enum class SurfaceMode { Active, Passive };

/// Checks every parameter and fills the derived amplification budget. For a
/// passive surface the budget is infinite and the element count is instead
/// capped by P_tot - M*P_c >= 0. Throws ConfigError.
ScenarioConfig validate_config(ScenarioConfig cfg, SurfaceMode mode = SurfaceMode::Active);

/// xi*(P_tot - M*(P_DC + P_c)), without validation.
double active_amp_budget(const ScenarioConfig& cfg);

/// Power left for a passive surface of the same size: P_tot - M*P_c.
double passive_power_budget(const ScenarioConfig& cfg);

std::string config_to_json(const ScenarioConfig& cfg);
ScenarioConfig config_from_json(const std::string& text);
ScenarioConfig load_config(const std::string& path);

/// Baseband channels. H is N x M (RIS to AP), h[k] has M entries (user k to
/// RIS), g[k] has N entries (user k to AP).
struct ChannelSet {
  CMatrix H;
  std::vector<CVector> h;
  std::vector<CVector> g;

  int num_antennas() const { return static_cast<int>(H.rows()); }
  int num_elements() const { return static_cast<int>(H.cols()); }
  int num_users() const { return static_cast<int>(h.size()); }
};

/// Throws ConfigError(DimensionMismatch) or std::invalid_argument for
/// non-finite entries.
void check_channels(const ChannelSet& ch, const ScenarioConfig& cfg);

/// Decision variables of the latency minimization plus MMSE auxiliaries.
struct SolutionState {
  CMatrix F;       ///< N x K receive beamformers
  CVector theta;   ///< M reflection coefficients
  RVector power;   ///< K transmit powers (W), not square-rooted
  std::vector<std::int64_t> offload_bits;  ///< integer l_k
  RVector relaxed_offload;                 ///< continuous l_k used inside BCD
  RVector edge_cpu;                        ///< f_E,k
  RVector aux_v;                           ///< MMSE weights v_k
};

/// Result of re-checking every constraint on a state.
struct FeasibilityReport {
  bool ok = true;
  double max_violation = 0.0;  ///< relative, worst constraint
  std::vector<std::string> violations;
};

/// Sum_k p_k ||Theta h_k||^2 + ||Theta||_F^2 sigma^2.
double ris_amplification_power(const CVector& theta, const RVector& power, const ChannelSet& ch,
                               double ris_noise_w);

/// Re-checks power boxes, offload range, edge CPU positivity and sum, and the
/// amplification power budget. Relative tolerance.
FeasibilityReport check_feasibility(const SolutionState& s, const ScenarioConfig& cfg,
                                    const ChannelSet& ch, double tol = 1e-8,
                                    std::optional<double> amp_budget_w = std::nullopt);

}  // namespace armec
