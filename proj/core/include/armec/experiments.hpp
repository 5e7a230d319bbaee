#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "armec/bcd.hpp"
#include "armec/types.hpp"

namespace armec {

/// Snaps every phase to the nearest of `levels` equally spaced values starting
/// at 0; ties go to the smaller phase. Amplitudes are kept. Throws
/// std::invalid_argument for levels < 2.
CVector quantize_phases(const CVector& theta, int levels = 4);

/// Uniformly shrinks theta so that its amplification power fits the budget.
/// No-op when it already fits.
CVector fit_amplification_budget(const CVector& theta, const RVector& power, const ChannelSet& ch,
                                 double ris_noise_w, double budget_w);

enum class Variant { Active, Active2Bit, Passive };

const char* to_string(Variant v);
Variant variant_from_string(const std::string& name);

/// Quantizes the reflection phases of a converged active design to 2 bits and
/// re-optimizes receivers, offloading and edge CPU with theta and p held.
BcdResult two_bit_variant(const ScenarioConfig& cfg, const ChannelSet& ch, const SolutionState& continuous);

/// One full design for the given variant; geometry, fading and the
/// initialization all derive from `seed`.
struct RunRecord {
  Variant variant = Variant::Active;
  int num_elements = 0;
  double total_power_w = 0.0;
  double ris_x_m = 0.0;
  std::uint64_t seed = 0;
  BcdResult result;
};

std::vector<RunRecord> run_variants(const ScenarioConfig& cfg, std::uint64_t seed,
                                    const std::vector<Variant>& variants, bool fixed_power);

struct ExperimentOptions {
  std::vector<std::uint64_t> seeds;
  std::vector<Variant> variants{Variant::Active, Variant::Active2Bit, Variant::Passive};
  bool fixed_power = false;
  unsigned workers = 0;  ///< 0: hardware concurrency
};

/// Traces for every (M, seed) with the amplification budget pinned to
/// `amp_budget_w`. Rows are ordered by M, then seed.
struct ConvergenceRun {
  int num_elements = 0;
  std::uint64_t seed = 0;
  BcdResult result;
};
std::vector<ConvergenceRun> run_convergence(const ScenarioConfig& cfg, const std::vector<int>& m_list,
                                            const ExperimentOptions& opt, double amp_budget_w = 10e-3);

/// Final designs over the (P_tot, M) grid. Points where a variant's power
/// model leaves no budget (active: xi(P_tot - M(P_DC + P_c)) <= 0; passive:
/// M P_c > P_tot) are skipped for that variant.
std::vector<RunRecord> sweep_elements(const ScenarioConfig& cfg, const std::vector<int>& m_list,
                                      const std::vector<double>& total_power_list,
                                      const ExperimentOptions& opt);

/// Final designs for each RIS x-coordinate.
std::vector<RunRecord> sweep_location(const ScenarioConfig& cfg, const std::vector<double>& x_list,
                                      const ExperimentOptions& opt);

std::string convergence_csv(const std::vector<ConvergenceRun>& runs, int num_users);
std::string sweep_elements_csv(const std::vector<RunRecord>& runs, int num_users);
std::string sweep_location_csv(const std::vector<RunRecord>& runs, int num_users);
std::string solve_csv(const std::vector<RunRecord>& runs, int num_users);

}  // namespace armec
