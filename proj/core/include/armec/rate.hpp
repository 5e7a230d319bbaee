#pragma once

#include <vector>

#include "armec/types.hpp"

namespace armec {

struct NoisePowers {
  double ris_w = 0.0;  ///< sigma^2, thermal noise injected by the surface
  double ap_w = 0.0;   ///< delta^2
};

/// x^H quad x + 2 Re{lin^H x} + constant over a complex vector.
struct QuadraticForm {
  CMatrix quad;
  CVector lin;
  double constant = 0.0;

  double evaluate(const CVector& x) const;
  int dim() const { return static_cast<int>(quad.rows()); }
};

/// x^T quad x + 2 lin^T x + constant over a real vector.
struct RealQuadraticForm {
  RMatrix quad;
  RVector lin;
  double constant = 0.0;

  double evaluate(const RVector& x) const;
  int dim() const { return static_cast<int>(quad.rows()); }
};

/// Quadratic forms of the reflection-coefficient subproblem. The MSE of user k
/// is mse[k](theta); the MMSE-reformulated rate is -rate_loss[k](theta), whose
/// quad/lin/constant are (B/ln2) v_k B_k, (B/ln2) v_k w_k and minus the rate
/// offset, so that every stored matrix is Hermitian PSD.
struct ThetaQuadratics {
  CMatrix A;  ///< sum_i p_i h_i h_i^H
  std::vector<QuadraticForm> mse;
  std::vector<QuadraticForm> rate_loss;
  QuadraticForm power;  ///< theta^H (I o A^T + sigma^2 I) theta

  double rate(int k, const CVector& theta) const { return -rate_loss[k].evaluate(theta); }
};

/// Same for the power subproblem over q = [sqrt(p_1), ..., sqrt(p_K)].
/// mse[k].quad is sum_i t_i |f_k^H e_i|^2 t_i^T, mse[k].lin is -Re(j_k).
struct PowerQuadratics {
  std::vector<RealQuadraticForm> mse;
  std::vector<CVector> selection_products;  ///< j_k = t_k f_k^H e_k
  std::vector<RealQuadraticForm> rate_loss;
  RealQuadraticForm power;  ///< q^T diag(||Theta h_k||^2) q + ||Theta||^2 sigma^2

  double rate(int k, const RVector& q) const { return -rate_loss[k].evaluate(q); }
};

/// H diag(theta) h_k + g_k.
CVector effective_channel(int k, const ChannelSet& ch, const CVector& theta);

struct SinrRate {
  double sinr = 0.0;
  double rate = 0.0;  ///< bit/s
};

/// Post-combining SINR and Shannon rate of user k. Throws std::invalid_argument
/// when f_k is zero.
SinrRate sinr_and_rate(int k, const CMatrix& F, const CVector& theta, const RVector& power,
                       const ChannelSet& ch, const NoisePowers& noise, double bandwidth_hz);

/// Rates of all users.
RVector user_rates(const CMatrix& F, const CVector& theta, const RVector& power,
                   const ChannelSet& ch, const NoisePowers& noise, double bandwidth_hz);

/// Mean-square error of user k's recovered symbol.
double mse(int k, const CMatrix& F, const CVector& theta, const RVector& power, const ChannelSet& ch,
           const NoisePowers& noise);

/// B (log2 v - v d / ln 2 + 1 / ln 2). Throws std::invalid_argument for v <= 0.
double mmse_rate(double v, double d, double bandwidth_hz);

/// Linear MMSE receiver of user k, scaled by sqrt(p_k).
CVector mmse_receiver(int k, const CVector& theta, const RVector& power, const ChannelSet& ch,
                      const NoisePowers& noise);
CMatrix mmse_receivers(const CVector& theta, const RVector& power, const ChannelSet& ch,
                       const NoisePowers& noise);

ThetaQuadratics build_theta_quadratics(const CMatrix& F, const RVector& power, const ChannelSet& ch,
                                       const RVector& v, const NoisePowers& noise,
                                       double bandwidth_hz);

PowerQuadratics build_power_quadratics(const CMatrix& F, const CVector& theta, const ChannelSet& ch,
                                       const RVector& v, const NoisePowers& noise,
                                       double bandwidth_hz);

}  // namespace armec
