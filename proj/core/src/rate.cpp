#include "armec/rate.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace armec {

namespace {

constexpr double kLn2 = std::numbers::ln2;

std::vector<CVector> effective_channels(const ChannelSet& ch, const CVector& theta) {
  std::vector<CVector> e;
  e.reserve(ch.num_users());
  for (int i = 0; i < ch.num_users(); ++i) e.push_back(effective_channel(i, ch, theta));
  return e;
}

}  // namespace

double QuadraticForm::evaluate(const CVector& x) const {
  const cplx q = x.dot(quad * x);  // dot() conjugates the first argument
  return q.real() + 2.0 * lin.dot(x).real() + constant;
}

double RealQuadraticForm::evaluate(const RVector& x) const {
  return x.dot(quad * x) + 2.0 * lin.dot(x) + constant;
}

CVector effective_channel(int k, const ChannelSet& ch, const CVector& theta) {
  return ch.H * theta.cwiseProduct(ch.h[k]) + ch.g[k];
}

SinrRate sinr_and_rate(int k, const CMatrix& F, const CVector& theta, const RVector& power,
                       const ChannelSet& ch, const NoisePowers& noise, double bandwidth_hz) {
  const CVector f = F.col(k);
  if (f.squaredNorm() == 0.0) throw std::invalid_argument("receive beamformer f_k is zero");
  double signal = 0.0;
  double interference = 0.0;
  for (int i = 0; i < ch.num_users(); ++i) {
    const double gain = std::norm(f.dot(effective_channel(i, ch, theta)));
    if (i == k) {
      signal = power(i) * gain;
    } else {
      interference += power(i) * gain;
    }
  }
  // ||f^H H Theta||^2 = sum_m |(H^H f)_m theta_m|^2
  const double ris_noise = noise.ris_w * (ch.H.adjoint() * f).cwiseProduct(theta).squaredNorm();
  const double ap_noise = noise.ap_w * f.squaredNorm();
  SinrRate out;
  out.sinr = signal / (interference + ris_noise + ap_noise);
  out.rate = bandwidth_hz * std::log2(1.0 + out.sinr);
  return out;
}

RVector user_rates(const CMatrix& F, const CVector& theta, const RVector& power,
                   const ChannelSet& ch, const NoisePowers& noise, double bandwidth_hz) {
  RVector r(ch.num_users());
  for (int k = 0; k < ch.num_users(); ++k)
    r(k) = sinr_and_rate(k, F, theta, power, ch, noise, bandwidth_hz).rate;
  return r;
}

double mse(int k, const CMatrix& F, const CVector& theta, const RVector& power, const ChannelSet& ch,
           const NoisePowers& noise) {
  const CVector f = F.col(k);
  double d = 1.0;
  for (int i = 0; i < ch.num_users(); ++i) {
    const cplx proj = f.dot(effective_channel(i, ch, theta));
    d += power(i) * std::norm(proj);
    if (i == k) d -= 2.0 * std::sqrt(power(k)) * proj.real();
  }
  d += noise.ris_w * (ch.H.adjoint() * f).cwiseProduct(theta).squaredNorm();
  d += noise.ap_w * f.squaredNorm();
  return d;
}

double mmse_rate(double v, double d, double bandwidth_hz) {
  if (!(v > 0.0)) throw std::invalid_argument("MMSE weight v_k must be positive");
  return bandwidth_hz * (std::log2(v) - v * d / kLn2 + 1.0 / kLn2);
}

CMatrix mmse_receivers(const CVector& theta, const RVector& power, const ChannelSet& ch,
                       const NoisePowers& noise) {
  const int n = ch.num_antennas();
  const auto e = effective_channels(ch, theta);
  const CMatrix reflect = ch.H * theta.asDiagonal();
  CMatrix cov = noise.ap_w * CMatrix::Identity(n, n) + noise.ris_w * reflect * reflect.adjoint();
  for (int i = 0; i < ch.num_users(); ++i) cov.noalias() += power(i) * e[i] * e[i].adjoint();
  const Eigen::LLT<CMatrix> llt(cov);
  CMatrix F(n, ch.num_users());
  for (int k = 0; k < ch.num_users(); ++k) F.col(k) = std::sqrt(power(k)) * llt.solve(e[k]);
  return F;
}

CVector mmse_receiver(int k, const CVector& theta, const RVector& power, const ChannelSet& ch,
                      const NoisePowers& noise) {
  return mmse_receivers(theta, power, ch, noise).col(k);
}

ThetaQuadratics build_theta_quadratics(const CMatrix& F, const RVector& power, const ChannelSet& ch,
                                       const RVector& v, const NoisePowers& noise,
                                       double bandwidth_hz) {
  const int m = ch.num_elements();
  const int num_users = ch.num_users();
  ThetaQuadratics out;
  out.A = CMatrix::Zero(m, m);
  for (int i = 0; i < num_users; ++i) out.A.noalias() += power(i) * ch.h[i] * ch.h[i].adjoint();
  const CMatrix a_plus_noise = out.A + noise.ris_w * CMatrix::Identity(m, m);

  for (int k = 0; k < num_users; ++k) {
    const CVector f = F.col(k);
    const CVector u = ch.H.adjoint() * f;  // f^H H = u^H
    QuadraticForm d;
    // B_k = (H^H f f^H H) o (A + sigma^2 I)^T
    d.quad = (u * u.adjoint()).cwiseProduct(a_plus_noise.transpose());
    d.lin = CVector::Zero(m);
    double constant = 1.0 + noise.ap_w * f.squaredNorm();
    for (int i = 0; i < num_users; ++i) {
      const cplx fg = f.dot(ch.g[i]);
      // f^H H Theta h_i = sum_m conj(u_m) h_{i,m} theta_m
      d.lin += power(i) * fg * u.cwiseProduct(ch.h[i].conjugate());
      constant += power(i) * std::norm(fg);
    }
    d.lin -= std::sqrt(power(k)) * u.cwiseProduct(ch.h[k].conjugate());
    constant -= 2.0 * std::sqrt(power(k)) * f.dot(ch.g[k]).real();
    d.constant = constant;

    const double scale = v(k) * bandwidth_hz / kLn2;
    QuadraticForm loss;
    loss.quad = scale * d.quad;
    loss.lin = scale * d.lin;
    loss.constant = scale * d.constant - bandwidth_hz * (std::log2(v(k)) + 1.0 / kLn2);
    out.mse.push_back(std::move(d));
    out.rate_loss.push_back(std::move(loss));
  }

  out.power.quad = CMatrix::Zero(m, m);
  out.power.quad.diagonal() = a_plus_noise.diagonal().real().cast<cplx>();
  out.power.lin = CVector::Zero(m);
  out.power.constant = 0.0;
  return out;
}

PowerQuadratics build_power_quadratics(const CMatrix& F, const CVector& theta, const ChannelSet& ch,
                                       const RVector& v, const NoisePowers& noise,
                                       double bandwidth_hz) {
  const int num_users = ch.num_users();
  const auto e = effective_channels(ch, theta);
  PowerQuadratics out;
  for (int k = 0; k < num_users; ++k) {
    const CVector f = F.col(k);
    RealQuadraticForm d;
    d.quad = RMatrix::Zero(num_users, num_users);
    for (int i = 0; i < num_users; ++i) d.quad(i, i) = std::norm(f.dot(e[i]));
    CVector j = CVector::Zero(num_users);
    j(k) = f.dot(e[k]);
    d.lin = -j.real();
    d.constant = noise.ris_w * (ch.H.adjoint() * f).cwiseProduct(theta).squaredNorm() +
                 noise.ap_w * f.squaredNorm() + 1.0;

    const double scale = v(k) * bandwidth_hz / kLn2;
    RealQuadraticForm loss;
    loss.quad = scale * d.quad;
    loss.lin = scale * d.lin;
    loss.constant = scale * d.constant - bandwidth_hz * (std::log2(v(k)) + 1.0 / kLn2);
    out.mse.push_back(std::move(d));
    out.selection_products.push_back(std::move(j));
    out.rate_loss.push_back(std::move(loss));
  }
  out.power.quad = RMatrix::Zero(num_users, num_users);
  for (int k = 0; k < num_users; ++k) out.power.quad(k, k) = theta.cwiseProduct(ch.h[k]).squaredNorm();
  out.power.lin = RVector::Zero(num_users);
  out.power.constant = theta.squaredNorm() * noise.ris_w;
  return out;
}

}  // namespace armec
