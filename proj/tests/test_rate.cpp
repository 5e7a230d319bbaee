#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "armec/rate.hpp"
#include "helpers.hpp"
#include "literal_model.hpp"

using namespace armec;
using armec::testing::draw_channels;
using armec::testing::draw_cvec;

namespace {

RVector draw_power(std::mt19937_64& rng, int K, double pmax) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  RVector p(K);
  for (int k = 0; k < K; ++k) p(k) = pmax * u(rng);
  return p;
}

CMatrix draw_receivers(std::mt19937_64& rng, int N, int K) {
  CMatrix F(N, K);
  for (int k = 0; k < K; ++k) F.col(k) = draw_cvec(rng, N);
  return F;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

constexpr double kB = 1e6;

}  // namespace

TEST_CASE("effective channel") {
  ChannelSet ch;
  ch.H = CMatrix::Constant(1, 1, 2.0);
  ch.h = {CVector::Constant(1, 3.0)};
  ch.g = {CVector::Constant(1, 1.0)};
  CVector theta = CVector::Constant(1, cplx(0, 1));
  CHECK(effective_channel(0, ch, theta)(0) == cplx(1, 6));
  CHECK(effective_channel(0, ch, CVector::Zero(1)) == ch.g[0]);

  std::mt19937_64 rng(1);
  const ChannelSet big = draw_channels(rng, 2, 5, 3);
  CVector one = CVector::Zero(5);
  one(2) = cplx(0.3, -0.7);
  const CVector expect = big.g[1] + one(2) * big.h[1](2) * big.H.col(2);
  CHECK((effective_channel(1, big, one) - expect).norm() < 1e-14);
}

TEST_CASE("sinr against the literal model") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const ChannelSet ch = draw_channels(rng, 2, 2, 2);
    const testing::LiteralModel lit{ch, draw_cvec(rng, 2), draw_power(rng, 2, 1.0), {0.3, 0.2}};
    const CMatrix F = draw_receivers(rng, 2, 2);
    for (int k = 0; k < 2; ++k) {
      const SinrRate sr = sinr_and_rate(k, F, lit.theta, lit.p, ch, lit.noise, kB);
      CHECK(rel(sr.sinr, lit.sinr(k, F.col(k))) < 1e-12);
      CHECK(rel(sr.rate, kB * std::log2(1.0 + lit.sinr(k, F.col(k)))) < 1e-12);
      CHECK(rel(mse(k, F, lit.theta, lit.p, ch, lit.noise), lit.mse(k, F.col(k))) < 1e-12);
    }
  }
}

TEST_CASE("sinr special cases") {
  std::mt19937_64 rng(3);
  const ChannelSet ch = draw_channels(rng, 1, 3, 1);
  const NoisePowers noise{0.1, 0.5};
  const RVector p = RVector::Constant(1, 0.7);
  CMatrix F = CMatrix::Constant(1, 1, cplx(0.4, 0.1));
  const SinrRate sr = sinr_and_rate(0, F, CVector::Zero(3), p, ch, noise, kB);
  CHECK(sr.sinr == doctest::Approx(0.7 * std::norm(ch.g[0](0)) / 0.5));

  const CVector theta = draw_cvec(rng, 3);
  CHECK(sinr_and_rate(0, F, theta, RVector::Zero(1), ch, noise, kB).rate == 0.0);
  const double g1 = sinr_and_rate(0, F, theta, p, ch, noise, kB).sinr;
  const double g2 = sinr_and_rate(0, F * cplx(-2.5, 4.0), theta, p, ch, noise, kB).sinr;
  CHECK(rel(g1, g2) < 1e-12);
  CHECK_THROWS_AS(sinr_and_rate(0, CMatrix::Zero(1, 1), theta, p, ch, noise, kB), std::invalid_argument);
  CHECK(mse(0, CMatrix::Zero(1, 1), theta, p, ch, noise) == 1.0);
}

TEST_CASE("mmse rate") {
  CHECK(mmse_rate(1.0, 1.0, kB) == doctest::Approx(0.0).epsilon(1e-12));
  for (double d : {0.01, 0.25, 0.7}) {
    CHECK(rel(mmse_rate(1.0 / d, d, kB), -kB * std::log2(d)) < 1e-12);
    // 1-D grid over v
    double best_v = 0.0;
    double best = -1e300;
    for (int i = 1; i <= 20000; ++i) {
      const double v = i * 1e-2;
      const double r = mmse_rate(v, d, kB);
      if (r > best) best = r, best_v = v;
    }
    CHECK(std::abs(best_v - 1.0 / d) <= 1e-2);
    CHECK(best <= mmse_rate(1.0 / d, d, kB) * (1 + 1e-12));
  }
  CHECK_THROWS_AS(mmse_rate(0.0, 0.5, kB), std::invalid_argument);
  CHECK_THROWS_AS(mmse_rate(-1.0, 0.5, kB), std::invalid_argument);
}

TEST_CASE("MMSE receiver identity and rate equivalence") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    const int K = 1 + trial % 3;
    const int M = 1 + trial % 5;
    const int N = 1 + trial % 4;
    const ChannelSet ch = draw_channels(rng, K, M, N);
    const CVector theta = draw_cvec(rng, M);
    const RVector p = draw_power(rng, K, 1.0);
    const NoisePowers noise{0.05, 0.1};
    const CMatrix F = mmse_receivers(theta, p, ch, noise);
    for (int k = 0; k < K; ++k) {
      const SinrRate sr = sinr_and_rate(k, F, theta, p, ch, noise, kB);
      const double d = mse(k, F, theta, p, ch, noise);
      CHECK(rel(d, 1.0 / (1.0 + sr.sinr)) < 1e-10);
      CHECK(rel(mmse_rate(1.0 / d, d, kB), sr.rate) < 1e-8);
      CHECK(rel(mmse_rate(2.0 / d, d, kB), sr.rate) > 1e-3);
      CHECK(mmse_rate(1.3 / d, d, kB) <= sr.rate);
    }
  }
}

TEST_CASE("MMSE receiver is locally optimal") {
  std::mt19937_64 rng(5);
  const ChannelSet ch = draw_channels(rng, 3, 4, 3);
  const CVector theta = draw_cvec(rng, 4);
  const RVector p = draw_power(rng, 3, 1.0);
  const NoisePowers noise{0.05, 0.1};
  CMatrix F = mmse_receivers(theta, p, ch, noise);
  for (int k = 0; k < 3; ++k) {
    const double d0 = mse(k, F, theta, p, ch, noise);
    for (int t = 0; t < 200; ++t) {
      CMatrix G = F;
      G.col(k) += 1e-3 * draw_cvec(rng, 3);
      CHECK(mse(k, G, theta, p, ch, noise) >= d0 - 1e-15);
    }
  }
}

TEST_CASE("scalar MMSE receiver") {
  ChannelSet ch;
  ch.H = CMatrix::Constant(1, 1, cplx(0.5, -1.0));
  ch.h = {CVector::Constant(1, cplx(1.5, 0.2))};
  ch.g = {CVector::Constant(1, cplx(-0.3, 0.4))};
  const CVector theta = CVector::Constant(1, cplx(0.8, 0.6));
  const RVector p = RVector::Constant(1, 0.6);
  const NoisePowers noise{0.2, 0.3};
  const cplx heff = ch.H(0, 0) * theta(0) * ch.h[0](0) + ch.g[0](0);
  const double ris = noise.ris_w * std::norm(ch.H(0, 0) * theta(0));
  const cplx f = std::sqrt(0.6) * heff / (0.6 * std::norm(heff) + ris + noise.ap_w);
  CHECK(std::abs(mmse_receivers(theta, p, ch, noise)(0, 0) - f) < 1e-14);
}

TEST_CASE("theta quadratics match literal evaluation") {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> uv(0.3, 3.0);
  int checked = 0;
  for (int inst = 0; inst < 10; ++inst) {
    const int K = 1 + inst % 3;
    const int M = 2 + inst % 4;
    const int N = 1 + inst % 3;
    const ChannelSet ch = draw_channels(rng, K, M, N);
    const RVector p = draw_power(rng, K, 1.0);
    const NoisePowers noise{0.07, 0.1};
    const CMatrix F = draw_receivers(rng, N, K);
    RVector v(K);
    for (int k = 0; k < K; ++k) v(k) = uv(rng);
    const ThetaQuadratics q = build_theta_quadratics(F, p, ch, v, noise, kB);
    for (int k = 0; k < K; ++k) {
      const CMatrix& B = q.mse[k].quad;
      CHECK((B - B.adjoint()).norm() <= 1e-12 * std::max(1.0, B.norm()));
      CHECK(Eigen::SelfAdjointEigenSolver<CMatrix>(B).eigenvalues().minCoeff() >= -1e-10);
    }
    for (int t = 0; t < 10; ++t, ++checked) {
      const CVector theta = draw_cvec(rng, M);
      const testing::LiteralModel lit{ch, theta, p, noise};
      for (int k = 0; k < K; ++k) {
        const double d = lit.mse(k, F.col(k));
        CHECK(rel(q.mse[k].evaluate(theta), d) < 1e-9);
        CHECK(rel(q.rate(k, theta), mmse_rate(v(k), d, kB)) < 1e-9);
      }
      CHECK(rel(q.power.evaluate(theta), lit.power()) < 1e-12);
    }
    // theta = 0 leaves the direct link only
    const testing::LiteralModel direct{ch, CVector::Zero(M), p, noise};
    for (int k = 0; k < K; ++k) CHECK(rel(q.mse[k].constant, direct.mse(k, F.col(k))) < 1e-12);
  }
  CHECK(checked == 100);
}

TEST_CASE("power quadratics match literal evaluation") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> uv(0.3, 3.0);
  int checked = 0;
  for (int inst = 0; inst < 10; ++inst) {
    const int K = 1 + inst % 4;
    const int M = 1 + inst % 5;
    const int N = 1 + inst % 3;
    const ChannelSet ch = draw_channels(rng, K, M, N);
    const CVector theta = draw_cvec(rng, M);
    const NoisePowers noise{0.07, 0.1};
    const CMatrix F = draw_receivers(rng, N, K);
    RVector v(K);
    for (int k = 0; k < K; ++k) v(k) = uv(rng);
    const PowerQuadratics q = build_power_quadratics(F, theta, ch, v, noise, kB);
    const double pmax = 1e-3;
    for (int t = 0; t < 10; ++t, ++checked) {
      const RVector p = draw_power(rng, K, pmax);
      const RVector sq = p.cwiseSqrt();
      const testing::LiteralModel lit{ch, theta, p, noise};
      for (int k = 0; k < K; ++k) {
        const double d = lit.mse(k, F.col(k));
        CHECK(rel(q.mse[k].evaluate(sq), d) < 1e-9);
        CHECK(rel(q.rate(k, sq), mmse_rate(v(k), d, kB)) < 1e-9);
      }
      CHECK(rel(q.power.evaluate(sq), lit.power()) < 1e-12);
    }
    const testing::LiteralModel silent{ch, theta, RVector::Zero(K), noise};
    for (int k = 0; k < K; ++k) {
      const double m0 = silent.mse(k, F.col(k));
      CHECK(rel(q.rate(k, RVector::Zero(K)), kB * (std::log2(v(k)) - v(k) * m0 / std::numbers::ln2 +
                                                  1.0 / std::numbers::ln2)) < 1e-12);
    }
  }
  CHECK(checked == 100);
}

TEST_CASE("surrogate rate lower-bounds the rate") {
  std::mt19937_64 rng(8);
  const ChannelSet ch = draw_channels(rng, 2, 3, 2);
  const RVector p = draw_power(rng, 2, 1.0);
  const NoisePowers noise{0.05, 0.1};
  const CVector theta0 = draw_cvec(rng, 3);
  const CMatrix F = mmse_receivers(theta0, p, ch, noise);
  RVector v(2);
  for (int k = 0; k < 2; ++k) v(k) = 1.0 / mse(k, F, theta0, p, ch, noise);
  const ThetaQuadratics q = build_theta_quadratics(F, p, ch, v, noise, kB);
  for (int t = 0; t < 100; ++t) {
    const CVector theta = draw_cvec(rng, 3);
    const RVector r = user_rates(mmse_receivers(theta, p, ch, noise), theta, p, ch, noise, kB);
    for (int k = 0; k < 2; ++k) CHECK(q.rate(k, theta) <= r(k) * (1 + 1e-12));
  }
  for (int k = 0; k < 2; ++k)
    CHECK(rel(q.rate(k, theta0), user_rates(F, theta0, p, ch, noise, kB)(k)) < 1e-8);
}
