#include "cone_ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace armec::conic::detail {

namespace {

// (t - ||x||)(t + ||x||) without cancellation when t ~ ||x||.
double jdet(double t, double xnorm) { return (t - xnorm) * (t + xnorm); }

}  // namespace

RVector identity(const ConeDims& dims) {
  RVector e = RVector::Zero(dims.total());
  e.head(dims.nonneg).setOnes();
  int off = dims.nonneg;
  for (int q : dims.soc) {
    e(off) = 1.0;
    off += q;
  }
  return e;
}

RVector jordan_product(const ConeDims& dims, const RVector& u, const RVector& v) {
  RVector out(u.size());
  out.head(dims.nonneg) = u.head(dims.nonneg).cwiseProduct(v.head(dims.nonneg));
  int off = dims.nonneg;
  for (int q : dims.soc) {
    const auto us = u.segment(off, q);
    const auto vs = v.segment(off, q);
    out(off) = us.dot(vs);
    out.segment(off + 1, q - 1) = us(0) * vs.tail(q - 1) + vs(0) * us.tail(q - 1);
    off += q;
  }
  return out;
}

RVector jordan_divide(const ConeDims& dims, const RVector& lambda, const RVector& d) {
  RVector out(d.size());
  out.head(dims.nonneg) = d.head(dims.nonneg).cwiseQuotient(lambda.head(dims.nonneg));
  int off = dims.nonneg;
  for (int q : dims.soc) {
    const auto l = lambda.segment(off, q);
    const auto ds = d.segment(off, q);
    const double l0 = l(0);
    const auto l1 = l.tail(q - 1);
    const double rho = jdet(l0, l1.norm());
    const double x0 = (l0 * ds(0) - l1.dot(ds.tail(q - 1))) / rho;
    out(off) = x0;
    out.segment(off + 1, q - 1) = (ds.tail(q - 1) - x0 * l1) / l0;
    off += q;
  }
  return out;
}

double min_shift(const ConeDims& dims, const RVector& x) {
  double shift = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < dims.nonneg; ++i) shift = std::max(shift, -x(i));
  int off = dims.nonneg;
  for (int q : dims.soc) {
    const double smallest = x(off) - x.segment(off + 1, q - 1).norm();
    shift = std::max(shift, -smallest);
    off += q;
  }
  return shift;
}

double max_step(const ConeDims& dims, const RVector& x, const RVector& dx, double cap) {
  double alpha = cap;
  for (int i = 0; i < dims.nonneg; ++i) {
    if (dx(i) < 0.0) alpha = std::min(alpha, -x(i) / dx(i));
  }
  int off = dims.nonneg;
  for (int q : dims.soc) {
    const auto xs = x.segment(off, q);
    const auto ds = dx.segment(off, q);
    // f(a) = (x0 + a d0)^2 - ||x1 + a d1||^2 = A a^2 + 2 B a + C, C > 0
    const double A = jdet(ds(0), ds.tail(q - 1).norm());
    const double B = xs(0) * ds(0) - xs.tail(q - 1).dot(ds.tail(q - 1));
    const double C = jdet(xs(0), xs.tail(q - 1).norm());
    const double scale = std::max({std::abs(A), std::abs(B), 1e-300});
    double root = std::numeric_limits<double>::infinity();
    if (std::abs(A) <= 1e-14 * scale) {
      if (B < 0.0) root = -C / (2.0 * B);
    } else {
      const double disc = B * B - A * C;
      if (A < 0.0) {
        root = (B + std::sqrt(std::max(disc, 0.0))) / (-A);
      } else if (B < 0.0 && disc >= 0.0) {
        root = C / (-B + std::sqrt(disc));
      }
    }
    // the t-component must stay nonnegative along the step as well
    if (ds(0) < 0.0) root = std::min(root, -xs(0) / ds(0));
    alpha = std::min(alpha, root);
    off += q;
  }
  return std::max(alpha, 0.0);
}

NtScaling::NtScaling(const ConeDims& dims, const RVector& s, const RVector& z) : dims_(dims) {
  const int nn = dims.nonneg;
  diag_ = (s.head(nn).cwiseQuotient(z.head(nn))).cwiseSqrt();
  int off = nn;
  for (int q : dims.soc) {
    const auto ss = s.segment(off, q);
    const auto zs = z.segment(off, q);
    const double sres = jdet(ss(0), ss.tail(q - 1).norm());
    const double zres = jdet(zs(0), zs.tail(q - 1).norm());
    const RVector sbar = ss / std::sqrt(sres);
    const RVector zbar = zs / std::sqrt(zres);
    const double gamma = std::sqrt(0.5 * (1.0 + sbar.dot(zbar)));
    RVector w(q);
    w(0) = (sbar(0) + zbar(0)) / (2.0 * gamma);
    w.tail(q - 1) = (sbar.tail(q - 1) - zbar.tail(q - 1)) / (2.0 * gamma);
    eta_.push_back(std::pow(sres / zres, 0.25));
    w_.push_back(std::move(w));
    off += q;
  }
  lambda_ = apply(z);
}

RVector NtScaling::apply(const RVector& x) const {
  RVector out(x.size());
  const int nn = dims_.nonneg;
  out.head(nn) = diag_.cwiseProduct(x.head(nn));
  int off = nn;
  for (std::size_t c = 0; c < dims_.soc.size(); ++c) {
    const int q = dims_.soc[c];
    const RVector& w = w_[c];
    const auto xs = x.segment(off, q);
    const double w1x1 = w.tail(q - 1).dot(xs.tail(q - 1));
    out(off) = eta_[c] * (w(0) * xs(0) + w1x1);
    out.segment(off + 1, q - 1) =
        eta_[c] * (xs.tail(q - 1) + (w1x1 / (1.0 + w(0)) + xs(0)) * w.tail(q - 1));
    off += q;
  }
  return out;
}

RVector NtScaling::apply_inverse(const RVector& x) const {
  RVector out(x.size());
  const int nn = dims_.nonneg;
  out.head(nn) = x.head(nn).cwiseQuotient(diag_);
  int off = nn;
  for (std::size_t c = 0; c < dims_.soc.size(); ++c) {
    const int q = dims_.soc[c];
    const RVector& w = w_[c];
    const auto xs = x.segment(off, q);
    const double w1x1 = w.tail(q - 1).dot(xs.tail(q - 1));
    out(off) = (w(0) * xs(0) - w1x1) / eta_[c];
    out.segment(off + 1, q - 1) =
        (xs.tail(q - 1) + (w1x1 / (1.0 + w(0)) - xs(0)) * w.tail(q - 1)) / eta_[c];
    off += q;
  }
  return out;
}

RMatrix NtScaling::apply_inverse_cols(const RMatrix& G) const {
  RMatrix out(G.rows(), G.cols());
  const int nn = dims_.nonneg;
  out.topRows(nn) = diag_.cwiseInverse().asDiagonal() * G.topRows(nn);
  int off = nn;
  for (std::size_t c = 0; c < dims_.soc.size(); ++c) {
    const int q = dims_.soc[c];
    const RVector& w = w_[c];
    const auto block = G.middleRows(off, q);
    // rows: t-row and the vector rows
    const Eigen::RowVectorXd w1g = w.tail(q - 1).transpose() * block.bottomRows(q - 1);
    const Eigen::RowVectorXd g0 = block.row(0);
    out.row(off) = (w(0) * g0 - w1g) / eta_[c];
    const Eigen::RowVectorXd coef = w1g / (1.0 + w(0)) - g0;
    out.middleRows(off + 1, q - 1) =
        (block.bottomRows(q - 1) + w.tail(q - 1) * coef) / eta_[c];
    off += q;
  }
  return out;
}

}  // namespace armec::conic::detail
