#include "armec/conic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "cone_ops.hpp"

namespace armec::conic {

using detail::ConeDims;
using detail::NtScaling;

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Unbounded: return "unbounded";
    case SolveStatus::MaxIter: return "max_iter";
  }
  return "unknown";
}

void ConvexProgram::validate() const {
  auto fail = [](const std::string& msg) { throw std::invalid_argument("ConvexProgram: " + msg); };
  if (dim < 0 || cost.size() != dim) fail("cost length differs from dim");
  for (const auto& l : linear)
    if (l.a.size() != dim) fail("linear row length");
  for (const auto& b : boxes) {
    if (b.index < 0 || b.index >= dim) fail("box index out of range");
    if (b.lower > b.upper) fail("box lower > upper");
  }
  for (const auto& qc : quadratic) {
    if (qc.Q.rows() != dim || qc.Q.cols() != dim || qc.q.size() != dim) fail("quadratic size");
    const double scale = std::max(1.0, qc.Q.cwiseAbs().maxCoeff());
    if ((qc.Q - qc.Q.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) fail("Q not symmetric");
    const Eigen::SelfAdjointEigenSolver<RMatrix> es(qc.Q, Eigen::EigenvaluesOnly);
    if (dim > 0 && es.eigenvalues().minCoeff() < -1e-10 * scale) fail("Q not PSD");
  }
  for (const auto& rc : rotated) {
    if (rc.u.coeffs.size() != dim || rc.v.coeffs.size() != dim) fail("cone affine length");
    if (rc.W.cols() != dim || rc.W.rows() != rc.w0.size()) fail("cone W size");
  }
}

double ConvexProgram::max_violation(const RVector& x) const {
  double worst = 0.0;
  for (const auto& l : linear) worst = std::max(worst, l.a.dot(x) - l.b);
  for (const auto& b : boxes) {
    worst = std::max(worst, b.lower - x(b.index));
    worst = std::max(worst, x(b.index) - b.upper);
  }
  for (const auto& qc : quadratic) worst = std::max(worst, x.dot(qc.Q * x) + qc.q.dot(x) + qc.r);
  for (const auto& rc : rotated) {
    const double u = rc.u.evaluate(x);
    const double v = rc.v.evaluate(x);
    worst = std::max({worst, -u, -v, (rc.W * x + rc.w0).squaredNorm() - u * v});
  }
  return worst;
}

namespace {

// G x + s = h, s in (R_+^l x Q^{q_1} x ...)
struct ConeForm {
  RMatrix G;
  RVector h;
  ConeDims dims;
};

ConeForm to_cone_form(const ConvexProgram& prog) {
  const int n = prog.dim;
  std::vector<Eigen::RowVectorXd> lin_rows;
  std::vector<double> lin_rhs;
  auto add_row = [&](Eigen::RowVectorXd a, double b) {
    const double nrm = a.norm();
    if (nrm > 0.0) {
      a /= nrm;
      b /= nrm;
    }
    lin_rows.push_back(std::move(a));
    lin_rhs.push_back(b);
  };
  for (const auto& l : prog.linear) add_row(l.a.transpose(), l.b);
  for (const auto& b : prog.boxes) {
    if (std::isfinite(b.upper)) {
      Eigen::RowVectorXd a = Eigen::RowVectorXd::Zero(n);
      a(b.index) = 1.0;
      add_row(a, b.upper);
    }
    if (std::isfinite(b.lower)) {
      Eigen::RowVectorXd a = Eigen::RowVectorXd::Zero(n);
      a(b.index) = -1.0;
      add_row(a, -b.lower);
    }
  }

  struct Block {
    RMatrix G;
    RVector h;
  };
  std::vector<Block> blocks;
  for (const auto& qc : prog.quadratic) {
    const double scale =
        std::max({qc.Q.cwiseAbs().maxCoeff(), qc.q.cwiseAbs().maxCoeff(), std::abs(qc.r), 1e-300});
    const RMatrix Q = qc.Q / scale;
    const RVector q = qc.q / scale;
    const double r = qc.r / scale;
    const Eigen::SelfAdjointEigenSolver<RMatrix> es(0.5 * (Q + Q.transpose()));
    const RVector& ev = es.eigenvalues();
    const double top = ev.size() > 0 ? ev.maxCoeff() : 0.0;
    std::vector<int> keep;
    for (int i = 0; i < ev.size(); ++i)
      if (ev(i) > 1e-13 * std::max(top, 1.0)) keep.push_back(i);
    if (keep.empty()) {
      // purely affine: q' x <= -r
      add_row(q.transpose(), -r);
      continue;
    }
    const int rank = static_cast<int>(keep.size());
    RMatrix Lt(rank, n);  // Q = L L'
    for (int i = 0; i < rank; ++i)
      Lt.row(i) = std::sqrt(ev(keep[i])) * es.eigenvectors().col(keep[i]).transpose();
    // (1)(-q'x - r) >= ||L'x||^2  <=>  ||(2 L'x, 1 + q'x + r)|| <= 1 - q'x - r
    Block b;
    b.G.resize(rank + 2, n);
    b.h.resize(rank + 2);
    b.G.row(0) = q.transpose();
    b.h(0) = 1.0 - r;
    b.G.row(1) = -q.transpose();
    b.h(1) = 1.0 + r;
    b.G.bottomRows(rank) = -2.0 * Lt;
    b.h.tail(rank).setZero();
    blocks.push_back(std::move(b));
  }
  for (const auto& rc : prog.rotated) {
    const int r = static_cast<int>(rc.w0.size());
    Block b;
    b.G.resize(r + 2, n);
    b.h.resize(r + 2);
    b.G.row(0) = -(rc.u.coeffs + rc.v.coeffs).transpose();
    b.h(0) = rc.u.offset + rc.v.offset;
    b.G.row(1) = -(rc.u.coeffs - rc.v.coeffs).transpose();
    b.h(1) = rc.u.offset - rc.v.offset;
    b.G.bottomRows(r) = -2.0 * rc.W;
    b.h.tail(r) = 2.0 * rc.w0;
    const double scale = std::max({b.G.cwiseAbs().maxCoeff(), b.h.cwiseAbs().maxCoeff(), 1e-300});
    b.G /= scale;
    b.h /= scale;
    blocks.push_back(std::move(b));
  }

  ConeForm cf;
  cf.dims.nonneg = static_cast<int>(lin_rows.size());
  for (const auto& b : blocks) cf.dims.soc.push_back(static_cast<int>(b.h.size()));
  const int m = cf.dims.total();
  cf.G.resize(m, n);
  cf.h.resize(m);
  int row = 0;
  for (std::size_t i = 0; i < lin_rows.size(); ++i, ++row) {
    cf.G.row(row) = lin_rows[i];
    cf.h(row) = lin_rhs[i];
  }
  for (const auto& b : blocks) {
    cf.G.middleRows(row, b.h.size()) = b.G;
    cf.h.segment(row, b.h.size()) = b.h;
    row += static_cast<int>(b.h.size());
  }
  return cf;
}

// Solves  [0   G'  ] [dx]   [a]
//         [G  -W^2 ] [dz] = [b]
// via the normal equations (W^{-1}G)'(W^{-1}G) dx = a + (W^{-1}G)' W^{-1} b.
class KktSolver {
 public:
  KktSolver(const RMatrix& G, const NtScaling& W) : G_(G), W_(W) {
    Gs_ = W.apply_inverse_cols(G);
    RMatrix H = Gs_.transpose() * Gs_;
    const double reg = 1e-14 * std::max(1.0, H.diagonal().cwiseAbs().maxCoeff());
    H.diagonal().array() += reg;
    llt_.compute(H);
  }

  void solve(const RVector& a, const RVector& b, RVector& dx, RVector& dz) const {
    solve_once(a, b, dx, dz);
    for (int it = 0; it < 2; ++it) {
      const RVector ra = a - G_.transpose() * dz;
      const RVector rb = b - (G_ * dx - W_.apply(W_.apply(dz)));
      RVector cx, cz;
      solve_once(ra, rb, cx, cz);
      dx += cx;
      dz += cz;
    }
  }

 private:
  void solve_once(const RVector& a, const RVector& b, RVector& dx, RVector& dz) const {
    const RVector bs = W_.apply_inverse(b);
    dx = llt_.solve(a + Gs_.transpose() * bs);
    dz = W_.apply_inverse(Gs_ * dx - bs);
  }

  const RMatrix& G_;
  const NtScaling& W_;
  RMatrix Gs_;
  Eigen::LLT<RMatrix> llt_;
};

}  // namespace

SolveReport solve(const ConvexProgram& prog, const SolverSettings& settings) {
  prog.validate();
  const ConeForm cf = to_cone_form(prog);
  const RMatrix& G = cf.G;
  const RVector& h = cf.h;
  const RVector& c = prog.cost;
  const ConeDims& dims = cf.dims;
  const int n = prog.dim;
  const int m = dims.total();

  SolveReport rep;
  if (m == 0) {
    rep.x = RVector::Zero(n);
    rep.status = c.norm() == 0.0 ? SolveStatus::Optimal : SolveStatus::Unbounded;
    return rep;
  }

  const double hnorm = std::max(1.0, h.norm());
  const double cnorm = std::max(1.0, c.norm());
  const RVector e = detail::identity(dims);

  // Starting point: least-squares primal and least-norm dual, shifted into
  // the cone interior.
  RVector x, s, z;
  {
    RMatrix H0 = G.transpose() * G;
    H0.diagonal().array() += 1e-12 * std::max(1.0, H0.diagonal().maxCoeff());
    const Eigen::LDLT<RMatrix> ldlt(H0);
    x = ldlt.solve(G.transpose() * h);
    s = h - G * x;
    z = -G * ldlt.solve(c);
    const double as = detail::min_shift(dims, s);
    if (as >= -1e-8) s += (1.0 + std::max(as, 0.0)) * e;
    const double az = detail::min_shift(dims, z);
    if (az >= -1e-8) z += (1.0 + std::max(az, 0.0)) * e;
  }
  double tau = 1.0;
  double kappa = 1.0;
  const double degree = dims.degree();

  int stalls = 0;
  for (int iter = 0; iter <= settings.max_iter; ++iter) {
    const RVector rx = G.transpose() * z + c * tau;
    const RVector rz = s + G * x - h * tau;
    const double cx = c.dot(x);
    const double hz = h.dot(z);
    const double rt = kappa + cx + hz;
    const double sz = s.dot(z);
    const double mu = (sz + tau * kappa) / (degree + 1.0);

    rep.iterations = iter;
    rep.x = x / tau;
    rep.objective = cx / tau;
    rep.primal_residual = rz.norm() / tau / hnorm;
    rep.dual_residual = rx.norm() / tau / cnorm;
    rep.gap = std::abs(sz) / (tau * tau) / std::max(1.0, std::abs(rep.objective));
    if (rep.primal_residual <= settings.tol && rep.dual_residual <= settings.tol &&
        rep.gap <= settings.tol) {
      rep.status = SolveStatus::Optimal;
      return rep;
    }
    if (hz < 0.0) {
      const double pinf = (G.transpose() * z).norm() / (-hz) * hnorm;
      if (pinf <= settings.tol) {
        rep.status = SolveStatus::Infeasible;
        return rep;
      }
    }
    if (cx < 0.0) {
      const double dinf = (G * x + s).norm() / (-cx) * cnorm;
      if (dinf <= settings.tol) {
        rep.status = SolveStatus::Unbounded;
        return rep;
      }
    }
    if (iter == settings.max_iter || stalls >= 5) break;

    const NtScaling W(dims, s, z);
    const RVector& lambda = W.lambda();
    const KktSolver kkt(G, W);
    RVector x1, z1;
    kkt.solve(-c, h, x1, z1);
    const double denom_base = c.dot(x1) + h.dot(z1) - kappa / tau;

    struct Dir {
      RVector dx, dz, ds;
      double dtau = 0.0, dkappa = 0.0;
    };
    // Newton direction for complementarity targets (ds_t, dk_t) and residual
    // fraction `frac`.
    auto direction = [&](const RVector& ds_t, double dk_t, double frac) {
      Dir d;
      const RVector ltd = detail::jordan_divide(dims, lambda, ds_t);
      const RVector extra = W.apply(ltd);
      RVector x2, z2;
      kkt.solve(-frac * rx, -frac * rz - extra, x2, z2);
      d.dtau = (-frac * rt - dk_t / tau - c.dot(x2) - h.dot(z2)) / denom_base;
      d.dx = x2 + d.dtau * x1;
      d.dz = z2 + d.dtau * z1;
      d.ds = W.apply(ltd - W.apply(d.dz));
      d.dkappa = (dk_t - kappa * d.dtau) / tau;
      return d;
    };
    auto step_length = [&](const Dir& d, double cap) {
      double a = cap;
      a = std::min(a, detail::max_step(dims, s, d.ds, cap));
      a = std::min(a, detail::max_step(dims, z, d.dz, cap));
      if (d.dtau < 0.0) a = std::min(a, -tau / d.dtau);
      if (d.dkappa < 0.0) a = std::min(a, -kappa / d.dkappa);
      return a;
    };

    // predictor
    const RVector ll = detail::jordan_product(dims, lambda, lambda);
    const Dir aff = direction(-ll, -tau * kappa, 1.0);
    const double alpha_aff = step_length(aff, 1.0);
    const double sigma = std::pow(1.0 - alpha_aff, 3);

    // combined corrector
    const RVector corr =
        detail::jordan_product(dims, W.apply_inverse(aff.ds), W.apply(aff.dz));
    const RVector ds_t = -ll - corr + sigma * mu * e;
    const double dk_t = -tau * kappa - aff.dtau * aff.dkappa + sigma * mu;
    const Dir d = direction(ds_t, dk_t, 1.0 - sigma);
    const double alpha = std::min(1.0, 0.99 * step_length(d, 1e300));

    stalls = alpha < 1e-10 ? stalls + 1 : 0;
    x += alpha * d.dx;
    s += alpha * d.ds;
    z += alpha * d.dz;
    tau += alpha * d.dtau;
    kappa += alpha * d.dkappa;
    if (!x.allFinite() || !s.allFinite() || !z.allFinite() || !std::isfinite(tau)) break;
  }
  rep.status = SolveStatus::MaxIter;
  return rep;
}

RealQuadraticForm lift_complex_quadratic(const QuadraticForm& qf) {
  const int m = qf.dim();
  const double scale = std::max(1.0, qf.quad.cwiseAbs().maxCoeff());
  if ((qf.quad - qf.quad.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw std::invalid_argument("lift_complex_quadratic: matrix is not Hermitian");
  }
  RealQuadraticForm out;
  out.quad.resize(2 * m, 2 * m);
  const RMatrix re = qf.quad.real();
  const RMatrix im = qf.quad.imag();
  out.quad << re, -im, im, re;
  out.quad = 0.5 * (out.quad + out.quad.transpose());
  out.lin.resize(2 * m);
  out.lin << qf.lin.real(), qf.lin.imag();
  out.constant = qf.constant;
  return out;
}

RVector stack_real(const CVector& x) {
  RVector out(2 * x.size());
  out << x.real(), x.imag();
  return out;
}

CVector unstack_real(const RVector& x) {
  const auto m = x.size() / 2;
  CVector out(m);
  for (Eigen::Index i = 0; i < m; ++i) out(i) = {x(i), x(m + i)};
  return out;
}

std::string program_to_json(const ConvexProgram& prog) {
  using nlohmann::json;
  auto vec = [](const RVector& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
  auto mat = [&](const RMatrix& a) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < a.rows(); ++r) rows.push_back(vec(a.row(r).transpose()));
    return rows;
  };
  json j;
  j["schema"] = "armec.conic_program/1";
  j["dim"] = prog.dim;
  j["cost"] = vec(prog.cost);
  j["linear"] = json::array();
  for (const auto& l : prog.linear) j["linear"].push_back({{"a", vec(l.a)}, {"b", l.b}});
  j["boxes"] = json::array();
  for (const auto& b : prog.boxes) {
    auto bound = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
    j["boxes"].push_back({{"index", b.index}, {"lower", bound(b.lower)}, {"upper", bound(b.upper)}});
  }
  j["quadratic"] = json::array();
  for (const auto& q : prog.quadratic)
    j["quadratic"].push_back({{"Q", mat(q.Q)}, {"q", vec(q.q)}, {"r", q.r}});
  j["rotated_cones"] = json::array();
  for (const auto& rc : prog.rotated) {
    j["rotated_cones"].push_back({{"u", {{"coeffs", vec(rc.u.coeffs)}, {"offset", rc.u.offset}}},
                                  {"v", {{"coeffs", vec(rc.v.coeffs)}, {"offset", rc.v.offset}}},
                                  {"W", mat(rc.W)},
                                  {"w0", vec(rc.w0)}});
  }
  return j.dump();
}

}  // namespace armec::conic
