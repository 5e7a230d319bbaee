#pragma once

#include <limits>
#include <string>
#include <vector>

#include "armec/rate.hpp"
#include "armec/types.hpp"

namespace armec::conic {

/// coeffs' x + offset
struct AffineExpr {
  RVector coeffs;
  double offset = 0.0;

  double evaluate(const RVector& x) const { return coeffs.dot(x) + offset; }
};

/// a' x <= b
struct LinearInequality {
  RVector a;
  double b = 0.0;
};

/// lower <= x[index] <= upper; infinite bounds are ignored.
struct BoxConstraint {
  int index = 0;
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();
};

/// x' Q x + q' x + r <= 0 with Q symmetric PSD.
struct QuadraticConstraint {
  RMatrix Q;
  RVector q;
  double r = 0.0;
};

/// u(x) * v(x) >= ||W x + w0||^2 with u(x), v(x) >= 0.
struct RotatedConeConstraint {
  AffineExpr u;
  AffineExpr v;
  RMatrix W;
  RVector w0;
};

/// minimize cost' x subject to the listed constraints.
struct ConvexProgram {
  int dim = 0;
  RVector cost;
  std::vector<LinearInequality> linear;
  std::vector<BoxConstraint> boxes;
  std::vector<QuadraticConstraint> quadratic;
  std::vector<RotatedConeConstraint> rotated;

  explicit ConvexProgram(int n = 0) : dim(n), cost(RVector::Zero(n)) {}

  /// Throws std::invalid_argument on inconsistent dimensions, asymmetric or
  /// indefinite Q (min eigenvalue below -1e-10 relative).
  void validate() const;

  /// Largest constraint violation at x (absolute, in the units of each
  /// constraint as written). Independent of the solver internals.
  double max_violation(const RVector& x) const;
};

enum class SolveStatus { Optimal, Infeasible, Unbounded, MaxIter };

const char* to_string(SolveStatus s);

struct SolveReport {
  SolveStatus status = SolveStatus::MaxIter;
  RVector x;
  double objective = 0.0;
  /// Relative KKT residuals of the internal cone form:
  /// ||G x + s - h|| / max(1, ||h||), ||G' z + c|| / max(1, ||c||) and
  /// |s' z| / max(1, |c' x|).
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double gap = 0.0;
  int iterations = 0;

  double kkt_residual() const { return std::max({primal_residual, dual_residual, gap}); }
};

struct SolverSettings {
  double tol = 1e-8;
  int max_iter = 120;
};

/// Primal-dual interior point method on a homogeneous self-dual embedding;
/// infeasibility is reported from the embedding's certificate.
SolveReport solve(const ConvexProgram& prog, const SolverSettings& settings = {});

/// Real lifting of a complex Hermitian quadratic form over C^M onto R^{2M}
/// acting on [Re x; Im x]. Throws std::invalid_argument if quad is not
/// Hermitian within 1e-12 (relative).
RealQuadraticForm lift_complex_quadratic(const QuadraticForm& qf);

/// [Re x; Im x] and back.
RVector stack_real(const CVector& x);
CVector unstack_real(const RVector& x);

/// Debug dump of a program, for offline cross-checking.
std::string program_to_json(const ConvexProgram& prog);

}  // namespace armec::conic
