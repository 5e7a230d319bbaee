#pragma once

#include <limits>
#include <vector>

#include "armec/conic.hpp"

namespace armec::testing {

using namespace armec::conic;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline RVector unit(int n, int i, double v = 1.0) {
  RVector a = RVector::Zero(n);
  a(i) = v;
  return a;
}

inline LinearInequality row(std::initializer_list<double> a, double b) {
  RVector v(static_cast<Eigen::Index>(a.size()));
  int i = 0;
  for (double x : a) v(i++) = x;
  return {v, b};
}

inline QuadraticConstraint ball(int n, const RVector& center, double radius) {
  // ||x - c||^2 <= r^2
  return {RMatrix::Identity(n, n), -2.0 * center, center.squaredNorm() - radius * radius};
}

/// Ten small programs with empty feasible sets.
inline std::vector<ConvexProgram> infeasible_programs() {
  std::vector<ConvexProgram> cases;
  {
    ConvexProgram p(1);  // x >= 1 and x <= 0
    p.boxes = {{0, 1.0, 0.0 + 1.0}};
    p.linear = {row({1}, 0.0)};
    cases.push_back(p);
  }
  {
    ConvexProgram p(2);  // x + y <= -1, x, y >= 0
    p.cost << 1, 1;
    p.linear = {row({1, 1}, -1)};
    p.boxes = {{0, 0.0}, {1, 0.0}};
    cases.push_back(p);
  }
  {
    ConvexProgram p(2);  // two disjoint disks
    RVector c1(2), c2(2);
    c1 << 0, 0;
    c2 << 3, 0;
    p.quadratic = {ball(2, c1, 1.0), ball(2, c2, 1.0)};
    cases.push_back(p);
  }
  {
    ConvexProgram p(2);  // disk and far half-space
    p.cost << 0, 1;
    p.quadratic = {ball(2, RVector::Zero(2), 1.0)};
    p.linear = {row({-1, 0}, -2)};
    cases.push_back(p);
  }
  {
    ConvexProgram p(2);  // u v >= 1 with u + v <= 1
    RotatedConeConstraint rc;
    rc.u.coeffs = unit(2, 0);
    rc.v.coeffs = unit(2, 1);
    rc.W = RMatrix::Zero(1, 2);
    rc.w0 = RVector::Ones(1);
    p.rotated = {rc};
    p.linear = {row({1, 1}, 1)};
    cases.push_back(p);
  }
  {
    ConvexProgram p(3);  // box contradictions across coordinates
    p.boxes = {{0, 0.0, 1.0}, {1, 0.0, 1.0}, {2, 0.0, 1.0}};
    p.linear = {row({-1, -1, -1}, -4)};
    cases.push_back(p);
  }
  {
    ConvexProgram p(1);  // x^2 + 1 <= 0
    p.quadratic = {{RMatrix::Identity(1, 1), RVector::Zero(1), 1.0}};
    cases.push_back(p);
  }
  {
    ConvexProgram p(2);  // ||x|| <= 1 and x1 >= 0.8 and x2 >= 0.8
    p.cost << 1, -1;
    p.quadratic = {ball(2, RVector::Zero(2), 1.0)};
    p.boxes = {{0, 0.8}, {1, 0.8}};
    cases.push_back(p);
  }
  {
    ConvexProgram p(2);  // u * 1 >= x^2 + 4, u <= 3
    RotatedConeConstraint rc;
    rc.u.coeffs = unit(2, 0);
    rc.v.coeffs = RVector::Zero(2);
    rc.v.offset = 1.0;
    rc.W = RMatrix::Zero(2, 2);
    rc.W(0, 1) = 1.0;
    rc.w0 = RVector::Zero(2);
    rc.w0(1) = 2.0;
    p.rotated = {rc};
    p.boxes = {{0, -kInf, 3.0}};
    cases.push_back(p);
  }
  {
    ConvexProgram p(4);  // equality chain x1 = x2 = x3 = x4 with x1 >= 1, x4 <= 0
    p.linear = {row({1, -1, 0, 0}, 0), row({-1, 1, 0, 0}, 0), row({0, 1, -1, 0}, 0),
                row({0, -1, 1, 0}, 0), row({0, 0, 1, -1}, 0), row({0, 0, -1, 1}, 0)};
    p.boxes = {{0, 1.0}, {3, -kInf, 0.0}};
    cases.push_back(p);
  }
  return cases;
}

}  // namespace armec::testing
