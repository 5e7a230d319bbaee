#pragma once

// Internal cone algebra for the interior point solver: Jordan products,
// Nesterov-Todd scalings and step lengths over a product of one nonnegative
// orthant and several second-order cones. Not part of the installed API.

#include <vector>

#include "armec/types.hpp"

namespace armec::conic::detail {

struct ConeDims {
  int nonneg = 0;
  std::vector<int> soc;  ///< sizes (>= 2 each; first entry is the "t" part)

  int total() const {
    int m = nonneg;
    for (int q : soc) m += q;
    return m;
  }
  /// Barrier degree: one per orthant coordinate and one per cone.
  int degree() const { return nonneg + static_cast<int>(soc.size()); }
};

/// Identity element e of the cone.
RVector identity(const ConeDims& dims);

/// u o v
RVector jordan_product(const ConeDims& dims, const RVector& u, const RVector& v);

/// x solving lambda o x = d, lambda in the interior.
RVector jordan_divide(const ConeDims& dims, const RVector& lambda, const RVector& d);

/// Smallest alpha with x + alpha e in the cone, i.e. minus the smallest
/// spectral value of x.
double min_shift(const ConeDims& dims, const RVector& x);

/// Largest alpha (capped at `cap`) keeping x + alpha dx in the cone; x must be
/// interior.
double max_step(const ConeDims& dims, const RVector& x, const RVector& dx, double cap);

/// Nesterov-Todd scaling W with W z = W^{-1} s = lambda.
class NtScaling {
 public:
  NtScaling(const ConeDims& dims, const RVector& s, const RVector& z);

  RVector apply(const RVector& x) const;          // W x
  RVector apply_inverse(const RVector& x) const;  // W^{-1} x
  /// W^{-1} applied to every column of G.
  RMatrix apply_inverse_cols(const RMatrix& G) const;

  const RVector& lambda() const { return lambda_; }

 private:
  ConeDims dims_;
  RVector diag_;                 // orthant: sqrt(s / z)
  std::vector<double> eta_;      // per cone
  std::vector<RVector> w_;       // per cone, w' J w = 1
  RVector lambda_;
};

}  // namespace armec::conic::detail
