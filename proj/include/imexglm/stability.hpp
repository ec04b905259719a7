#pragma once

#include "imexglm/extrap.hpp"

namespace imexglm {

/// M(z0, z1) for the test equation y' = lambda0 y + lambda1 y with
/// z0 = h lambda0 (explicit part) and z1 = h lambda1 (implicit part).
/// Size (s + r) x (s + r). Throws SingularMatrixError if I - (z0 A* + z1 A) is singular.
ComplexMatrix imex_stability_matrix(const ImexScheme& scheme, Complex z0, Complex z1);

/// det(wI - M(z0, z1)), monic of degree s + r.
Polynomial imex_stability_poly(const ImexScheme& scheme, Complex z0, Complex z1);

struct StabilityCheck {
  bool stable = false;   // all roots strictly inside the unit circle
  double modulus = 0.0;  // largest root modulus (+inf when singular)
  bool singular = false; // the stage resolvent could not be formed
};
StabilityCheck is_stable(const ImexScheme& scheme, Complex z0, Complex z1);

/// Spectral radius of the z1 -> -infinity limit of M(z0, z1). The limit is
/// block lower triangular with a zero leading block, so it does not depend
/// on z0 and reduces to rho(V - B A^{-1} U).
double stiff_limit_modulus(const ImexScheme& scheme);

/// z1 = -|y| / tan(alpha) + i y, a point on the boundary of the sector of half-angle alpha.
Complex sector_z1(double alpha, double y);

/// Reusable evaluator of max |w_i(z0, z1)|; keeps all workspace and the
/// previous roots (used as the next starting guess). Not thread-safe: use
/// one instance per worker.
class StabilityEvaluator {
 public:
  explicit StabilityEvaluator(const ImexScheme& scheme);

  /// Largest root modulus, +inf if the stage resolvent is singular.
  double max_modulus(Complex z0, Complex z1);
  std::size_t dimension() const { return n_; }

 private:
  std::size_t s_, r_, n_;
  ComplexVector a_, astar_, abar_, u_, b_, bstar_, bbar_, v_;
  ComplexVector lhs_, rhs_, g_, m_, work_, coeffs_, roots_;
  bool have_roots_ = false;
};

}  // namespace imexglm
