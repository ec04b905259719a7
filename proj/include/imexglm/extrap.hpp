#pragma once

#include <optional>
#include <span>

#include "imexglm/catalogue.hpp"
#include "imexglm/glm.hpp"

namespace imexglm {

/// Extrapolation weights: f(Y_j^{[n+1]}) is predicted by
/// sum_k alpha_jk f(Y_k^{[n]}) + sum_{k<j} beta_jk f(Y_k^{[n+1]}).
struct ExtrapCoeffs {
  RealMatrix alpha;  // s x s
  RealMatrix beta;   // s x s, strictly lower triangular
  int order = 0;
};

/// Strictly lower triangular s x s matrix from its entries listed row by row
/// (beta_21, beta_31, beta_32, beta_41, ...). Expects s(s-1)/2 values.
RealMatrix beta_from_entries(std::size_t s, std::span<const double> entries);
/// Inverse of beta_from_entries.
RealVector beta_entries(const RealMatrix& beta);

/// Solves sum_k alpha_jk (c_k - 1)^l = c_j^l - sum_{k<j} beta_jk c_k^l for
/// l = 0..p-1, row by row. Unique for p = s; for p < s the minimum-norm
/// solution of the underdetermined system is returned.
RealMatrix solve_alpha(const RealMatrix& beta, std::span<const double> c, int p);

/// alpha (c-e)^l + beta c^l - c^l in max norm, over l = 0..p-1.
double interpolation_residual(const ExtrapCoeffs& coeffs, std::span<const double> c);

ExtrapCoeffs make_extrap(const RealMatrix& beta, std::span<const double> c, int p);

/// IMEX GLM assembled from a base implicit GLM and extrapolation weights.
struct ImexScheme {
  GlmTableau base;
  ExtrapCoeffs coeffs;
  RealMatrix abar;   // A alpha
  RealMatrix astar;  // A beta
  RealMatrix bbar;   // B alpha
  RealMatrix bstar;  // B beta

  std::size_t s() const { return base.s(); }
  std::size_t r() const { return base.r(); }
};

/// Throws ValidationError if dimensions disagree or the interpolation
/// conditions are violated by more than 1e-9.
ImexScheme assemble_imex(const GlmTableau& tab, const ExtrapCoeffs& coeffs);

/// Convenience: catalogued method plus beta entries (row by row).
ImexScheme make_scheme(MethodFamily family, std::optional<double> parameter, std::span<const double> beta);

/// The explicit part written as one GLM over two steps: 2s stages
/// (abscissae c - e and c), s + r external quantities.
GlmTableau explicit_two_step_glm(const ImexScheme& scheme);

}  // namespace imexglm
