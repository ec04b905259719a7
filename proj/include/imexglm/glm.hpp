#pragma once

#include <span>
#include <string>
#include <vector>

#include "imexglm/matkit.hpp"

namespace imexglm {

/// A general linear method (c, A, U, B, V) with the coefficients q_0..q_p of
/// the external-vector expansion y^[n] = sum_k q_k h^k y^(k)(t_n).
struct GlmTableau {
  std::string name;
  RealVector c;                  // abscissae, length s
  RealMatrix A;                  // s x s
  RealMatrix U;                  // s x r
  RealMatrix B;                  // r x s
  RealMatrix V;                  // r x r
  std::vector<RealVector> qvecs; // q_0..q_p, each length r
  int p = 0;                     // order
  int q = 0;                     // stage order

  std::size_t s() const { return c.size(); }
  std::size_t r() const { return V.rows(); }

  /// Throws ValidationError when dimensions or (p, q) are inconsistent.
  void validate() const;
};

/// Elementwise power with c^0 = e.
RealVector elementwise_power(std::span<const double> c, int k);

/// c^k - k A c^{k-1} - k! U q_k  (length s); the k A c^{k-1} term is zero for k = 0.
RealVector stage_order_residual(const GlmTableau& tab, int k);

/// sum_l k!/l! q_{k-l} - k B c^{k-1} - k! V q_k  (length r).
RealVector order_residual(const GlmTableau& tab, int k);

struct OrderReport {
  std::vector<double> stage;  // max-norm residual per k = 0..q
  std::vector<double> order;  // max-norm residual per k = 0..p
  double worst() const;
};
OrderReport check_order_conditions(const GlmTableau& tab);

/// S(z) = V + z B (I - z A)^{-1} U.
ComplexMatrix glm_stability_matrix(const GlmTableau& tab, Complex z);

/// B = B0 - A B1 - V B2 + V A with the Lagrange-basis integrals of the
/// DIMSIM construction (r = s, distinct abscissae).
RealMatrix build_B(const RealMatrix& A, const RealMatrix& V, std::span<const double> c);

/// Monomial coefficients (ascending) of prod_{k != j} (x - c_k).
RealVector lagrange_numerator(std::span<const double> c, std::size_t j);

}  // namespace imexglm
