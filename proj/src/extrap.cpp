#include "imexglm/extrap.hpp"

#include <cmath>
#include <string>

namespace imexglm {

RealMatrix beta_from_entries(std::size_t s, std::span<const double> entries) {
  if (entries.size() != s * (s - 1) / 2)
    throw ValidationError("beta: expected " + std::to_string(s * (s - 1) / 2) + " entries, got " +
                          std::to_string(entries.size()));
  RealMatrix b(s, s);
  std::size_t k = 0;
  for (std::size_t i = 1; i < s; ++i)
    for (std::size_t j = 0; j < i; ++j) b(i, j) = entries[k++];
  return b;
}

RealVector beta_entries(const RealMatrix& beta) {
  RealVector out;
  for (std::size_t i = 1; i < beta.rows(); ++i)
    for (std::size_t j = 0; j < i; ++j) out.push_back(beta(i, j));
  return out;
}

RealMatrix solve_alpha(const RealMatrix& beta, std::span<const double> c, int p) {
  const std::size_t s = c.size();
  if (beta.rows() != s || beta.cols() != s) throw ValidationError("solve_alpha: beta must be s x s");
  if (p < 1 || static_cast<std::size_t>(p) > s) throw ValidationError("solve_alpha: need 1 <= p <= s");
  for (std::size_t i = 0; i < s; ++i)
    for (std::size_t j = i; j < s; ++j)
      if (beta(i, j) != 0.0) throw ValidationError("solve_alpha: beta must be strictly lower triangular");

  const std::size_t np = static_cast<std::size_t>(p);
  RealMatrix vm(np, s);
  for (std::size_t l = 0; l < np; ++l)
    for (std::size_t k = 0; k < s; ++k) vm(l, k) = std::pow(c[k] - 1.0, static_cast<int>(l));

  // p = s: square system. p < s: x = vm^T (vm vm^T)^{-1} rhs.
  const bool square = np == s;
  LuFactor<double> lu(square ? vm : vm * vm.transpose());
  if (lu.singular()) throw SingularMatrixError("solve_alpha: shifted abscissae give a singular Vandermonde system");

  RealMatrix alpha(s, s);
  RealVector rhs(np);
  for (std::size_t j = 0; j < s; ++j) {
    for (std::size_t l = 0; l < np; ++l) {
      const int e = static_cast<int>(l);
      double v = std::pow(c[j], e);
      for (std::size_t k = 0; k < j; ++k) v -= beta(j, k) * std::pow(c[k], e);
      rhs[l] = v;
    }
    RealVector x = lu.solve(rhs);
    if (!square) x = vm.transpose() * x;
    for (std::size_t k = 0; k < s; ++k) alpha(j, k) = x[k];
  }
  return alpha;
}

double interpolation_residual(const ExtrapCoeffs& coeffs, std::span<const double> c) {
  const std::size_t s = c.size();
  double worst = 0.0;
  for (int l = 0; l < coeffs.order; ++l) {
    RealVector shifted(s);
    for (std::size_t k = 0; k < s; ++k) shifted[k] = std::pow(c[k] - 1.0, l);
    const RealVector cl = elementwise_power(c, l);
    const RealVector a = coeffs.alpha * shifted;
    const RealVector b = coeffs.beta * cl;
    for (std::size_t j = 0; j < s; ++j) worst = std::max(worst, std::abs(a[j] + b[j] - cl[j]));
  }
  return worst;
}

ExtrapCoeffs make_extrap(const RealMatrix& beta, std::span<const double> c, int p) {
  return ExtrapCoeffs{solve_alpha(beta, c, p), beta, p};
}

ImexScheme assemble_imex(const GlmTableau& tab, const ExtrapCoeffs& coeffs) {
  tab.validate();
  const std::size_t s = tab.s();
  if (coeffs.alpha.rows() != s || coeffs.alpha.cols() != s || coeffs.beta.rows() != s || coeffs.beta.cols() != s)
    throw ValidationError("assemble_imex: extrapolation matrices must be s x s");
  for (std::size_t i = 0; i < s; ++i)
    for (std::size_t j = i; j < s; ++j)
      if (coeffs.beta(i, j) != 0.0) throw ValidationError("assemble_imex: beta must be strictly lower triangular");
  const double res = interpolation_residual(coeffs, tab.c);
  if (!(res <= 1e-9)) throw ValidationError("assemble_imex: interpolation conditions violated");

  ImexScheme sc;
  sc.base = tab;
  sc.coeffs = coeffs;
  sc.abar = tab.A * coeffs.alpha;
  sc.astar = tab.A * coeffs.beta;
  sc.bbar = tab.B * coeffs.alpha;
  sc.bstar = tab.B * coeffs.beta;
  return sc;
}

ImexScheme make_scheme(MethodFamily family, std::optional<double> parameter, std::span<const double> beta) {
  const Method m = make_method(family, parameter);
  const RealMatrix b = beta_from_entries(m.tableau.s(), beta);
  return assemble_imex(m.tableau, make_extrap(b, m.tableau.c, m.tableau.p));
}

GlmTableau explicit_two_step_glm(const ImexScheme& sc) {
  const GlmTableau& b = sc.base;
  const std::size_t s = b.s(), r = b.r();
  GlmTableau t;
  t.name = b.name + "-explicit";
  t.c.resize(2 * s);
  for (std::size_t i = 0; i < s; ++i) {
    t.c[i] = b.c[i] - 1.0;
    t.c[s + i] = b.c[i];
  }
  t.A = RealMatrix(2 * s, 2 * s);
  t.U = RealMatrix(2 * s, s + r);
  t.B = RealMatrix(s + r, 2 * s);
  t.V = RealMatrix(s + r, s + r);
  for (std::size_t i = 0; i < s; ++i) {
    t.U(i, i) = 1.0;
    for (std::size_t j = 0; j < s; ++j) {
      t.A(s + i, j) = sc.abar(i, j);
      t.A(s + i, s + j) = sc.astar(i, j);
      t.B(i, j) = sc.abar(i, j);
      t.B(i, s + j) = sc.astar(i, j);
    }
    for (std::size_t j = 0; j < r; ++j) {
      t.U(s + i, s + j) = b.U(i, j);
      t.V(i, s + j) = b.U(i, j);
    }
  }
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < s; ++j) {
      t.B(s + i, j) = sc.bbar(i, j);
      t.B(s + i, s + j) = sc.bstar(i, j);
    }
    for (std::size_t j = 0; j < r; ++j) t.V(s + i, s + j) = b.V(i, j);
  }
  t.p = b.p;
  t.q = b.q;
  double kf = 1.0;
  for (int k = 0; k <= b.p; ++k) {
    if (k > 0) kf *= k;
    RealVector qk(s + r);
    for (std::size_t i = 0; i < s; ++i) qk[i] = (k == 0 ? 1.0 : std::pow(b.c[i] - 1.0, k)) / kf;
    for (std::size_t i = 0; i < r; ++i) qk[s + i] = b.qvecs[static_cast<std::size_t>(k)][i];
    t.qvecs.push_back(std::move(qk));
  }
  return t;
}

}  // namespace imexglm
