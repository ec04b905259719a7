#include "imexglm/stability.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace imexglm {

namespace {

ComplexVector flat(const RealMatrix& m) {
  ComplexVector out(m.data().size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = m.data()[k];
  return out;
}

double max_root_modulus(const ComplexMatrix& m) {
  const Polynomial p = char_poly(m);
  if (p.degree() < 1) return 0.0;
  double worst = 0.0;
  for (const Complex& w : poly_roots(p)) worst = std::max(worst, std::abs(w));
  return worst;
}

}  // namespace

ComplexMatrix imex_stability_matrix(const ImexScheme& sc, Complex z0, Complex z1) {
  const std::size_t s = sc.s(), r = sc.r();
  ComplexMatrix lhs = ComplexMatrix::identity(s) - z0 * to_complex(sc.astar) - z1 * to_complex(sc.base.A);
  LuFactor<Complex> lu(std::move(lhs));
  if (lu.singular()) throw SingularMatrixError("imex_stability_matrix: I - (z0 A* + z1 A) is singular");
  const ComplexMatrix x1 = lu.solve(to_complex(sc.abar));
  const ComplexMatrix x2 = lu.solve(to_complex(sc.base.U));
  const ComplexMatrix g = z0 * to_complex(sc.bstar) + z1 * to_complex(sc.base.B);
  const ComplexMatrix m11 = z0 * x1;
  const ComplexMatrix m21 = z0 * (to_complex(sc.bbar) + g * x1);
  const ComplexMatrix m22 = to_complex(sc.base.V) + g * x2;

  ComplexMatrix m(s + r, s + r);
  for (std::size_t i = 0; i < s; ++i) {
    for (std::size_t j = 0; j < s; ++j) m(i, j) = m11(i, j);
    for (std::size_t j = 0; j < r; ++j) m(i, s + j) = x2(i, j);
  }
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < s; ++j) m(s + i, j) = m21(i, j);
    for (std::size_t j = 0; j < r; ++j) m(s + i, s + j) = m22(i, j);
  }
  return m;
}

Polynomial imex_stability_poly(const ImexScheme& sc, Complex z0, Complex z1) {
  return char_poly(imex_stability_matrix(sc, z0, z1));
}

StabilityCheck is_stable(const ImexScheme& sc, Complex z0, Complex z1) {
  StabilityCheck out;
  try {
    out.modulus = max_root_modulus(imex_stability_matrix(sc, z0, z1));
  } catch (const SingularMatrixError&) {
    out.singular = true;
    out.modulus = std::numeric_limits<double>::infinity();
    return out;
  }
  out.stable = out.modulus < 1.0;
  return out;
}

double stiff_limit_modulus(const ImexScheme& sc) {
  LuFactor<double> lu(sc.base.A);
  if (lu.singular()) return std::numeric_limits<double>::infinity();
  const RealMatrix lim = sc.base.V - sc.base.B * lu.solve(sc.base.U);
  return max_root_modulus(to_complex(lim));
}

Complex sector_z1(double alpha, double y) {
  if (!(alpha > 0.0 && alpha <= std::numbers::pi / 2 + 1e-15))
    throw ValidationError("sector_z1: alpha must lie in (0, pi/2]");
  const double t = std::tan(alpha);
  const double re = std::isfinite(t) && t < 1e15 ? -std::abs(y) / t : 0.0;
  return {re, y};
}

StabilityEvaluator::StabilityEvaluator(const ImexScheme& sc)
    : s_(sc.s()), r_(sc.r()), n_(sc.s() + sc.r()) {
  if (n_ > kMaxCharPolyDimension) throw ValidationError("StabilityEvaluator: s + r exceeds 16");
  a_ = flat(sc.base.A);
  astar_ = flat(sc.astar);
  abar_ = flat(sc.abar);
  u_ = flat(sc.base.U);
  b_ = flat(sc.base.B);
  bstar_ = flat(sc.bstar);
  bbar_ = flat(sc.bbar);
  v_ = flat(sc.base.V);
  lhs_.resize(s_ * s_);
  rhs_.resize(s_ * n_);
  g_.resize(r_ * s_);
  m_.resize(n_ * n_);
  work_.resize(2 * n_ * n_);
  coeffs_.resize(n_ + 1);
  roots_.resize(n_);
}

double StabilityEvaluator::max_modulus(Complex z0, Complex z1) {
  const std::size_t s = s_, r = r_, n = n_;
  // [X1 | X2] = (I - z0 A* - z1 A)^{-1} [Abar | U] by Gaussian elimination.
  double scale = 0.0;
  for (std::size_t i = 0; i < s; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < s; ++j) {
      Complex v = -z0 * astar_[i * s + j] - z1 * a_[i * s + j];
      if (i == j) v += 1.0;
      lhs_[i * s + j] = v;
      row += std::abs(v);
    }
    scale = std::max(scale, row);
    for (std::size_t j = 0; j < s; ++j) rhs_[i * n + j] = abar_[i * s + j];
    for (std::size_t j = 0; j < r; ++j) rhs_[i * n + s + j] = u_[i * r + j];
  }
  const double tol = kPivotTolerance * (scale > 0.0 ? scale : 1.0);
  for (std::size_t k = 0; k < s; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < s; ++i)
      if (std::abs(lhs_[i * s + k]) > std::abs(lhs_[piv * s + k])) piv = i;
    if (!(std::abs(lhs_[piv * s + k]) > tol)) return std::numeric_limits<double>::infinity();
    if (piv != k) {
      for (std::size_t j = 0; j < s; ++j) std::swap(lhs_[k * s + j], lhs_[piv * s + j]);
      for (std::size_t j = 0; j < n; ++j) std::swap(rhs_[k * n + j], rhs_[piv * n + j]);
    }
    const Complex inv = 1.0 / lhs_[k * s + k];
    for (std::size_t i = k + 1; i < s; ++i) {
      const Complex l = lhs_[i * s + k] * inv;
      if (l == Complex{}) continue;
      for (std::size_t j = k + 1; j < s; ++j) lhs_[i * s + j] -= l * lhs_[k * s + j];
      for (std::size_t j = 0; j < n; ++j) rhs_[i * n + j] -= l * rhs_[k * n + j];
    }
  }
  for (std::size_t ii = s; ii-- > 0;) {
    const Complex inv = 1.0 / lhs_[ii * s + ii];
    for (std::size_t j = 0; j < n; ++j) {
      Complex acc = rhs_[ii * n + j];
      for (std::size_t k = ii + 1; k < s; ++k) acc -= lhs_[ii * s + k] * rhs_[k * n + j];
      rhs_[ii * n + j] = acc * inv;
    }
  }

  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < s; ++j) g_[i * s + j] = z0 * bstar_[i * s + j] + z1 * b_[i * s + j];

  for (std::size_t i = 0; i < s; ++i) {
    for (std::size_t j = 0; j < s; ++j) m_[i * n + j] = z0 * rhs_[i * n + j];
    for (std::size_t j = 0; j < r; ++j) m_[i * n + s + j] = rhs_[i * n + s + j];
  }
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      Complex acc{};
      for (std::size_t k = 0; k < s; ++k) acc += g_[i * s + k] * rhs_[k * n + j];
      if (j < s)
        m_[(s + i) * n + j] = z0 * (bbar_[i * s + j] + acc);
      else
        m_[(s + i) * n + j] = v_[i * r + (j - s)] + acc;
    }
  }

  char_poly_into(m_, n, coeffs_, work_);
  try {
    poly_roots_into(coeffs_, roots_, have_roots_);
  } catch (const ConvergenceError&) {
    poly_roots_into(coeffs_, roots_, false, RootOptions{2000, 2});
  }
  have_roots_ = true;
  double worst = 0.0;
  for (const Complex& w : roots_) worst = std::max(worst, std::abs(w));
  return worst;
}

}  // namespace imexglm
