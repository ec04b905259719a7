#include "imexglm/glm.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace imexglm {

namespace {

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

double eval_ascending(std::span<const double> a, double x) {
  double v = 0.0;
  for (std::size_t i = a.size(); i-- > 0;) v = v * x + a[i];
  return v;
}

// Integral from 0 to x of the polynomial with ascending coefficients a.
double integrate_ascending(std::span<const double> a, double x) {
  double v = 0.0;
  for (std::size_t i = a.size(); i-- > 0;) v = v * x + a[i] / static_cast<double>(i + 1);
  return v * x;
}

}  // namespace

void GlmTableau::validate() const {
  const std::size_t ns = s();
  const std::size_t nr = r();
  auto fail = [&](const std::string& what) { throw ValidationError("GlmTableau '" + name + "': " + what); };
  if (ns == 0 || nr == 0) fail("empty tableau");
  if (A.rows() != ns || A.cols() != ns) fail("A must be s x s");
  if (U.rows() != ns || U.cols() != nr) fail("U must be s x r");
  if (B.rows() != nr || B.cols() != ns) fail("B must be r x s");
  if (V.rows() != nr || V.cols() != nr) fail("V must be r x r");
  if (p < 1) fail("order p must be positive");
  if (q != p && q != p - 1) fail("stage order must be p or p-1");
  if (qvecs.size() != static_cast<std::size_t>(p) + 1) fail("need p+1 q-vectors");
  for (const auto& v : qvecs)
    if (v.size() != nr) fail("q-vectors must have length r");
  auto finite = [](std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
  };
  if (!finite(c) || !finite(A.data()) || !finite(U.data()) || !finite(B.data()) || !finite(V.data()))
    fail("non-finite coefficient");
}

RealVector elementwise_power(std::span<const double> c, int k) {
  RealVector out(c.size(), 1.0);
  for (std::size_t i = 0; i < c.size(); ++i) out[i] = k == 0 ? 1.0 : std::pow(c[i], k);
  return out;
}

RealVector stage_order_residual(const GlmTableau& tab, int k) {
  if (k < 0 || k > tab.q) throw ValidationError("stage_order_residual: k outside 0..q");
  RealVector res = elementwise_power(tab.c, k);
  if (k > 0) {
    const RealVector ack = tab.A * elementwise_power(tab.c, k - 1);
    for (std::size_t i = 0; i < res.size(); ++i) res[i] -= k * ack[i];
  }
  const RealVector uq = tab.U * tab.qvecs[static_cast<std::size_t>(k)];
  const double kf = factorial(k);
  for (std::size_t i = 0; i < res.size(); ++i) res[i] -= kf * uq[i];
  return res;
}

RealVector order_residual(const GlmTableau& tab, int k) {
  if (k < 0 || k > tab.p) throw ValidationError("order_residual: k outside 0..p");
  const std::size_t nr = tab.r();
  RealVector res(nr, 0.0);
  const double kf = factorial(k);
  for (int l = 0; l <= k; ++l) {
    const double w = kf / factorial(l);
    const auto& qv = tab.qvecs[static_cast<std::size_t>(k - l)];
    for (std::size_t i = 0; i < nr; ++i) res[i] += w * qv[i];
  }
  if (k > 0) {
    const RealVector bck = tab.B * elementwise_power(tab.c, k - 1);
    for (std::size_t i = 0; i < nr; ++i) res[i] -= k * bck[i];
  }
  const RealVector vq = tab.V * tab.qvecs[static_cast<std::size_t>(k)];
  for (std::size_t i = 0; i < nr; ++i) res[i] -= kf * vq[i];
  return res;
}

double OrderReport::worst() const {
  double w = 0.0;
  for (double v : stage) w = std::max(w, v);
  for (double v : order) w = std::max(w, v);
  return w;
}

OrderReport check_order_conditions(const GlmTableau& tab) {
  OrderReport rep;
  for (int k = 0; k <= tab.q; ++k) rep.stage.push_back(max_abs(stage_order_residual(tab, k)));
  for (int k = 0; k <= tab.p; ++k) rep.order.push_back(max_abs(order_residual(tab, k)));
  return rep;
}

ComplexMatrix glm_stability_matrix(const GlmTableau& tab, Complex z) {
  const std::size_t ns = tab.s();
  ComplexMatrix resolvent = ComplexMatrix::identity(ns) - z * to_complex(tab.A);
  LuFactor<Complex> lu(std::move(resolvent));
  if (lu.singular()) throw SingularMatrixError("glm_stability_matrix: I - zA is singular");
  const ComplexMatrix ru = lu.solve(to_complex(tab.U));
  return to_complex(tab.V) + z * (to_complex(tab.B) * ru);
}

RealVector lagrange_numerator(std::span<const double> c, std::size_t j) {
  RealVector poly{1.0};
  for (std::size_t k = 0; k < c.size(); ++k) {
    if (k == j) continue;
    RealVector next(poly.size() + 1, 0.0);
    for (std::size_t i = 0; i < poly.size(); ++i) {
      next[i + 1] += poly[i];
      next[i] -= c[k] * poly[i];
    }
    poly = std::move(next);
  }
  return poly;
}

RealMatrix build_B(const RealMatrix& A, const RealMatrix& V, std::span<const double> c) {
  const std::size_t ns = c.size();
  if (A.rows() != ns || A.cols() != ns || V.rows() != ns || V.cols() != ns)
    throw ValidationError("build_B: requires r = s and matching dimensions");
  RealMatrix b0(ns, ns), b1(ns, ns), b2(ns, ns);
  for (std::size_t j = 0; j < ns; ++j) {
    const RealVector phi = lagrange_numerator(c, j);
    const double denom = eval_ascending(phi, c[j]);
    if (denom == 0.0) throw ValidationError("build_B: abscissae must be distinct");
    for (std::size_t i = 0; i < ns; ++i) {
      b0(i, j) = integrate_ascending(phi, 1.0 + c[i]) / denom;
      b1(i, j) = eval_ascending(phi, 1.0 + c[i]) / denom;
      b2(i, j) = integrate_ascending(phi, c[i]) / denom;
    }
  }
  return b0 - A * b1 - V * b2 + V * A;
}

}  // namespace imexglm
