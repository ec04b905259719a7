#include "imexglm/matkit.hpp"

#include <algorithm>
#include <cmath>

namespace imexglm {

ComplexMatrix to_complex(const RealMatrix& a) {
  ComplexMatrix c(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = a(i, j);
  return c;
}

void char_poly_into(std::span<const Complex> m, std::size_t n, std::span<Complex> out,
                    std::span<Complex> workspace) {
  if (n > kMaxCharPolyDimension) throw ValidationError("char_poly: dimension exceeds 16");
  Complex* mk = workspace.data();
  Complex* tmp = workspace.data() + n * n;
  out[n] = 1.0;
  for (std::size_t k = 1; k <= n; ++k) {
    if (k == 1) {
      std::fill(mk, mk + n * n, Complex{});
      for (std::size_t i = 0; i < n; ++i) mk[i * n + i] = 1.0;
    } else {
      std::fill(tmp, tmp + n * n, Complex{});
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t l = 0; l < n; ++l) {
          const Complex a = m[i * n + l];
          if (a == Complex{}) continue;
          const Complex* src = mk + l * n;
          Complex* dst = tmp + i * n;
          for (std::size_t j = 0; j < n; ++j) dst[j] += a * src[j];
        }
      const Complex shift = out[n - k + 1];
      for (std::size_t i = 0; i < n * n; ++i) mk[i] = tmp[i];
      for (std::size_t i = 0; i < n; ++i) mk[i * n + i] += shift;
    }
    Complex trace{};
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) trace += m[i * n + j] * mk[j * n + i];
    out[n - k] = -trace / static_cast<double>(k);
  }
}

Polynomial char_poly(const ComplexMatrix& m) {
  if (!m.square()) throw ValidationError("char_poly: matrix must be square");
  const std::size_t n = m.rows();
  if (n > kMaxCharPolyDimension) throw ValidationError("char_poly: dimension exceeds 16");
  ComplexVector coeffs(n + 1);
  ComplexVector work(2 * n * n);
  char_poly_into(m.data(), n, coeffs, work);
  return Polynomial(std::move(coeffs));
}

RealVector fd_weights(std::span<const double> nodes, int k, double x0) {
  const std::size_t n = nodes.size();
  if (k < 0) throw ValidationError("fd_weights: negative derivative order");
  if (static_cast<std::size_t>(k) >= n)
    throw ValidationError("fd_weights: derivative order must be below the node count");
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (nodes[i] == nodes[j]) throw ValidationError("fd_weights: nodes must be distinct");

  const std::size_t m = static_cast<std::size_t>(k);
  std::vector<RealVector> c(n, RealVector(m + 1, 0.0));
  double c1 = 1.0;
  double c4 = nodes[0] - x0;
  c[0][0] = 1.0;
  for (std::size_t i = 1; i < n; ++i) {
    const std::size_t mn = std::min(i, m);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = nodes[i] - x0;
    for (std::size_t j = 0; j < i; ++j) {
      const double c3 = nodes[i] - nodes[j];
      c2 *= c3;
      if (j == i - 1) {
        for (std::size_t s = mn; s >= 1; --s)
          c[i][s] = c1 * (static_cast<double>(s) * c[i - 1][s - 1] - c5 * c[i - 1][s]) / c2;
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (std::size_t s = mn; s >= 1; --s)
        c[j][s] = (c4 * c[j][s] - static_cast<double>(s) * c[j][s - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  RealVector w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = c[i][m];
  return w;
}

}  // namespace imexglm
