#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "imexglm/matkit.hpp"
#include "oracles.hpp"

using namespace imexglm;

TEST_CASE("lu_solve trivial systems") {
  const ComplexMatrix eye = ComplexMatrix::identity(4);
  const ComplexVector b{{1, 2}, {3, -1}, {0, 0}, {-2, 5}};
  CHECK(oracle::max_diff(lu_solve(eye, b), b) == 0.0);

  const RealMatrix d{{2, 0}, {0, 3}};
  const RealVector x = lu_solve(d, RealVector{2, 3});
  CHECK(x[0] == doctest::Approx(1.0));
  CHECK(x[1] == doctest::Approx(1.0));
}

TEST_CASE("lu_solve against Cramer's rule on random complex 6x6") {
  for (int trial = 0; trial < 5; ++trial) {
    const ComplexMatrix a = oracle::random_complex(6, 6);
    ComplexVector b(6);
    for (auto& v : b) v = {oracle::uniform(), oracle::uniform()};
    const ComplexVector x = lu_solve(a, b);
    const ComplexVector ref = oracle::cramer(a, b);
    CHECK(oracle::max_diff(x, ref) <= 1e-10);
    const ComplexVector ax = a * x;
    CHECK(oracle::max_diff(ax, b) <= 1e-10 * (norm_inf(a) * max_abs(x) + max_abs(b)));
  }
}

TEST_CASE("singular matrix is reported") {
  const RealMatrix a{{1, 2}, {2, 4}};
  CHECK_THROWS_AS(lu_solve(a, RealVector{1, 1}), SingularMatrixError);
  CHECK(determinant(a) == 0.0);
}

TEST_CASE("determinant small cases") {
  CHECK(std::abs(determinant(ComplexMatrix::identity(5)) - Complex(1.0)) == 0.0);
  const RealMatrix rot{{0, 1}, {-1, 0}};
  CHECK(determinant(rot) == doctest::Approx(1.0));
  const RealMatrix tri{{2, 5, 7}, {0, -3, 1}, {0, 0, 0.5}};
  CHECK(determinant(tri) == doctest::Approx(-3.0).epsilon(1e-15));
}

TEST_CASE("determinant against cofactor expansion on random 5x5") {
  for (int trial = 0; trial < 10; ++trial) {
    const ComplexMatrix a = oracle::random_complex(5, 5);
    const Complex ref = oracle::cofactor_det(a);
    CHECK(std::abs(determinant(a) - ref) <= 1e-11 * std::abs(ref));
  }
}

TEST_CASE("property: determinant is multiplicative") {
  for (std::size_t n = 1; n <= 8; ++n) {
    for (int trial = 0; trial < 4; ++trial) {
      const ComplexMatrix a = oracle::random_complex(n, n);
      const ComplexMatrix b = oracle::random_complex(n, n);
      const Complex lhs = determinant(a * b);
      const Complex rhs = determinant(a) * determinant(b);
      CHECK(std::abs(lhs - rhs) <= 1e-9 * std::abs(rhs));
    }
  }
}

TEST_CASE("char_poly small cases") {
  const Polynomial p0 = char_poly(ComplexMatrix(2, 2));
  CHECK(p0.degree() == 2);
  CHECK(std::abs(p0[0]) == 0.0);
  CHECK(std::abs(p0[1]) == 0.0);
  CHECK(std::abs(p0[2] - Complex(1.0)) == 0.0);

  const ComplexMatrix d{{2.0, 0.0}, {0.0, 3.0}};
  const Polynomial p = char_poly(d);
  CHECK(std::abs(p[0] - Complex(6.0)) <= 1e-14);
  CHECK(std::abs(p[1] - Complex(-5.0)) <= 1e-14);
  CHECK(std::abs(p[2] - Complex(1.0)) <= 1e-14);
}

TEST_CASE("char_poly against det(wI - M) on random 6x6") {
  const ComplexMatrix m = oracle::random_complex(6, 6);
  const Polynomial p = char_poly(m);
  REQUIRE(p.degree() == 6);
  for (int k = 0; k < 10; ++k) {
    const Complex w{2.0 * oracle::uniform(), 2.0 * oracle::uniform()};
    ComplexMatrix wm = m * Complex(-1.0);
    for (std::size_t i = 0; i < 6; ++i) wm(i, i) += w;
    const Complex ref = oracle::cofactor_det(wm);
    CHECK(std::abs(p(w) - ref) <= 1e-9 * std::abs(ref));
  }
}

TEST_CASE("char_poly rejects oversized matrices") {
  CHECK_THROWS_AS(char_poly(ComplexMatrix(kMaxCharPolyDimension + 1, kMaxCharPolyDimension + 1)), ValidationError);
  CHECK_THROWS_AS(char_poly(ComplexMatrix(2, 3)), ValidationError);
}

TEST_CASE("poly_roots trivial polynomials") {
  auto sorted = [](ComplexVector r) {
    std::sort(r.begin(), r.end(), [](Complex a, Complex b) {
      return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    return r;
  };
  const ComplexVector r1 = sorted(poly_roots(Polynomial{1.0, 0.0, 1.0}));
  REQUIRE(r1.size() == 2);
  CHECK(std::abs(r1[0] - Complex(0, -1)) <= 1e-12);
  CHECK(std::abs(r1[1] - Complex(0, 1)) <= 1e-12);

  const ComplexVector r2 = sorted(poly_roots(Polynomial{6.0, -5.0, 1.0}));
  REQUIRE(r2.size() == 2);
  CHECK(std::abs(r2[0] - Complex(2.0)) <= 1e-12);
  CHECK(std::abs(r2[1] - Complex(3.0)) <= 1e-12);

  CHECK_THROWS_AS(poly_roots(Polynomial{3.0}), ValidationError);
}

TEST_CASE("poly_roots reconstruct random degree-8 polynomials") {
  for (int trial = 0; trial < 10; ++trial) {
    ComplexVector c(9);
    for (auto& v : c) v = {oracle::uniform(), oracle::uniform()};
    const Polynomial p(c);
    const ComplexVector roots = poly_roots(p);
    REQUIRE(roots.size() == 8);
    double cmax = 0.0;
    for (const auto& v : c) cmax = std::max(cmax, std::abs(v));
    for (const auto& r : roots) CHECK(std::abs(p(r)) <= 1e-9 * cmax * std::max(1.0, std::pow(std::abs(r), 8)));
    const Polynomial rebuilt = Polynomial::from_roots(roots);
    double err = 0.0;
    for (std::size_t k = 0; k <= 8; ++k) err = std::max(err, std::abs(rebuilt[k] * p.leading() - c[k]));
    CHECK(err <= 1e-8 * cmax);
  }
}

TEST_CASE("property: char_poly roots are eigenvalues (inverse iteration residual)") {
  for (int trial = 0; trial < 5; ++trial) {
    const ComplexMatrix m = oracle::random_complex(6, 6);
    for (const Complex lam : poly_roots(char_poly(m))) {
      ComplexMatrix shifted = m;
      const Complex mu = lam + Complex(1e-10 * (1.0 + std::abs(lam)));
      for (std::size_t i = 0; i < 6; ++i) shifted(i, i) -= mu;
      const LuFactor<Complex> lu(shifted);
      ComplexVector v(6, Complex(1.0));
      for (int it = 0; it < 3; ++it) {
        v = lu.solve(v);
        const double nv = max_abs(v);
        for (auto& x : v) x /= nv;
      }
      ComplexVector mv = m * v;
      for (std::size_t i = 0; i < 6; ++i) mv[i] -= lam * v[i];
      CHECK(max_abs(mv) <= 1e-7 * std::max(1.0, norm_inf(m)));
    }
  }
}

TEST_CASE("banded solve: identity and 1-D Laplacian") {
  BandedMatrix eye(6, 1, 1);
  for (std::size_t i = 0; i < 6; ++i) eye.set(i, i, 1.0);
  const RealVector b{1, -2, 3, 0.5, 7, -1};
  CHECK(oracle::max_diff(banded_solve(banded_lu(eye), b), b) == 0.0);

  const std::size_t n = 10;
  BandedMatrix lap(n, 1, 1);
  for (std::size_t i = 0; i < n; ++i) {
    lap.set(i, i, 2.0);
    if (i > 0) lap.set(i, i - 1, -1.0);
    if (i + 1 < n) lap.set(i, i + 1, -1.0);
  }
  RealVector rhs(n);
  for (auto& v : rhs) v = oracle::uniform();
  const RealVector xb = banded_solve(banded_lu(lap), rhs);
  const RealVector xd = lu_solve(lap.to_dense(), rhs);
  CHECK(oracle::max_diff(xb, xd) <= 1e-12);
  CHECK_THROWS_AS(lap.set(0, 5, 1.0), ValidationError);
  CHECK(lap.get(0, 5) == 0.0);
}

TEST_CASE("banded solve with pivoting matches dense on random band matrices") {
  const std::size_t n = 30, kl = 3, ku = 2;
  BandedMatrix a(n, kl, ku);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = (i > kl ? i - kl : 0); j <= std::min(n - 1, i + ku); ++j) a.set(i, j, oracle::uniform());
  RealVector rhs(n);
  for (auto& v : rhs) v = oracle::uniform();
  const RealVector xb = banded_solve(banded_lu(a), rhs);
  const RealVector xd = lu_solve(a.to_dense(), rhs);
  CHECK(oracle::max_diff(xb, xd) <= 1e-9 * std::max(1.0, max_abs(xd)));
  RealVector y = a.multiply(xb);
  CHECK(oracle::max_diff(y, rhs) <= 1e-10 * (max_abs(xb) * a.max_abs_entry() * (kl + ku + 1) + 1.0));
}

TEST_CASE("fd_weights standard stencils") {
  const double nodes[] = {-1.0, 0.0, 1.0};
  const RealVector w2 = fd_weights(nodes, 2);
  CHECK(oracle::max_diff(w2, RealVector{1, -2, 1}) <= 1e-14);
  const RealVector w1 = fd_weights(nodes, 1);
  CHECK(oracle::max_diff(w1, RealVector{-0.5, 0, 0.5}) <= 1e-14);
  CHECK_THROWS_AS(fd_weights(nodes, 3), ValidationError);
  const double repeated[] = {0.0, 1.0, 1.0};
  CHECK_THROWS_AS(fd_weights(repeated, 1), ValidationError);
}

TEST_CASE("property: fd_weights exact on polynomials below node count") {
  const double nodes[] = {-2.0, -0.7, 0.0, 0.4, 1.5, 3.0};
  const double x0 = 0.3;
  for (int k = 0; k < 6; ++k) {
    const RealVector w = fd_weights(nodes, k, x0);
    for (int deg = 0; deg < 6; ++deg) {
      double approx = 0.0;
      for (std::size_t j = 0; j < 6; ++j) approx += w[j] * std::pow(nodes[j], deg);
      double exact = 0.0;
      if (deg >= k) {
        double fall = 1.0;
        for (int i = 0; i < k; ++i) fall *= deg - i;
        exact = fall * std::pow(x0, deg - k);
      }
      CHECK(std::abs(approx - exact) <= 1e-12 * std::max(1.0, std::abs(exact)) * 10.0);
    }
  }
}

TEST_CASE("fd_weights 7-node third derivative of exp converges at fourth order") {
  double prev = 0.0;
  for (double delta : {0.2, 0.1, 0.05}) {
    RealVector nodes(7);
    for (int j = 0; j < 7; ++j) nodes[j] = (j - 3) * delta;
    const RealVector w = fd_weights(nodes, 3);
    double d3 = 0.0;
    for (int j = 0; j < 7; ++j) d3 += w[j] * std::exp(nodes[j]);
    const double err = std::abs(d3 - 1.0);
    CHECK(err <= 0.5 * std::pow(delta, 4));
    if (prev > 0.0) CHECK(std::log2(prev / err) == doctest::Approx(4.0).epsilon(0.05));
    prev = err;
  }
}
