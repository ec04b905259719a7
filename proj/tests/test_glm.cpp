#include <cmath>

#include "doctest.h"
#include "imexglm/catalogue.hpp"
#include "imexglm/glm.hpp"
#include "imexglm/tableau_json.hpp"
#include "oracles.hpp"

using namespace imexglm;

namespace {

double spectral_radius(const ComplexMatrix& m) {
  double r = 0.0;
  for (const Complex w : poly_roots(char_poly(m))) r = std::max(r, std::abs(w));
  return r;
}

// B0, B1, B2 by 5-point Gauss-Legendre on each interval, assembled as
// B = B0 - A B1 - V B2 + V A.
RealMatrix gauss_B(const RealMatrix& a, const RealMatrix& v, const RealVector& c) {
  static const double xg[] = {0.0, -0.5384693101056831, 0.5384693101056831, -0.9061798459386640, 0.9061798459386640};
  static const double wg[] = {0.5688888888888889, 0.4786286704993665, 0.4786286704993665, 0.2369268850561891,
                              0.2369268850561891};
  const std::size_t s = c.size();
  auto phi = [&](std::size_t j, double x) {
    double p = 1.0;
    for (std::size_t k = 0; k < s; ++k)
      if (k != j) p *= (x - c[k]) / (c[j] - c[k]);
    return p;
  };
  auto integral = [&](std::size_t j, double upper) {
    double sum = 0.0;
    for (int g = 0; g < 5; ++g) sum += wg[g] * phi(j, 0.5 * upper * (xg[g] + 1.0));
    return 0.5 * upper * sum;
  };
  RealMatrix b0(s, s), b1(s, s), b2(s, s);
  for (std::size_t i = 0; i < s; ++i)
    for (std::size_t j = 0; j < s; ++j) {
      b0(i, j) = integral(j, 1.0 + c[i]);
      b1(i, j) = phi(j, 1.0 + c[i]);
      b2(i, j) = integral(j, c[i]);
    }
  return b0 - a * b1 - v * b2 + v * a;
}

}  // namespace

TEST_CASE("theta method residuals vanish") {
  const GlmTableau t = theta_method(0.7);
  for (int k = 0; k <= 1; ++k) {
    CHECK(max_abs(stage_order_residual(t, k)) == 0.0);
    CHECK(max_abs(order_residual(t, k)) <= 1e-15);
  }
}

TEST_CASE("dimsim2 residuals at lambda 0.3") {
  const GlmTableau t = dimsim2(0.3);
  for (int k = 0; k <= 2; ++k) {
    CHECK(max_abs(stage_order_residual(t, k)) <= 1e-12);
    CHECK(max_abs(order_residual(t, k)) <= 1e-12);
  }
}

TEST_CASE("k = 0 stage residual is e - U q0") {
  for (const GlmTableau& t : {dimsim2(0.4), dimsim3(), dimsim4()}) {
    const RealVector res = stage_order_residual(t, 0);
    const RealVector uq = t.U * t.qvecs[0];
    for (std::size_t i = 0; i < t.s(); ++i) CHECK(res[i] == doctest::Approx(1.0 - uq[i]).epsilon(1e-15));
  }
}

TEST_CASE("dimsim3 and dimsim4 order residuals") {
  const GlmTableau t3 = dimsim3();
  for (int k = 0; k <= 3; ++k) CHECK(max_abs(order_residual(t3, k)) <= 1e-10);
  const GlmTableau t4 = dimsim4();
  for (int k = 0; k <= 4; ++k) CHECK(max_abs(order_residual(t4, k)) <= 1e-9);
}

TEST_CASE("residual index out of range") {
  const GlmTableau t = dimsim2(0.3);
  CHECK_THROWS_AS(stage_order_residual(t, 3), ValidationError);
  CHECK_THROWS_AS(order_residual(t, -1), ValidationError);
}

TEST_CASE("check_order_conditions collects every k") {
  const OrderReport rep = check_order_conditions(dimsim3());
  CHECK(rep.stage.size() == 4);
  CHECK(rep.order.size() == 4);
  CHECK(rep.worst() <= 1e-9);
}

TEST_CASE("stability matrix at zero equals V") {
  for (const GlmTableau& t : {theta_method(0.6), dimsim2(0.3), dimsim3(), dimsim4()}) {
    const ComplexMatrix s0 = glm_stability_matrix(t, 0.0);
    for (std::size_t i = 0; i < t.r(); ++i)
      for (std::size_t j = 0; j < t.r(); ++j) CHECK(s0(i, j) == Complex(t.V(i, j)));
  }
}

TEST_CASE("theta method stability function") {
  for (double z : {-0.1, -1.0, -7.5, -300.0}) {
    const ComplexMatrix s = glm_stability_matrix(theta_method(1.0), z);
    CHECK(std::abs(s(0, 0) - 1.0 / (1.0 - z)) <= 1e-15);
    const double th = 0.6;
    const ComplexMatrix st = glm_stability_matrix(theta_method(th), z);
    CHECK(std::abs(st(0, 0) - (1.0 + (1.0 - th) * z) / (1.0 - th * z)) <= 1e-14);
  }
}

TEST_CASE("L-stability probe at z = -1e8") {
  const double l1 = (2.0 - std::sqrt(2.0)) / 2.0, l2 = (2.0 + std::sqrt(2.0)) / 2.0;
  CHECK(spectral_radius(glm_stability_matrix(dimsim2(l1), -1e8)) <= 1e-6);
  CHECK(spectral_radius(glm_stability_matrix(dimsim2(l2), -1e8)) <= 1e-6);
  // dimsim3/dimsim4 use 8-digit coefficients: the stiff limit is nilpotent only
  // up to ~1e-8, so its eigenvalues scale like 1e-8^(1/(s-1)). The polynomial
  // coefficients still vanish to truncation level.
  for (const GlmTableau& t : {dimsim3(), dimsim4()}) {
    const Polynomial p = char_poly(glm_stability_matrix(t, -1e8));
    for (int k = 0; k < p.degree(); ++k) CHECK(std::abs(p[k]) <= 1e-5);
    CHECK(spectral_radius(glm_stability_matrix(t, -1e8)) <= 0.05);
  }
  CHECK(spectral_radius(glm_stability_matrix(dimsim2(0.4), -1e8)) > 1e-3);
}

TEST_CASE("stability matrix is singular at z = 1/lambda") {
  CHECK_THROWS_AS(glm_stability_matrix(dimsim2(0.5), 2.0), SingularMatrixError);
}

TEST_CASE("build_B reproduces the dimsim2 closed form at lambda 0.3") {
  const double l = 0.3;
  const GlmTableau t = dimsim2(l);
  const RealMatrix b = build_B(t.A, t.V, t.c);
  const double d = 4.0 * (2.0 * l + 1.0);
  const RealMatrix expect{
      {(8 * l * l * l + 12 * l * l - 2 * l + 5) / d, (1 - 4 * l * l) / 4},
      {(8 * l * l * l + 20 * l * l - 2 * l + 3) / d, (-8 * l * l * l - 12 * l * l + 10 * l - 1) / d}};
  CHECK(oracle::max_diff(b, expect) <= 1e-12);
  CHECK(oracle::max_diff(t.B, expect) <= 1e-12);
}

TEST_CASE("build_B for s = 1 gives B = [1]") {
  for (double th : {0.0, 0.5, 1.0}) {
    const RealMatrix b = build_B(RealMatrix{{th}}, RealMatrix{{1.0}}, RealVector{th});
    CHECK(b(0, 0) == doctest::Approx(1.0).epsilon(1e-15));
  }
}

TEST_CASE("build_B agrees with Gauss-Legendre integration") {
  for (const GlmTableau& t : {dimsim2(0.29), dimsim3(), dimsim4()}) {
    const RealMatrix b = build_B(t.A, t.V, t.c);
    CHECK(oracle::max_diff(b, gauss_B(t.A, t.V, t.c)) <= 1e-12 * std::max(1.0, max_abs(b)));
  }
}

TEST_CASE("build_B rejects repeated abscissae") {
  CHECK_THROWS_AS(build_B(RealMatrix(2, 2), RealMatrix::identity(2), RealVector{0.5, 0.5}), ValidationError);
}

TEST_CASE("lagrange_numerator expands the product") {
  const double c[] = {0.0, 0.5, 1.0};
  const RealVector p = lagrange_numerator(c, 1);
  CHECK(oracle::max_diff(p, RealVector{0.0, -1.0, 1.0}) <= 1e-15);
}

TEST_CASE("validate rejects inconsistent tableaus") {
  GlmTableau t = dimsim2(0.3);
  t.q = 0;
  CHECK_THROWS_AS(t.validate(), ValidationError);
  t = dimsim2(0.3);
  t.qvecs.pop_back();
  CHECK_THROWS_AS(t.validate(), ValidationError);
  t = dimsim2(0.3);
  t.U = RealMatrix(3, 2);
  CHECK_THROWS_AS(t.validate(), ValidationError);
}

TEST_CASE("tableau JSON round trip") {
  const GlmTableau t = dimsim3();
  const GlmTableau back = tableau_from_json(nlohmann::json::parse(tableau_to_json(t).dump()));
  CHECK(back.p == 3);
  CHECK(back.q == 3);
  CHECK(back.A == t.A);
  CHECK(back.B == t.B);
  CHECK(back.V == t.V);
  CHECK(back.c == t.c);
  nlohmann::json bad = tableau_to_json(t);
  bad["A"][0].push_back(1.0);
  CHECK_THROWS(tableau_from_json(bad));
  bad = tableau_to_json(t);
  bad.erase("qvecs");
  CHECK_THROWS(tableau_from_json(bad));
}
