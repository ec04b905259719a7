#include <cmath>

#include "doctest.h"
#include "imexglm/extrap.hpp"
#include "oracles.hpp"

using namespace imexglm;

namespace {

RealMatrix printed_alpha2(double b21) { return RealMatrix{{0, 1}, {-1, 2 - b21}}; }

RealMatrix printed_alpha3(double b21, double b31, double b32) {
  return RealMatrix{{0, 0, 1}, {1, -3, 3 - b21}, {3 - b32, 3 * b32 - 8, 6 - b31 - 3 * b32}};
}

RealMatrix printed_alpha4(const RealVector& b) {
  const double b21 = b[0], b31 = b[1], b32 = b[2], b41 = b[3], b42 = b[4], b43 = b[5];
  return RealMatrix{{0, 0, 0, 1},
                    {-1, 4, -6, 4 - b21},
                    {b32 - 4, 15 - 4 * b32, 2 * (3 * b32 - 10), 10 - b31 - 4 * b32},
                    {b42 + 4 * b43 - 10, 36 - 4 * b42 - 15 * b43, 6 * b42 + 20 * b43 - 45, 20 - b41 - 4 * b42 - 10 * b43}};
}

RealVector random_beta(std::size_t n) {
  RealVector b(n);
  for (auto& x : b) x = oracle::uniform(-3.0, 3.0);
  return b;
}

}  // namespace

TEST_CASE("beta entries round trip") {
  const RealVector e{1, 2, 3, 4, 5, 6};
  const RealMatrix b = beta_from_entries(4, e);
  CHECK(b(1, 0) == 1);
  CHECK(b(2, 0) == 2);
  CHECK(b(2, 1) == 3);
  CHECK(b(3, 2) == 6);
  CHECK(b(0, 0) == 0);
  CHECK(beta_entries(b) == e);
  CHECK_THROWS_AS(beta_from_entries(3, e), ValidationError);
}

TEST_CASE("printed alpha for p = s = 2") {
  const RealVector c{0.0, 1.0};
  for (int k = 0; k < 50; ++k) {
    const RealVector b = random_beta(1);
    CHECK(oracle::max_diff(solve_alpha(beta_from_entries(2, b), c, 2), printed_alpha2(b[0])) <= 1e-11);
  }
}

TEST_CASE("printed alpha for p = s = 3") {
  const RealVector c{0.0, 0.5, 1.0};
  for (int k = 0; k < 50; ++k) {
    const RealVector b = random_beta(3);
    CHECK(oracle::max_diff(solve_alpha(beta_from_entries(3, b), c, 3), printed_alpha3(b[0], b[1], b[2])) <= 1e-11);
  }
}

TEST_CASE("printed alpha for p = s = 4") {
  const RealVector c{0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0};
  for (int k = 0; k < 50; ++k) {
    const RealVector b = random_beta(6);
    CHECK(oracle::max_diff(solve_alpha(beta_from_entries(4, b), c, 4), printed_alpha4(b)) <= 1e-11);
  }
}

TEST_CASE("property: alpha e + beta e = e") {
  const RealVector c{0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0};
  for (int k = 0; k < 20; ++k) {
    const RealMatrix beta = beta_from_entries(4, random_beta(6));
    const RealMatrix alpha = solve_alpha(beta, c, 4);
    for (std::size_t i = 0; i < 4; ++i) {
      double sum = 0.0;
      for (std::size_t j = 0; j < 4; ++j) sum += alpha(i, j) + beta(i, j);
      CHECK(std::abs(sum - 1.0) <= 1e-13);
    }
  }
}

TEST_CASE("property: extrapolation is exact on polynomials of degree < p") {
  const RealVector c{0.0, 0.5, 1.0};
  for (int trial = 0; trial < 20; ++trial) {
    const RealMatrix beta = beta_from_entries(3, random_beta(3));
    const RealMatrix alpha = solve_alpha(beta, c, 3);
    const RealVector poly{oracle::uniform(), oracle::uniform(), oracle::uniform()};
    auto phi = [&](double x) { return poly[0] + poly[1] * x + poly[2] * x * x; };
    for (std::size_t j = 0; j < 3; ++j) {
      double v = 0.0;
      for (std::size_t k = 0; k < 3; ++k) v += alpha(j, k) * phi(c[k] - 1.0) + beta(j, k) * phi(c[k]);
      CHECK(std::abs(v - phi(c[j])) <= 1e-11);
    }
  }
}

TEST_CASE("p < s gives a minimum-norm solution of the interpolation conditions") {
  const RealVector c{0.0, 0.5, 1.0};
  const RealMatrix beta = beta_from_entries(3, RealVector{0.3, -0.2, 0.7});
  const ExtrapCoeffs ec = make_extrap(beta, c, 2);
  CHECK(interpolation_residual(ec, c) <= 1e-13);
  // minimum norm: each row is orthogonal to the null space of the conditions
  const RealVector null{1.0, -2.0, 1.0};
  for (std::size_t j = 0; j < 3; ++j) {
    double dot = 0.0;
    for (std::size_t k = 0; k < 3; ++k) dot += ec.alpha(j, k) * null[k];
    CHECK(std::abs(dot) <= 1e-12);
  }
}

TEST_CASE("solve_alpha input validation") {
  CHECK_THROWS_AS(solve_alpha(RealMatrix(2, 2), RealVector{0.0, 0.0}, 2), SingularMatrixError);
  CHECK_THROWS_AS(solve_alpha(RealMatrix(2, 2), RealVector{0.0, 1.0}, 3), ValidationError);
  RealMatrix upper(2, 2);
  upper(0, 1) = 1.0;
  CHECK_THROWS_AS(solve_alpha(upper, RealVector{0.0, 1.0}, 2), ValidationError);
}

TEST_CASE("dimsim2 IMEX matrices match the printed closed forms") {
  const double l = 0.3, b = 4.3;
  const RealVector beta{b};
  const ImexScheme sch = make_scheme(MethodFamily::dimsim2, l, beta);
  const double d = 1 + 2 * l;
  const RealMatrix abar{{0, l}, {-l, (2 + (2 - b) * l + 2 * (2 - b) * l * l) / d}};
  const RealMatrix astar{{0, 0}, {b * l, 0}};
  const RealMatrix bbar{
      {(4 * l * l - 1) / 4,
       (7 - b + 2 * (1 - b) * l + 4 * (1 + b) * l * l - 8 * (1 - b) * l * l * l) / (4 * d)},
      {(1 - 10 * l + 12 * l * l + 8 * l * l * l) / (4 * d),
       (1 + b + 2 * (9 - 5 * b) * l - 4 * (1 - 3 * b) * l * l - 8 * (1 - b) * l * l * l) / (4 * d)}};
  const RealMatrix bstar{{b * (1 - 4 * l * l) / 4, 0}, {-b * (1 - 10 * l + 12 * l * l + 8 * l * l * l) / (4 * d), 0}};
  CHECK(oracle::max_diff(sch.abar, abar) <= 1e-13);
  CHECK(oracle::max_diff(sch.astar, astar) <= 1e-13);
  CHECK(oracle::max_diff(sch.bbar, bbar) <= 1e-13);
  CHECK(oracle::max_diff(sch.bstar, bstar) <= 1e-13);
}

TEST_CASE("zero beta gives zero A* and B*") {
  const RealVector beta(3, 0.0);
  const ImexScheme sch = make_scheme(MethodFamily::dimsim3, std::nullopt, beta);
  CHECK(max_abs(sch.astar) == 0.0);
  CHECK(max_abs(sch.bstar) == 0.0);
}

TEST_CASE("property: A* strictly lower triangular, last column of B* zero") {
  const ImexScheme sch = make_scheme(MethodFamily::dimsim4, std::nullopt, random_beta(6));
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = i; j < 4; ++j) CHECK(sch.astar(i, j) == 0.0);
    CHECK(sch.bstar(i, 3) == 0.0);
  }
}

TEST_CASE("assemble_imex rejects inconsistent coefficients") {
  const GlmTableau t = dimsim2(0.3);
  ExtrapCoeffs ec = make_extrap(beta_from_entries(2, RealVector{1.0}), t.c, 2);
  ec.alpha(1, 1) += 1e-6;
  CHECK_THROWS_AS(assemble_imex(t, ec), ValidationError);
  const ExtrapCoeffs ec3 = make_extrap(RealMatrix(3, 3), RealVector{0.0, 0.5, 1.0}, 3);
  CHECK_THROWS_AS(assemble_imex(t, ec3), ValidationError);
  CHECK_THROWS_AS(make_scheme(MethodFamily::dimsim3, std::nullopt, RealVector{1.0}), ValidationError);
}

TEST_CASE("explicit two-step GLM of the theta method") {
  const double th = 0.7;
  const ImexScheme sch = make_scheme(MethodFamily::theta, th, RealVector{});
  const GlmTableau e = explicit_two_step_glm(sch);
  CHECK(oracle::max_diff(e.c, RealVector{th - 1.0, th}) <= 1e-15);
  CHECK(oracle::max_diff(e.A, RealMatrix{{0, 0}, {th, 0}}) <= 1e-15);
  CHECK(oracle::max_diff(e.U, RealMatrix{{1, 0}, {0, 1}}) <= 1e-15);
  CHECK(oracle::max_diff(e.B, RealMatrix{{th, 0}, {1, 0}}) <= 1e-15);
  CHECK(oracle::max_diff(e.V, RealMatrix{{0, 1}, {0, 1}}) <= 1e-15);
  CHECK(oracle::max_diff(e.qvecs[0], RealVector{1, 1}) <= 1e-15);
  CHECK(oracle::max_diff(e.qvecs[1], RealVector{th - 1.0, 0}) <= 1e-15);
}

TEST_CASE("property: explicit two-step GLM inherits order and stage order") {
  for (MethodFamily f : {MethodFamily::dimsim2, MethodFamily::dimsim3, MethodFamily::dimsim4}) {
    for (int trial = 0; trial < 3; ++trial) {
      const ImexScheme sch = make_scheme(f, std::nullopt, random_beta(beta_count(f)));
      const GlmTableau e = explicit_two_step_glm(sch);
      CHECK(e.s() == 2 * sch.s());
      CHECK(e.r() == sch.s() + sch.r());
      CHECK(max_abs(stage_order_residual(e, 0)) <= 1e-12);
      for (int k = 0; k <= e.q; ++k) CHECK(max_abs(stage_order_residual(e, k)) <= 1e-9);
      for (int k = 0; k <= e.p; ++k) CHECK(max_abs(order_residual(e, k)) <= 1e-9);
    }
  }
}
