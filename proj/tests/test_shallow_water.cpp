#include <cmath>
#include <sstream>

#include "doctest.h"
#include "imexglm/shallow_water.hpp"
#include "oracles.hpp"

using namespace imexglm;

namespace {

constexpr double kG = 9.81;

double mh(double x, double y) { return 1.0 + 0.3 * std::exp(-(x * x + y * y)); }
double mu(double x, double y) { return 0.2 * std::sin(x) * std::exp(-y * y); }
double mv(double x, double y) { return -0.1 * std::exp(-x * x) * std::cos(y); }

void flux(double x, double y, double fx[3], double fy[3]) {
  const double h = mh(x, y), uh = mu(x, y), vh = mv(x, y);
  fx[0] = uh;
  fx[1] = uh * uh / h + 0.5 * kG * h * h;
  fx[2] = uh * vh / h;
  fy[0] = vh;
  fy[1] = uh * vh / h;
  fy[2] = vh * vh / h + 0.5 * kG * h * h;
}

// -div F by a fine 4th-order central difference of the continuous fluxes
void exact_rhs(double x, double y, double out[3]) {
  const double e = 1e-3;
  double a[3], b[3], t[3];
  double dx[3] = {0, 0, 0}, dy[3] = {0, 0, 0};
  const double w[4] = {1.0 / 12, -8.0 / 12, 8.0 / 12, -1.0 / 12};
  const double off[4] = {-2, -1, 1, 2};
  for (int k = 0; k < 4; ++k) {
    flux(x + off[k] * e, y, a, t);
    flux(x, y + off[k] * e, t, b);
    for (int q = 0; q < 3; ++q) {
      dx[q] += w[k] * a[q] / e;
      dy[q] += w[k] * b[q] / e;
    }
  }
  for (int q = 0; q < 3; ++q) out[q] = -(dx[q] + dy[q]);
}

RealVector manufactured(const ShallowWater& sw) {
  RealVector u(sw.dimension());
  for (std::size_t j = 0; j <= sw.ny(); ++j)
    for (std::size_t i = 0; i <= sw.nx(); ++i) {
      u[sw.index(i, j, 0)] = mh(sw.x(i), sw.y(j));
      u[sw.index(i, j, 1)] = mu(sw.x(i), sw.y(j));
      u[sw.index(i, j, 2)] = mv(sw.x(i), sw.y(j));
    }
  return u;
}

// random perturbation with zero normal momentum on the walls
RealVector perturbed_initial(const ShallowWater& sw) {
  RealVector u = sw.initial_state();
  for (std::size_t k = 0; k < u.size(); ++k) u[k] += 0.05 * oracle::uniform();
  for (std::size_t j = 0; j <= sw.ny(); ++j) {
    u[sw.index(0, j, 1)] = 0.0;
    u[sw.index(sw.nx(), j, 1)] = 0.0;
  }
  for (std::size_t i = 0; i <= sw.nx(); ++i) {
    u[sw.index(i, 0, 2)] = 0.0;
    u[sw.index(i, sw.ny(), 2)] = 0.0;
  }
  return u;
}

}  // namespace

TEST_CASE("flat lake at rest is an equilibrium") {
  ShallowWater sw(10, 12);
  RealVector u(sw.dimension(), 0.0), out(sw.dimension());
  for (std::size_t j = 0; j <= sw.ny(); ++j)
    for (std::size_t i = 0; i <= sw.nx(); ++i) u[sw.index(i, j, 0)] = 1.7;
  sw.full_rhs(u, out);
  CHECK(max_abs(out) == 0.0);
}

TEST_CASE("initial hump peaks at (1/3, 2/3)") {
  ShallowWater sw(18, 18);
  const RealVector u = sw.initial_state();
  double best = 0.0;
  std::size_t bi = 0, bj = 0;
  for (std::size_t j = 0; j <= sw.ny(); ++j)
    for (std::size_t i = 0; i <= sw.nx(); ++i)
      if (u[sw.index(i, j, 0)] > best) best = u[sw.index(i, j, 0)], bi = i, bj = j;
  CHECK(best == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(sw.x(bi) == doctest::Approx(1.0 / 3.0));
  CHECK(sw.y(bj) == doctest::Approx(2.0 / 3.0));
  CHECK(ShallowWater::initial_height(-3.0, -3.0) == doctest::Approx(1.0 + std::exp(-(10.0 / 3 * 10.0 / 3 + 11.0 / 3 * 11.0 / 3))));
  for (std::size_t k = 1; k < u.size(); k += 3) CHECK(u[k] == 0.0);
}

TEST_CASE("property: total volume rate is zero") {
  for (std::size_t n : {8u, 13u, 20u}) {
    ShallowWater sw(n, n + 2);
    const RealVector u = perturbed_initial(sw);
    RealVector out(sw.dimension());
    sw.full_rhs(u, out);
    CHECK(std::abs(sw.mass(out)) <= 1e-12 * sw.mass(u));
  }
}

TEST_CASE("Jacobian against directional central differences") {
  ShallowWater sw(9, 11);
  const RealVector u = perturbed_initial(sw);
  const BandedMatrix j = sw.jacobian(u);
  for (int trial = 0; trial < 5; ++trial) {
    RealVector v(sw.dimension());
    for (auto& x : v) x = oracle::uniform();
    const double e = 1e-6;
    RealVector up(u), um(u), fp(u.size()), fm(u.size());
    for (std::size_t k = 0; k < u.size(); ++k) up[k] += e * v[k], um[k] -= e * v[k];
    sw.full_rhs(up, fp);
    sw.full_rhs(um, fm);
    const RealVector jv = j.multiply(v);
    double err = 0.0, scale = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) {
      err = std::max(err, std::abs(jv[k] - (fp[k] - fm[k]) / (2 * e)));
      scale = std::max(scale, std::abs(jv[k]));
    }
    CHECK(err <= 1e-6 * scale);
  }
}

TEST_CASE("property: mirror symmetry in x") {
  ShallowWater sw(12, 10);
  RealVector u(sw.dimension());
  for (std::size_t j = 0; j <= sw.ny(); ++j)
    for (std::size_t i = 0; i <= sw.nx(); ++i) {
      const double x = sw.x(i), y = sw.y(j);
      u[sw.index(i, j, 0)] = 1.0 + std::exp(-(x * x + (y - 0.5) * (y - 0.5)));
      u[sw.index(i, j, 1)] = 0.1 * x * std::exp(-x * x);
      u[sw.index(i, j, 2)] = 0.05 * std::cos(x) * std::sin(y);
    }
  RealVector out(sw.dimension());
  sw.full_rhs(u, out);
  double err = 0.0;
  for (std::size_t j = 0; j <= sw.ny(); ++j)
    for (std::size_t i = 0; i <= sw.nx(); ++i) {
      const std::size_t m = sw.nx() - i;
      err = std::max(err, std::abs(out[sw.index(i, j, 0)] - out[sw.index(m, j, 0)]));
      err = std::max(err, std::abs(out[sw.index(i, j, 1)] + out[sw.index(m, j, 1)]));
      err = std::max(err, std::abs(out[sw.index(i, j, 2)] - out[sw.index(m, j, 2)]));
    }
  CHECK(err <= 1e-12);
}

TEST_CASE("spatial operator is second order in the interior") {
  std::vector<double> hs, errs;
  for (std::size_t n : {24u, 48u, 96u}) {
    ShallowWater sw(n, n, kG);
    const RealVector u = manufactured(sw);
    RealVector out(sw.dimension());
    sw.full_rhs(u, out);
    double err = 0.0;
    for (std::size_t j = 0; j <= n; ++j)
      for (std::size_t i = 0; i <= n; ++i) {
        if (std::abs(sw.x(i)) > 2.0 || std::abs(sw.y(j)) > 2.0) continue;
        double ex[3];
        exact_rhs(sw.x(i), sw.y(j), ex);
        for (std::size_t c = 0; c < 3; ++c) err = std::max(err, std::abs(out[sw.index(i, j, c)] - ex[c]));
      }
    hs.push_back(sw.dx());
    errs.push_back(err);
  }
  for (std::size_t k = 0; k + 1 < hs.size(); ++k) {
    const double order = std::log(errs[k] / errs[k + 1]) / std::log(hs[k] / hs[k + 1]);
    CHECK(order >= 1.7);
    CHECK(order <= 2.3);
  }
}

TEST_CASE("split sums to the full right-hand side") {
  ShallowWater sw(8, 9);
  const RealVector u = perturbed_initial(sw);
  RealVector f(u.size()), g(u.size()), full(u.size()), sum(u.size());
  sw.f(0.0, u, f);
  sw.g(0.0, u, g);
  sw.full_rhs(u, full);
  for (std::size_t k = 0; k < u.size(); ++k) sum[k] = f[k] + g[k];
  CHECK(oracle::max_diff(sum, full) <= 1e-12 * std::max(1.0, max_abs(full)));
}

TEST_CASE("banded Jacobian and stage solve against dense") {
  ShallowWater sw(8, 8);
  const RealVector u = perturbed_initial(sw);
  CHECK(sw.refreeze(0.0, u));
  const BandedMatrix& j = sw.frozen_jacobian();
  const RealMatrix dense = j.to_dense();
  RealVector v(sw.dimension());
  for (auto& x : v) x = oracle::uniform();
  CHECK(oracle::max_diff(j.multiply(v), dense * v) <= 1e-10 * max_abs(dense));

  const double ha = 0.037;
  RealMatrix sys = RealMatrix::identity(sw.dimension());
  for (std::size_t r = 0; r < sys.rows(); ++r)
    for (std::size_t c = 0; c < sys.cols(); ++c) sys(r, c) -= ha * dense(r, c);
  const RealVector expect = lu_solve(sys, v);
  RealVector y(sw.dimension());
  sw.solve_affine_stage(0.0, ha, v, y);
  CHECK(oracle::max_diff(y, expect) <= 1e-9 * max_abs(expect));
  // a second call with a different ha rebuilds the factor
  sw.solve_affine_stage(0.0, 2 * ha, v, y);
  RealVector g(sw.dimension());
  sw.g(0.0, y, g);
  for (std::size_t k = 0; k < y.size(); ++k) CHECK(std::abs(y[k] - 2 * ha * g[k] - v[k]) <= 1e-10);
}

TEST_CASE("Jacobian coupling stays within the declared band") {
  ShallowWater sw(8, 10);
  const RealVector u = perturbed_initial(sw);
  const RealMatrix dense = sw.jacobian(u).to_dense();
  // perturbing one node changes only its 3x3 node neighbourhood
  const std::size_t k = sw.index(4, 5, 1);
  RealVector up(u), base(u.size()), pert(u.size());
  up[k] += 1e-3;
  sw.full_rhs(u, base);
  sw.full_rhs(up, pert);
  for (std::size_t r = 0; r < u.size(); ++r) {
    const std::size_t d = r > k ? r - k : k - r;
    if (d > sw.bandwidth()) {
      CHECK(pert[r] == base[r]);
      CHECK(dense(r, k) == 0.0);
    }
  }
}

TEST_CASE("construction and output") {
  CHECK_THROWS_AS(ShallowWater(7, 20), ValidationError);
  CHECK_THROWS_AS(ShallowWater(20, 4), ValidationError);
  CHECK_THROWS_AS(ShallowWater(8, 8, -1.0), ValidationError);
  ShallowWater sw(8, 8);
  RealVector u = sw.initial_state();
  u[sw.index(2, 2, 0)] = -5.0;
  RealVector out(u.size());
  CHECK_THROWS_AS(sw.full_rhs(u, out), NumericalError);
  std::ostringstream os;
  sw.write_csv(os, sw.initial_state());
  std::string line;
  std::size_t lines = 0;
  std::istringstream is(os.str());
  std::getline(is, line);
  CHECK(line == "x,y,h,uh,vh");
  while (std::getline(is, line)) ++lines;
  CHECK(lines == 81);
}
