#include "imexglm/shallow_water.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <string>

namespace imexglm {

namespace {

struct Flux {
  double x[3];
  double y[3];
};

Flux physical_flux(double h, double uh, double vh, double grav) {
  if (!(h > 0.0)) throw NumericalError("shallow_water: nonpositive layer thickness " + std::to_string(h));
  const double u = uh / h, v = vh / h;
  const double p = 0.5 * grav * h * h;
  return {{uh, uh * u + p, uh * v}, {vh, vh * u, vh * v + p}};
}

}  // namespace

ShallowWater::ShallowWater(std::size_t nx, std::size_t ny, double gravity, double t0, double tf)
    : nx_(nx), ny_(ny), gravity_(gravity), t0_(t0), tf_(tf) {
  if (nx < 8 || ny < 8) throw ValidationError("shallow_water: need at least 8 cells per direction");
  if (!(gravity > 0.0)) throw ValidationError("shallow_water: gravity must be positive");
  if (!(tf > t0)) throw ValidationError("shallow_water: need tf > t0");
}

double ShallowWater::initial_height(double x, double y) {
  const double dx = x - 1.0 / 3.0, dy = y - 2.0 / 3.0;
  return 1.0 + std::exp(-(dx * dx + dy * dy));
}

RealVector ShallowWater::initial_state() const {
  RealVector u(dimension(), 0.0);
  for (std::size_t j = 0; j <= ny_; ++j)
    for (std::size_t i = 0; i <= nx_; ++i) u[index(i, j, 0)] = initial_height(x(i), y(j));
  return u;
}

void ShallowWater::full_rhs(std::span<const double> u, std::span<double> out) const {
  if (u.size() != dimension() || out.size() != dimension()) throw ValidationError("shallow_water: state size mismatch");
  const std::size_t ex = nx_ + 3, ey = ny_ + 3;  // nodes -1..nx, -1..ny plus ghosts
  RealVector q(3 * ex * ey);
  auto qat = [&](std::size_t a, std::size_t b, std::size_t c) -> double& { return q[3 * (b * ex + a) + c]; };
  for (std::size_t b = 0; b < ey; ++b) {
    // Mirror index and sign flips for ghost rows/columns.
    long j = static_cast<long>(b) - 1;
    bool flip_v = false;
    if (j < 0) j = 1, flip_v = true;
    if (j > static_cast<long>(ny_)) j = static_cast<long>(ny_) - 1, flip_v = true;
    for (std::size_t a = 0; a < ex; ++a) {
      long i = static_cast<long>(a) - 1;
      bool flip_u = false;
      if (i < 0) i = 1, flip_u = true;
      if (i > static_cast<long>(nx_)) i = static_cast<long>(nx_) - 1, flip_u = true;
      const std::size_t k = index(static_cast<std::size_t>(i), static_cast<std::size_t>(j), 0);
      qat(a, b, 0) = u[k];
      qat(a, b, 1) = flip_u ? -u[k + 1] : u[k + 1];
      qat(a, b, 2) = flip_v ? -u[k + 2] : u[k + 2];
    }
  }

  // Half cells (a + 1/2, b + 1/2) in extended indices, a = 0..nx+1.
  const std::size_t hx = nx_ + 2, hy = ny_ + 2;
  std::vector<Flux> fl(hx * hy);
  for (std::size_t b = 0; b < hy; ++b)
    for (std::size_t a = 0; a < hx; ++a) {
      double m[3];
      for (std::size_t c = 0; c < 3; ++c)
        m[c] = 0.25 * (qat(a, b, c) + qat(a + 1, b, c) + qat(a, b + 1, c) + qat(a + 1, b + 1, c));
      fl[b * hx + a] = physical_flux(m[0], m[1], m[2], gravity_);
    }

  const double rx = 1.0 / (2.0 * dx()), ry = 1.0 / (2.0 * dy());
  for (std::size_t j = 0; j <= ny_; ++j)
    for (std::size_t i = 0; i <= nx_; ++i) {
      // Node (i, j) is extended (i+1, j+1); its half cells are a in {i, i+1}, b in {j, j+1}.
      const Flux& sw = fl[j * hx + i];
      const Flux& se = fl[j * hx + i + 1];
      const Flux& nw = fl[(j + 1) * hx + i];
      const Flux& ne = fl[(j + 1) * hx + i + 1];
      for (std::size_t c = 0; c < 3; ++c) {
        const double ddx = (se.x[c] + ne.x[c] - sw.x[c] - nw.x[c]) * rx;
        const double ddy = (nw.y[c] + ne.y[c] - sw.y[c] - se.y[c]) * ry;
        out[index(i, j, c)] = -(ddx + ddy);
      }
    }
}

BandedMatrix ShallowWater::jacobian(std::span<const double> u) const {
  const std::size_t n = dimension();
  const std::size_t bw = bandwidth();
  BandedMatrix jac(n, bw, bw);
  RealVector base(n), pert(n), up(u.begin(), u.end());
  full_rhs(u, base);
  for (std::size_t ci = 0; ci < 3; ++ci)
    for (std::size_t cj = 0; cj < 3; ++cj)
      for (std::size_t comp = 0; comp < 3; ++comp) {
        std::copy(u.begin(), u.end(), up.begin());
        for (std::size_t j = cj; j <= ny_; j += 3)
          for (std::size_t i = ci; i <= nx_; i += 3) {
            const std::size_t k = index(i, j, comp);
            up[k] = u[k] + 1e-7 * std::max(1.0, std::abs(u[k]));
          }
        full_rhs(up, pert);
        for (std::size_t j = cj; j <= ny_; j += 3)
          for (std::size_t i = ci; i <= nx_; i += 3) {
            const std::size_t k = index(i, j, comp);
            const double eps = up[k] - u[k];
            const std::size_t i0 = i > 0 ? i - 1 : 0, i1 = std::min(nx_, i + 1);
            const std::size_t j0 = j > 0 ? j - 1 : 0, j1 = std::min(ny_, j + 1);
            for (std::size_t jj = j0; jj <= j1; ++jj)
              for (std::size_t ii = i0; ii <= i1; ++ii)
                for (std::size_t c = 0; c < 3; ++c) {
                  const std::size_t r = index(ii, jj, c);
                  jac.set(r, k, (pert[r] - base[r]) / eps);
                }
          }
      }
  return jac;
}

void ShallowWater::ensure_frozen() {
  if (!have_jac_) refreeze(t0_, initial_state());
}

const BandedMatrix& ShallowWater::frozen_jacobian() {
  ensure_frozen();
  return jac_;
}

bool ShallowWater::refreeze(double, std::span<const double> y) {
  jac_ = jacobian(y);
  have_jac_ = true;
  lu_.reset();
  return true;
}

void ShallowWater::f(double, std::span<const double> y, std::span<double> out) {
  ensure_frozen();
  full_rhs(y, out);
  const RealVector ju = jac_.multiply(y);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= ju[i];
}

void ShallowWater::g(double, std::span<const double> y, std::span<double> out) {
  ensure_frozen();
  jac_.multiply(y, out);
}

void ShallowWater::solve_affine_stage(double, double ha, std::span<const double> rhs, std::span<double> y) {
  ensure_frozen();
  if (!lu_ || lu_ha_ != ha) {
    lu_.emplace(jac_.shifted_identity(-ha));
    lu_ha_ = ha;
  }
  std::copy(rhs.begin(), rhs.end(), y.begin());
  lu_->solve_in_place(y);
}

double ShallowWater::mass(std::span<const double> u) const {
  double m = 0.0;
  for (std::size_t j = 0; j <= ny_; ++j) {
    const double wy = (j == 0 || j == ny_) ? 0.5 : 1.0;
    for (std::size_t i = 0; i <= nx_; ++i) {
      const double wx = (i == 0 || i == nx_) ? 0.5 : 1.0;
      m += wx * wy * u[index(i, j, 0)];
    }
  }
  return m * dx() * dy();
}

void ShallowWater::write_csv(std::ostream& os, std::span<const double> u) const {
  os << "x,y,h,uh,vh\n" << std::setprecision(17);
  for (std::size_t j = 0; j <= ny_; ++j)
    for (std::size_t i = 0; i <= nx_; ++i)
      os << x(i) << ',' << y(j) << ',' << u[index(i, j, 0)] << ',' << u[index(i, j, 1)] << ',' << u[index(i, j, 2)]
         << '\n';
}

std::unique_ptr<ShallowWater> shallow_water(std::size_t nx, std::size_t ny, double gravity, double t0, double tf) {
  return std::make_unique<ShallowWater>(nx, ny, gravity, t0, tf);
}

}  // namespace imexglm
