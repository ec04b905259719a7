#include "imexglm/region.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "imexglm/parallel.hpp"

namespace imexglm {

namespace {

constexpr double kInvPhi = 0.6180339887498949;
constexpr int kGoldenSteps = 20;

Complex z1_for(std::optional<double> alpha, double y) { return alpha ? sector_z1(*alpha, y) : Complex{}; }

}  // namespace

void ScanSettings::validate() const {
  if (!(x_max > x_min) || !(y_max > y_min)) throw ValidationError("scan: empty rectangle");
  if (!(delta > 0.0)) throw ValidationError("scan: delta must be positive");
  if (!(y_extent >= 0.0) || !(y_step > 0.0) || !(ray_y_step > 0.0))
    throw ValidationError("scan: y sampling must be positive");
  if (!(tol > 0.0)) throw ValidationError("scan: tol must be positive");
  if (!(ray_extent > 0.0)) throw ValidationError("scan: ray extent must be positive");
}

std::vector<double> sector_samples(const ScanSettings& st) {
  std::vector<double> ys{0.0};
  const auto n = static_cast<long>(std::floor(st.y_extent / st.y_step + 1e-9));
  for (long k = 1; k <= n; ++k) {
    ys.push_back(k * st.y_step);
    ys.push_back(-k * st.y_step);
  }
  if (st.tail) {
    const double start = std::max(st.y_extent, 1.0);
    for (double y = start * 1.5; y <= 1e4; y *= 1.5) {
      ys.push_back(y);
      ys.push_back(-y);
    }
  }
  return ys;
}

RegionTester::RegionTester(const ImexScheme& scheme, std::optional<double> alpha, const ScanSettings& st)
    : eval_(scheme), alpha_(alpha), settings_(st) {
  settings_.validate();
  if (alpha_) {
    ys_ = sector_samples(settings_);
    const auto n = static_cast<std::size_t>(std::floor(st.y_extent / st.y_step + 1e-9));
    grid_end_ = 1 + 2 * n;
    if (settings_.stiff_limit) limit_ok_ = stiff_limit_modulus(scheme) < 1.0;
  } else {
    ys_ = {0.0};
    grid_end_ = 1;
  }
}

double RegionTester::modulus_at(Complex z0, double y) { return eval_.max_modulus(z0, z1_for(alpha_, y)); }

double RegionTester::refine_max(Complex z0, double yc) {
  double a = yc - settings_.y_step, b = yc + settings_.y_step;
  double x1 = b - kInvPhi * (b - a), x2 = a + kInvPhi * (b - a);
  double f1 = modulus_at(z0, x1), f2 = modulus_at(z0, x2);
  double best = std::max(f1, f2);
  for (int it = 0; it < kGoldenSteps && best < 1.0; ++it) {
    if (f1 > f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kInvPhi * (b - a);
      f1 = modulus_at(z0, x1);
      best = std::max(best, f1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvPhi * (b - a);
      f2 = modulus_at(z0, x2);
      best = std::max(best, f2);
    }
  }
  return best;
}

bool RegionTester::contains(Complex z0) {
  if (!limit_ok_) return false;
  if (modulus_at(z0, ys_[last_fail_]) >= 1.0) return false;
  double worst = -1.0;
  double y_worst = 0.0;
  for (std::size_t k = 0; k < ys_.size(); ++k) {
    const double m = modulus_at(z0, ys_[k]);
    if (!(m < 1.0)) {
      last_fail_ = k;
      return false;
    }
    if (k < grid_end_ && m > worst) {
      worst = m;
      y_worst = ys_[k];
    }
  }
  if (alpha_ && settings_.refine && refine_max(z0, y_worst) >= 1.0) return false;
  return true;
}

double RegionTester::worst_modulus(Complex z0, double* y_worst) {
  double worst = -1.0;
  double yw = 0.0;
  for (double y : ys_) {
    const double m = modulus_at(z0, y);
    if (m > worst) {
      worst = m;
      yw = y;
    }
  }
  if (y_worst) *y_worst = yw;
  return worst;
}

RegionResult region_area(const ImexScheme& scheme, std::optional<double> alpha, const ScanSettings& st,
                         bool keep_raster, std::size_t workers) {
  st.validate();
  RegionResult res;
  res.alpha = alpha;
  res.settings = st;
  res.nx = static_cast<std::size_t>(std::lround((st.x_max - st.x_min) / st.delta));
  res.ny = static_cast<std::size_t>(std::lround((st.y_max - st.y_min) / st.delta));
  if (res.nx == 0 || res.ny == 0) throw ValidationError("scan: rectangle smaller than one cell");
  const double dx = (st.x_max - st.x_min) / static_cast<double>(res.nx);
  const double dy = (st.y_max - st.y_min) / static_cast<double>(res.ny);
  if (alpha) res.limit_modulus = stiff_limit_modulus(scheme);

  // Real coefficients: the region is symmetric about the real axis, and so
  // is the sample set in y, so a symmetric rectangle needs only its top half.
  const bool symmetric = std::abs(st.y_min + st.y_max) <= 1e-12 * (st.y_max - st.y_min) && res.ny % 2 == 0;
  const std::size_t row0 = symmetric ? res.ny / 2 : 0;
  const std::size_t nrows = res.ny - row0;

  if (workers == 0) workers = worker_count();
  std::vector<RegionTester> testers;
  testers.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) testers.emplace_back(scheme, alpha, st);

  std::vector<std::uint8_t> cells(res.ny * res.nx, 0);
  parallel_for(
      nrows,
      [&](std::size_t k, std::size_t w) {
        const std::size_t j = row0 + k;
        const double y = st.y_min + (static_cast<double>(j) + 0.5) * dy;
        for (std::size_t i = 0; i < res.nx; ++i) {
          const double x = st.x_min + (static_cast<double>(i) + 0.5) * dx;
          cells[j * res.nx + i] = testers[w].contains({x, y}) ? 1 : 0;
        }
      },
      workers);
  if (symmetric)
    for (std::size_t j = 0; j < row0; ++j)
      for (std::size_t i = 0; i < res.nx; ++i) cells[j * res.nx + i] = cells[(res.ny - 1 - j) * res.nx + i];

  for (std::size_t j = 0; j < res.ny; ++j)
    for (std::size_t i = 0; i < res.nx; ++i) {
      if (!cells[j * res.nx + i]) continue;
      ++res.stable_cells;
      if (i == 0 || j == 0 || i + 1 == res.nx || j + 1 == res.ny) res.truncated = true;
    }
  res.area = static_cast<double>(res.stable_cells) * dx * dy;
  if (keep_raster) res.raster = std::move(cells);
  return res;
}

double ray_radius(StabilityEvaluator& eval, double psi, Complex z1, double extent, double tol) {
  const Complex dir = std::polar(1.0, psi);
  if (eval.max_modulus(extent * dir, z1) < 1.0)
    throw NumericalError("ray_radius: still stable at distance " + std::to_string(extent) +
                         "; enlarge the search interval");
  double lo = 0.0, hi = extent;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double g = eval.max_modulus(mid * dir, z1);
    if (std::abs(g - 1.0) <= tol) return mid;
    if (g < 1.0)
      lo = mid;
    else
      hi = mid;
    if (hi - lo <= 1e-14 * extent) break;
  }
  return lo;
}

double ray_intersection(const ImexScheme& scheme, double m, std::optional<double> alpha, double y,
                        const ScanSettings& st) {
  StabilityEvaluator eval(scheme);
  const double psi = std::numbers::pi + std::atan(m);
  const double rho = ray_radius(eval, psi, z1_for(alpha, y), st.ray_extent, st.tol);
  return rho * std::cos(psi);
}

std::vector<BoundaryPoint> s_alpha_boundary(const ImexScheme& scheme, std::optional<double> alpha, std::size_t rays,
                                            const ScanSettings& st, std::size_t workers) {
  st.validate();
  if (rays == 0) throw ValidationError("s_alpha_boundary: need at least one ray");
  const bool limit_ok = !alpha || !st.stiff_limit || stiff_limit_modulus(scheme) < 1.0;

  std::vector<double> seeds{0.0};
  std::vector<double> tail;
  if (alpha) {
    const auto n = static_cast<long>(std::floor(st.y_extent / st.ray_y_step + 1e-9));
    for (long k = 1; k <= n; ++k) {
      seeds.push_back(k * st.ray_y_step);
      seeds.push_back(-k * st.ray_y_step);
    }
    if (st.tail)
      for (double y = std::max(st.y_extent, 1.0) * 1.5; y <= 1e4; y *= 1.5) {
        tail.push_back(y);
        tail.push_back(-y);
      }
  }

  if (workers == 0) workers = worker_count();
  std::vector<StabilityEvaluator> evals;
  evals.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) evals.emplace_back(scheme);

  std::vector<BoundaryPoint> out(rays);
  parallel_for(
      rays,
      [&](std::size_t k, std::size_t w) {
        BoundaryPoint& bp = out[k];
        bp.psi = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(rays);
        if (!limit_ok) return;
        auto& ev = evals[w];
        // S_{alpha,y} may be unbounded along this ray for some y; only the minimum matters.
        auto rho = [&](double y) {
          const Complex z1 = z1_for(alpha, y);
          if (ev.max_modulus(std::polar(st.ray_extent, bp.psi), z1) < 1.0) return std::numeric_limits<double>::infinity();
          return ray_radius(ev, bp.psi, z1, st.ray_extent, st.tol);
        };
        double best = std::numeric_limits<double>::infinity();
        double y_best = 0.0;
        for (double y : seeds) {
          const double r = rho(y);
          if (r < best) {
            best = r;
            y_best = y;
          }
        }
        if (alpha && best > 0.0) {
          double a = y_best - st.ray_y_step, b = y_best + st.ray_y_step;
          double x1 = b - kInvPhi * (b - a), x2 = a + kInvPhi * (b - a);
          double f1 = rho(x1), f2 = rho(x2);
          for (int it = 0; it < kGoldenSteps; ++it) {
            if (f1 < f2) {
              b = x2;
              x2 = x1;
              f2 = f1;
              x1 = b - kInvPhi * (b - a);
              f1 = rho(x1);
            } else {
              a = x1;
              x1 = x2;
              f1 = f2;
              x2 = a + kInvPhi * (b - a);
              f2 = rho(x2);
            }
          }
          if (f1 < best) {
            best = f1;
            y_best = x1;
          }
          if (f2 < best) {
            best = f2;
            y_best = x2;
          }
          for (double y : tail) {
            const double r = rho(y);
            if (r < best) {
              best = r;
              y_best = y;
            }
          }
        }
        if (!std::isfinite(best))
          throw NumericalError("s_alpha_boundary: region extends beyond ray_extent at psi = " + std::to_string(bp.psi));
        bp.radius = best;
        bp.y_worst = y_best;
        bp.z0 = std::polar(best, bp.psi);
      },
      workers);
  return out;
}

Polynomial locus_polynomial(const ImexScheme& sc, Complex w, Complex z1) {
  const std::size_t s = sc.s(), r = sc.r(), n = s + r;
  const std::size_t nodes = n + 1;
  ComplexVector values(nodes);
  for (std::size_t j = 0; j < nodes; ++j) {
    const Complex z0 = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(nodes));
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < s; ++i) {
      for (std::size_t k = 0; k < s; ++k) {
        Complex v = -w * z1 * sc.base.A(i, k) - z0 * (sc.abar(i, k) + w * sc.astar(i, k));
        if (i == k) v += w;
        m(i, k) = v;
      }
      for (std::size_t k = 0; k < r; ++k) m(i, s + k) = -sc.base.U(i, k);
    }
    for (std::size_t i = 0; i < r; ++i) {
      for (std::size_t k = 0; k < s; ++k)
        m(s + i, k) = -w * z1 * sc.base.B(i, k) - z0 * (sc.bbar(i, k) + w * sc.bstar(i, k));
      for (std::size_t k = 0; k < r; ++k) m(s + i, s + k) = (i == k ? w : Complex{}) - sc.base.V(i, k);
    }
    values[j] = determinant(m);
  }
  // Values at the roots of unity -> monomial coefficients by a discrete Fourier transform.
  ComplexVector coeffs(nodes);
  for (std::size_t k = 0; k < nodes; ++k) {
    Complex acc{};
    for (std::size_t j = 0; j < nodes; ++j)
      acc += values[j] * std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(j * k) /
                                             static_cast<double>(nodes));
    coeffs[k] = acc / static_cast<double>(nodes);
  }
  return Polynomial(std::move(coeffs)).trimmed_relative(1e-10);
}

std::vector<Complex> boundary_locus(const ImexScheme& scheme, std::optional<double> alpha, double y,
                                    std::size_t theta_samples, int k) {
  if (theta_samples < 64) throw ValidationError("boundary_locus: need at least 64 theta samples");
  if (k < 1) throw ValidationError("boundary_locus: k must be positive");
  const Complex z1 = z1_for(alpha, y);
  std::vector<Complex> out;
  for (std::size_t j = 0; j < theta_samples; ++j) {
    const double theta = 2.0 * std::numbers::pi * k * static_cast<double>(j) / static_cast<double>(theta_samples);
    const Polynomial p = locus_polynomial(scheme, std::polar(1.0, theta), z1);
    if (p.degree() < 1) continue;
    for (const Complex& z : poly_roots(p)) out.push_back(z);
  }
  return out;
}

double polygon_area(const std::vector<Complex>& v) {
  double acc = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Complex& a = v[i];
    const Complex& b = v[(i + 1) % v.size()];
    acc += a.real() * b.imag() - b.real() * a.imag();
  }
  return 0.5 * std::abs(acc);
}

}  // namespace imexglm
