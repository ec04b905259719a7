#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "imexglm/stability.hpp"

namespace imexglm {

/// Scan parameters for stability regions in the z0 plane. An unset alpha
/// everywhere below means the explicit region S_E (z1 = 0 only).
struct ScanSettings {
  double x_min = -6.0, x_max = 1.0;  // raster rectangle
  double y_min = -4.0, y_max = 4.0;
  double delta = 0.02;               // cell size
  double y_extent = 8.0;             // sector samples y in [-y_extent, y_extent]
  double y_step = 0.05;
  bool tail = true;                  // extra geometric y samples beyond y_extent
  bool refine = true;                // golden-section search near the worst y
  bool stiff_limit = true;           // require the z1 -> -inf limit to be stable
  double tol = 1e-8;                 // ray bisection tolerance on | max|w| - 1 |
  double ray_extent = 50.0;          // search interval length along each ray
  double ray_y_step = 0.25;          // y seeds for the per-ray minimization

  void validate() const;
};

/// Sector-boundary parameters y checked for membership in S_alpha: 0 first,
/// then the uniform grid, then the tail samples.
std::vector<double> sector_samples(const ScanSettings& settings);

/// Pointwise membership test for S_alpha (or S_E), reusing one evaluator.
class RegionTester {
 public:
  RegionTester(const ImexScheme& scheme, std::optional<double> alpha, const ScanSettings& settings);

  bool contains(Complex z0);
  /// Largest root modulus over all checked z1, and the y where it occurs.
  double worst_modulus(Complex z0, double* y_worst = nullptr);
  bool limit_stable() const { return limit_ok_; }

 private:
  double modulus_at(Complex z0, double y);
  double refine_max(Complex z0, double y_center);

  StabilityEvaluator eval_;
  std::optional<double> alpha_;
  ScanSettings settings_;
  std::vector<double> ys_;
  std::size_t grid_end_ = 0;  // ys_[0..grid_end_) are the uniform grid (plus 0)
  std::size_t last_fail_ = 0;
  bool limit_ok_ = true;
};

struct RegionResult {
  std::optional<double> alpha;
  double area = 0.0;
  std::size_t stable_cells = 0;
  std::size_t nx = 0, ny = 0;
  bool truncated = false;        // a stable cell touches the rectangle edge
  double limit_modulus = 0.0;    // stiff-limit spectral radius (S_alpha only)
  std::vector<std::uint8_t> raster;  // ny x nx, row 0 at y_min; empty unless requested
  ScanSettings settings;
};

/// Area of S_alpha (or S_E) by counting cells of the raster rectangle whose
/// centres pass RegionTester::contains. Rows are spread over worker threads;
/// the result does not depend on the worker count.
RegionResult region_area(const ImexScheme& scheme, std::optional<double> alpha, const ScanSettings& settings,
                         bool keep_raster = false, std::size_t workers = 0);

/// Distance rho along the ray z0 = rho e^{i psi} to the boundary of the
/// region stable for the fixed z1, by bisection on [0, extent]. Returns 0
/// when the region does not extend along the ray. Throws NumericalError if
/// the far end of the interval is still stable.
double ray_radius(StabilityEvaluator& eval, double psi, Complex z1, double extent, double tol);

/// Ray function x0 = f(m, alpha, y): intersection of the
/// ray Im z0 = m Re z0, Re z0 < 0, with the boundary of S_{alpha,y}.
double ray_intersection(const ImexScheme& scheme, double m, std::optional<double> alpha, double y,
                        const ScanSettings& settings = {});

struct BoundaryPoint {
  double psi = 0.0;
  double radius = 0.0;
  Complex z0;
  double y_worst = 0.0;  // minimizing sector parameter
};

/// Boundary of S_alpha along `rays` directions psi = 2 pi k / rays:
/// radius = min over y of ray_radius, from a y-grid seed refined by golden
/// section.
std::vector<BoundaryPoint> s_alpha_boundary(const ImexScheme& scheme, std::optional<double> alpha, std::size_t rays,
                                            const ScanSettings& settings = {}, std::size_t workers = 0);

/// z0 roots of p(e^{i theta}, z0, z1) for theta sampled on [0, 2 k pi),
/// z1 = sector_z1(alpha, y) (or 0 without alpha).
std::vector<Complex> boundary_locus(const ImexScheme& scheme, std::optional<double> alpha, double y,
                                    std::size_t theta_samples, int k = 1);

/// Coefficients (ascending in z0) of det(L(w) - z0 K(w)), a polynomial of
/// degree at most s whose zeros are those of p(w, z0, z1) in z0.
Polynomial locus_polynomial(const ImexScheme& scheme, Complex w, Complex z1);

/// Shoelace area of a closed polygon.
double polygon_area(const std::vector<Complex>& vertices);

}  // namespace imexglm
