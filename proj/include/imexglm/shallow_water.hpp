#pragma once

#include <memory>
#include <optional>
#include <ostream>

#include "imexglm/problems.hpp"

namespace imexglm {

/// 2-D shallow-water equations on [-3, 3]^2 with reflective walls,
/// semi-discretized on the (nx+1) x (ny+1) node grid. State layout: node
/// (i, j) holds (h, uh, vh) at 3 (j (nx+1) + i) + {0, 1, 2}.
///
/// Spatial operator: two-step flux form. Each half cell (i+1/2, j+1/2) gets
/// the average of its four corner nodes, fluxes are evaluated there, and
/// node derivatives are central differences of those fluxes. Walls are
/// handled by mirror ghost nodes with the normal momentum negated.
///
/// Split: g(U) = J U and f(U) = F(U) - J U with J a finite-difference
/// Jacobian of F, refrozen at the start of every step.
class ShallowWater : public SplitProblem {
 public:
  ShallowWater(std::size_t nx, std::size_t ny, double gravity = 9.81, double t0 = 0.0, double tf = 1.0);

  std::string name() const override { return "shallow_water"; }
  std::size_t dimension() const override { return 3 * (nx_ + 1) * (ny_ + 1); }
  double t0() const override { return t0_; }
  double tf() const override { return tf_; }
  RealVector initial_state() const override;

  void f(double t, std::span<const double> y, std::span<double> out) override;
  void g(double t, std::span<const double> y, std::span<double> out) override;
  bool g_is_affine() const override { return true; }
  void solve_affine_stage(double t, double ha, std::span<const double> rhs, std::span<double> y) override;
  bool refreeze(double t, std::span<const double> y) override;

  /// Unsplit semi-discrete right-hand side F(U).
  void full_rhs(std::span<const double> u, std::span<double> out) const;
  /// Finite-difference Jacobian of F at u with column grouping (27 groups).
  BandedMatrix jacobian(std::span<const double> u) const;
  /// Jacobian currently used by the split (computed at the initial state
  /// until the first refreeze).
  const BandedMatrix& frozen_jacobian();

  std::size_t nx() const { return nx_; }
  std::size_t ny() const { return ny_; }
  double dx() const { return 6.0 / static_cast<double>(nx_); }
  double dy() const { return 6.0 / static_cast<double>(ny_); }
  double gravity() const { return gravity_; }
  double x(std::size_t i) const { return -3.0 + static_cast<double>(i) * dx(); }
  double y(std::size_t j) const { return -3.0 + static_cast<double>(j) * dy(); }
  std::size_t index(std::size_t i, std::size_t j, std::size_t c) const { return 3 * (j * (nx_ + 1) + i) + c; }
  std::size_t bandwidth() const { return 3 * (nx_ + 2) + 2; }

  /// Total water volume with trapezoidal node weights (the quantity the
  /// flux form conserves exactly).
  double mass(std::span<const double> u) const;

  /// CSV grid dump: x,y,h,uh,vh per node.
  void write_csv(std::ostream& os, std::span<const double> u) const;

  /// Initial layer thickness 1 + exp(-|(x, y) - (1/3, 2/3)|^2).
  static double initial_height(double x, double y);

 private:
  void ensure_frozen();

  std::size_t nx_, ny_;
  double gravity_, t0_, tf_;
  BandedMatrix jac_;
  bool have_jac_ = false;
  std::optional<BandedLu> lu_;
  double lu_ha_ = 0.0;
};

std::unique_ptr<ShallowWater> shallow_water(std::size_t nx, std::size_t ny, double gravity = 9.81,
                                            double t0 = 0.0, double tf = 1.0);

}  // namespace imexglm
