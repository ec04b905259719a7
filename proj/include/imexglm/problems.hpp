#pragma once

#include <memory>
#include <span>
#include <string>

#include "imexglm/matkit.hpp"

namespace imexglm {

/// Split initial-value problem y' = f(t, y) + g(t, y): f is integrated
/// explicitly, g implicitly.
class SplitProblem {
 public:
  virtual ~SplitProblem() = default;

  virtual std::string name() const = 0;
  virtual std::size_t dimension() const = 0;
  virtual double t0() const = 0;
  virtual double tf() const = 0;
  virtual RealVector initial_state() const = 0;

  virtual void f(double t, std::span<const double> y, std::span<double> out) = 0;
  virtual void g(double t, std::span<const double> y, std::span<double> out) = 0;

  /// True when g(t, y) = J y + c(t) with J independent of y (between refreezes).
  virtual bool g_is_affine() const { return false; }
  /// Solves Y - ha g(t, Y) = rhs for affine g.
  virtual void solve_affine_stage(double t, double ha, std::span<const double> rhs, std::span<double> y);
  /// Jacobian of g, used by the modified Newton iteration for non-affine g.
  /// The default is a one-sided finite difference stored with full bandwidth.
  virtual BandedMatrix g_jacobian(double t, std::span<const double> y);

  /// Called at the start of every step with the current solution estimate.
  /// Returns true if the split changed, in which case stored f values must
  /// be recomputed.
  virtual bool refreeze(double /*t*/, std::span<const double> /*y*/) { return false; }

  virtual bool has_exact() const { return false; }
  virtual RealVector exact(double t) const;
  /// k-th time derivative of the exact solution.
  virtual bool has_derivatives() const { return false; }
  virtual RealVector derivative(int k, double t) const;

  /// Full right-hand side f + g.
  void rhs(double t, std::span<const double> y, std::span<double> out);
};

/// Prothero-Robinson problem y' = mu (y - phi(t)) + phi'(t) with phi = sin.
/// By default the stiff term mu (y - phi) is g and the forcing phi' is f;
/// with forcing_in_g both are in g and f = 0.
class ProtheroRobinson : public SplitProblem {
 public:
  ProtheroRobinson(double mu, double t0, double tf, bool forcing_in_g = false);

  std::string name() const override { return "prothero_robinson"; }
  std::size_t dimension() const override { return 1; }
  double t0() const override { return t0_; }
  double tf() const override { return tf_; }
  RealVector initial_state() const override;
  void f(double t, std::span<const double> y, std::span<double> out) override;
  void g(double t, std::span<const double> y, std::span<double> out) override;
  bool g_is_affine() const override { return true; }
  void solve_affine_stage(double t, double ha, std::span<const double> rhs, std::span<double> y) override;
  bool has_exact() const override { return true; }
  RealVector exact(double t) const override;
  bool has_derivatives() const override { return true; }
  RealVector derivative(int k, double t) const override;

  double mu() const { return mu_; }

 private:
  double mu_, t0_, tf_;
  bool forcing_in_g_;
};

/// Two-rate linear test y' = lambda0 y + lambda1 y with complex rates,
/// stored as (Re y, Im y). f = lambda0 y, g = lambda1 y.
class LinearSplit : public SplitProblem {
 public:
  LinearSplit(Complex lambda0, Complex lambda1, Complex y0, double t0 = 0.0, double tf = 1.0);

  std::string name() const override { return "linear"; }
  std::size_t dimension() const override { return 2; }
  double t0() const override { return t0_; }
  double tf() const override { return tf_; }
  RealVector initial_state() const override { return {y0_.real(), y0_.imag()}; }
  void f(double t, std::span<const double> y, std::span<double> out) override;
  void g(double t, std::span<const double> y, std::span<double> out) override;
  bool g_is_affine() const override { return true; }
  void solve_affine_stage(double t, double ha, std::span<const double> rhs, std::span<double> y) override;
  bool has_exact() const override { return true; }
  RealVector exact(double t) const override;
  bool has_derivatives() const override { return true; }
  RealVector derivative(int k, double t) const override;

 private:
  Complex l0_, l1_, y0_;
  double t0_, tf_;
};

/// The same right-hand side with everything moved into f (g = 0), so that
/// an IMEX scheme reduces to its explicit part.
class UnsplitView : public SplitProblem {
 public:
  explicit UnsplitView(SplitProblem& base) : base_(base) {}

  std::string name() const override { return base_.name() + "_unsplit"; }
  std::size_t dimension() const override { return base_.dimension(); }
  double t0() const override { return base_.t0(); }
  double tf() const override { return base_.tf(); }
  RealVector initial_state() const override { return base_.initial_state(); }
  void f(double t, std::span<const double> y, std::span<double> out) override;
  void g(double t, std::span<const double> y, std::span<double> out) override;
  bool g_is_affine() const override { return true; }
  void solve_affine_stage(double t, double ha, std::span<const double> rhs, std::span<double> y) override;
  bool has_exact() const override { return base_.has_exact(); }
  RealVector exact(double t) const override { return base_.exact(t); }
  bool has_derivatives() const override { return base_.has_derivatives(); }
  RealVector derivative(int k, double t) const override { return base_.derivative(k, t); }

 private:
  SplitProblem& base_;
};

std::unique_ptr<ProtheroRobinson> prothero_robinson(double mu, double t0 = 0.0, double tf = 10.0,
                                                    bool forcing_in_g = false);
std::unique_ptr<LinearSplit> linear_split(Complex lambda0, Complex lambda1, Complex y0, double t0 = 0.0,
                                          double tf = 1.0);

}  // namespace imexglm
