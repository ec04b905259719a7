#include "imexglm/problems.hpp"

#include <algorithm>
#include <cmath>

namespace imexglm {

void SplitProblem::solve_affine_stage(double, double, std::span<const double>, std::span<double>) {
  throw ValidationError(name() + ": no affine stage solver");
}

BandedMatrix SplitProblem::g_jacobian(double t, std::span<const double> y) {
  const std::size_t n = dimension();
  BandedMatrix j(n, n ? n - 1 : 0, n ? n - 1 : 0);
  RealVector base(n), pert(n), yp(y.begin(), y.end());
  g(t, y, base);
  for (std::size_t c = 0; c < n; ++c) {
    const double eps = 1e-7 * std::max(1.0, std::abs(y[c]));
    yp[c] = y[c] + eps;
    g(t, yp, pert);
    yp[c] = y[c];
    for (std::size_t r = 0; r < n; ++r) j.set(r, c, (pert[r] - base[r]) / eps);
  }
  return j;
}

RealVector SplitProblem::exact(double) const { throw ValidationError(name() + ": no exact solution"); }

RealVector SplitProblem::derivative(int, double) const {
  throw ValidationError(name() + ": no derivative oracle");
}

void SplitProblem::rhs(double t, std::span<const double> y, std::span<double> out) {
  RealVector tmp(y.size());
  f(t, y, out);
  g(t, y, tmp);
  for (std::size_t i = 0; i < y.size(); ++i) out[i] += tmp[i];
}

ProtheroRobinson::ProtheroRobinson(double mu, double t0, double tf, bool forcing_in_g)
    : mu_(mu), t0_(t0), tf_(tf), forcing_in_g_(forcing_in_g) {
  if (!(mu < 0.0)) throw ValidationError("prothero_robinson: mu must be negative");
  if (!(tf > t0)) throw ValidationError("prothero_robinson: need tf > t0");
}

RealVector ProtheroRobinson::initial_state() const { return {std::sin(t0_)}; }

void ProtheroRobinson::f(double t, std::span<const double>, std::span<double> out) {
  out[0] = forcing_in_g_ ? 0.0 : std::cos(t);
}

void ProtheroRobinson::g(double t, std::span<const double> y, std::span<double> out) {
  out[0] = mu_ * (y[0] - std::sin(t)) + (forcing_in_g_ ? std::cos(t) : 0.0);
}

void ProtheroRobinson::solve_affine_stage(double t, double ha, std::span<const double> rhs, std::span<double> y) {
  const double c = -mu_ * std::sin(t) + (forcing_in_g_ ? std::cos(t) : 0.0);
  y[0] = (rhs[0] + ha * c) / (1.0 - ha * mu_);
}

RealVector ProtheroRobinson::exact(double t) const { return {std::sin(t)}; }

RealVector ProtheroRobinson::derivative(int k, double t) const {
  switch (((k % 4) + 4) % 4) {
    case 0: return {std::sin(t)};
    case 1: return {std::cos(t)};
    case 2: return {-std::sin(t)};
    default: return {-std::cos(t)};
  }
}

LinearSplit::LinearSplit(Complex lambda0, Complex lambda1, Complex y0, double t0, double tf)
    : l0_(lambda0), l1_(lambda1), y0_(y0), t0_(t0), tf_(tf) {
  if (!(tf > t0)) throw ValidationError("linear_split: need tf > t0");
}

void LinearSplit::f(double, std::span<const double> y, std::span<double> out) {
  const Complex v = l0_ * Complex(y[0], y[1]);
  out[0] = v.real();
  out[1] = v.imag();
}

void LinearSplit::g(double, std::span<const double> y, std::span<double> out) {
  const Complex v = l1_ * Complex(y[0], y[1]);
  out[0] = v.real();
  out[1] = v.imag();
}

void LinearSplit::solve_affine_stage(double, double ha, std::span<const double> rhs, std::span<double> y) {
  const Complex d = 1.0 - ha * l1_;
  if (std::abs(d) == 0.0) throw SingularMatrixError("linear_split: singular stage equation");
  const Complex v = Complex(rhs[0], rhs[1]) / d;
  y[0] = v.real();
  y[1] = v.imag();
}

RealVector LinearSplit::exact(double t) const {
  const Complex v = y0_ * std::exp((l0_ + l1_) * (t - t0_));
  return {v.real(), v.imag()};
}

RealVector LinearSplit::derivative(int k, double t) const {
  const Complex v = std::pow(l0_ + l1_, k) * y0_ * std::exp((l0_ + l1_) * (t - t0_));
  return {v.real(), v.imag()};
}

void UnsplitView::f(double t, std::span<const double> y, std::span<double> out) { base_.rhs(t, y, out); }

void UnsplitView::g(double, std::span<const double>, std::span<double> out) {
  std::fill(out.begin(), out.end(), 0.0);
}

void UnsplitView::solve_affine_stage(double, double, std::span<const double> rhs, std::span<double> y) {
  std::copy(rhs.begin(), rhs.end(), y.begin());
}

std::unique_ptr<ProtheroRobinson> prothero_robinson(double mu, double t0, double tf, bool forcing_in_g) {
  return std::make_unique<ProtheroRobinson>(mu, t0, tf, forcing_in_g);
}

std::unique_ptr<LinearSplit> linear_split(Complex lambda0, Complex lambda1, Complex y0, double t0, double tf) {
  return std::make_unique<LinearSplit>(lambda0, lambda1, y0, t0, tf);
}

}  // namespace imexglm
