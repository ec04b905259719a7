#include <algorithm>
#include <cmath>

#include "imexglm/matkit.hpp"

namespace imexglm {

BandedMatrix::BandedMatrix(std::size_t n, std::size_t kl, std::size_t ku)
    : n_(n), kl_(std::min(kl, n ? n - 1 : 0)), ku_(std::min(ku, n ? n - 1 : 0)) {
  ld_ = 2 * kl_ + ku_ + 1;
  ab_.assign(ld_ * n_, 0.0);
}

double BandedMatrix::get(std::size_t i, std::size_t j) const {
  if (i >= n_ || j >= n_) throw ValidationError("BandedMatrix::get: index out of range");
  return in_band(i, j) ? slot(i, j) : 0.0;
}

void BandedMatrix::set(std::size_t i, std::size_t j, double v) {
  if (i >= n_ || j >= n_ || !in_band(i, j))
    throw ValidationError("BandedMatrix::set: position outside the band");
  slot(i, j) = v;
}

void BandedMatrix::add(std::size_t i, std::size_t j, double v) {
  if (i >= n_ || j >= n_ || !in_band(i, j))
    throw ValidationError("BandedMatrix::add: position outside the band");
  slot(i, j) += v;
}

void BandedMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  if (x.size() != n_ || y.size() != n_) throw ValidationError("BandedMatrix::multiply: size mismatch");
  for (std::size_t i = 0; i < n_; ++i) {
    const std::size_t j0 = i > kl_ ? i - kl_ : 0;
    const std::size_t j1 = std::min(n_ - 1, i + ku_);
    double acc = 0.0;
    for (std::size_t j = j0; j <= j1; ++j) acc += slot(i, j) * x[j];
    y[i] = acc;
  }
}

RealVector BandedMatrix::multiply(std::span<const double> x) const {
  RealVector y(n_);
  multiply(x, y);
  return y;
}

BandedMatrix BandedMatrix::shifted_identity(double scale) const {
  BandedMatrix out(n_, kl_, ku_);
  for (std::size_t k = 0; k < ab_.size(); ++k) out.ab_[k] = scale * ab_[k];
  for (std::size_t i = 0; i < n_; ++i) out.slot(i, i) += 1.0;
  return out;
}

RealMatrix BandedMatrix::to_dense() const {
  RealMatrix d(n_, n_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j)
      if (in_band(i, j)) d(i, j) = slot(i, j);
  return d;
}

double BandedMatrix::max_abs_entry() const {
  double m = 0.0;
  for (double v : ab_) m = std::max(m, std::abs(v));
  return m;
}

BandedLu::BandedLu(BandedMatrix a) : a_(std::move(a)), piv_(a_.n_) {
  const std::size_t n = a_.n_, kl = a_.kl_, ku = a_.ku_;
  const std::size_t kv = kl + ku;
  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    const std::size_t j0 = i > kl ? i - kl : 0;
    for (std::size_t j = j0; j <= std::min(n - 1, i + ku); ++j) s += std::abs(a_.slot(i, j));
    scale = std::max(scale, s);
  }
  const double tol = kPivotTolerance * (scale > 0.0 ? scale : 1.0);
  auto at = [&](std::size_t r, std::size_t c) -> double& { return a_.ab_[c * a_.ld_ + (kv + r - c)]; };

  std::size_t ju = 0;
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t km = std::min(kl, n - 1 - j);
    std::size_t jp = 0;
    double best = std::abs(at(j, j));
    for (std::size_t i = 1; i <= km; ++i) {
      const double v = std::abs(at(j + i, j));
      if (v > best) {
        best = v;
        jp = i;
      }
    }
    piv_[j] = j + jp;
    if (!(best > tol)) throw SingularMatrixError("banded_lu: pivot below tolerance");
    ju = std::max(ju, std::min(j + ku + jp, n - 1));
    if (jp != 0)
      for (std::size_t c = j; c <= ju; ++c) std::swap(at(j, c), at(j + jp, c));
    const double inv = 1.0 / at(j, j);
    for (std::size_t i = 1; i <= km; ++i) at(j + i, j) *= inv;
    for (std::size_t c = j + 1; c <= ju; ++c) {
      const double u = at(j, c);
      if (u == 0.0) continue;
      for (std::size_t i = 1; i <= km; ++i) at(j + i, c) -= at(j + i, j) * u;
    }
  }
}

void BandedLu::solve_in_place(std::span<double> b) const {
  const std::size_t n = a_.n_, kl = a_.kl_, ku = a_.ku_;
  const std::size_t kv = kl + ku;
  if (b.size() != n) throw ValidationError("banded_solve: rhs size mismatch");
  auto at = [&](std::size_t r, std::size_t c) { return a_.ab_[c * a_.ld_ + (kv + r - c)]; };
  for (std::size_t j = 0; j < n; ++j) {
    if (piv_[j] != j) std::swap(b[j], b[piv_[j]]);
    const std::size_t km = std::min(kl, n - 1 - j);
    const double bj = b[j];
    if (bj == 0.0) continue;
    for (std::size_t i = 1; i <= km; ++i) b[j + i] -= at(j + i, j) * bj;
  }
  for (std::size_t j = n; j-- > 0;) {
    b[j] /= at(j, j);
    const double bj = b[j];
    if (bj == 0.0) continue;
    const std::size_t i0 = j > kv ? j - kv : 0;
    for (std::size_t i = i0; i < j; ++i) b[i] -= at(i, j) * bj;
  }
}

RealVector BandedLu::solve(std::span<const double> b) const {
  RealVector x(b.begin(), b.end());
  solve_in_place(x);
  return x;
}

}  // namespace imexglm
