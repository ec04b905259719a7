#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "imexglm/matkit.hpp"

namespace imexglm {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Horner evaluation of p, p' and the running bound sum |a_i| |z|^i.
struct HornerResult {
  Complex value;
  Complex slope;
  double bound;
};

HornerResult horner(std::span<const Complex> a, Complex z) {
  const std::size_t n = a.size() - 1;
  Complex p = a[n];
  Complex dp{};
  const double az = std::abs(z);
  double bound = std::abs(a[n]);
  for (std::size_t i = n; i-- > 0;) {
    dp = dp * z + p;
    p = p * z + a[i];
    bound = bound * az + std::abs(a[i]);
  }
  return {p, dp, bound};
}

}  // namespace

Polynomial::Polynomial(ComplexVector ascending) : coeffs_(std::move(ascending)) {
  if (coeffs_.empty()) coeffs_.push_back(0.0);
  trim();
}

void Polynomial::trim() {
  while (coeffs_.size() > 1 && std::abs(coeffs_.back()) <= kTrimThreshold) coeffs_.pop_back();
}

Polynomial Polynomial::from_roots(std::span<const Complex> roots) {
  ComplexVector c{1.0};
  for (const auto& r : roots) {
    ComplexVector next(c.size() + 1);
    for (std::size_t i = 0; i < c.size(); ++i) {
      next[i + 1] += c[i];
      next[i] -= r * c[i];
    }
    c = std::move(next);
  }
  return Polynomial(std::move(c));
}

Complex Polynomial::operator()(Complex z) const {
  Complex p = coeffs_.back();
  for (std::size_t i = coeffs_.size() - 1; i-- > 0;) p = p * z + coeffs_[i];
  return p;
}

Polynomial Polynomial::derivative() const {
  if (coeffs_.size() <= 1) return Polynomial();
  ComplexVector d(coeffs_.size() - 1);
  for (std::size_t i = 1; i < coeffs_.size(); ++i) d[i - 1] = coeffs_[i] * static_cast<double>(i);
  return Polynomial(std::move(d));
}

Polynomial Polynomial::monic() const {
  ComplexVector c = coeffs_;
  const Complex lead = c.back();
  for (auto& v : c) v /= lead;
  return Polynomial(std::move(c));
}

Polynomial Polynomial::trimmed_relative(double rel) const {
  const double scale = max_abs(coeffs_);
  ComplexVector c = coeffs_;
  while (c.size() > 1 && std::abs(c.back()) <= rel * scale) c.pop_back();
  return Polynomial(std::move(c));
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  ComplexVector c(a.coeffs_.size() + b.coeffs_.size() - 1);
  for (std::size_t i = 0; i < a.coeffs_.size(); ++i)
    for (std::size_t j = 0; j < b.coeffs_.size(); ++j) c[i + j] += a.coeffs_[i] * b.coeffs_[j];
  return Polynomial(std::move(c));
}

Polynomial operator+(const Polynomial& a, const Polynomial& b) {
  ComplexVector c(std::max(a.coeffs_.size(), b.coeffs_.size()));
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = a[i] + b[i];
  return Polynomial(std::move(c));
}

void poly_roots_into(std::span<const Complex> ascending, std::span<Complex> roots, bool warm_start,
                     const RootOptions& opts) {
  // Exact zero roots are split off first; they are common (w^s factors).
  std::size_t zeros = 0;
  while (zeros + 1 < ascending.size() && ascending[zeros] == Complex{}) ++zeros;
  for (std::size_t i = 0; i < zeros; ++i) roots[i] = 0.0;
  const auto a = ascending.subspan(zeros);
  auto z = roots.subspan(zeros);
  const std::size_t n = a.size() - 1;
  if (n == 0) return;
  if (a[n] == Complex{}) throw ValidationError("poly_roots: leading coefficient is zero");
  if (n == 1) {
    z[0] = -a[0] / a[1];
    return;
  }

  if (!warm_start || zeros > 0) {
    // Start on a circle whose radius is the geometric mean of the root moduli.
    double radius = std::pow(std::abs(a[0] / a[n]), 1.0 / static_cast<double>(n));
    if (!(radius > 0.0) || !std::isfinite(radius)) radius = 1.0;
    const double two_pi = 2.0 * std::numbers::pi;
    for (std::size_t k = 0; k < n; ++k) {
      const double angle = two_pi * static_cast<double>(k) / static_cast<double>(n) + 0.4;
      z[k] = std::polar(radius, angle);
    }
  } else {
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t j = 0; j < k; ++j)
        if (std::abs(z[k] - z[j]) <= 1e-12 * (1.0 + std::abs(z[k])))
          z[k] += Complex(1e-6 * (1.0 + std::abs(z[k])), 1e-6 * static_cast<double>(k + 1));
  }

  constexpr std::size_t kMaxDegree = 64;
  bool done[kMaxDegree] = {};
  if (n > kMaxDegree) throw ValidationError("poly_roots: degree too large");

  std::size_t remaining = n;
  int sweep = 0;
  for (; sweep < opts.max_sweeps && remaining > 0; ++sweep) {
    for (std::size_t k = 0; k < n; ++k) {
      if (done[k]) continue;
      const auto h = horner(a, z[k]);
      if (std::abs(h.value) <= 8.0 * kEps * h.bound) {
        done[k] = true;
        --remaining;
        continue;
      }
      const Complex ratio = h.value / h.slope;
      Complex sum{};
      for (std::size_t j = 0; j < n; ++j)
        if (j != k) sum += 1.0 / (z[k] - z[j]);
      const Complex step = ratio / (1.0 - ratio * sum);
      if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) {
        z[k] += Complex(1e-8, 1e-8) * (1.0 + std::abs(z[k]));
        continue;
      }
      z[k] -= step;
      if (std::abs(step) <= 2.0 * kEps * std::abs(z[k])) {
        done[k] = true;
        --remaining;
      }
    }
  }
  if (remaining > 0)
    throw ConvergenceError("poly_roots: Aberth iteration did not converge after " +
                           std::to_string(sweep) + " sweeps");

  for (int it = 0; it < opts.polish_steps; ++it) {
    for (std::size_t k = 0; k < n; ++k) {
      const auto h = horner(a, z[k]);
      if (h.slope == Complex{}) continue;
      const Complex cand = z[k] - h.value / h.slope;
      if (std::abs(horner(a, cand).value) < std::abs(h.value)) z[k] = cand;
    }
  }
}

ComplexVector poly_roots(const Polynomial& p, const RootOptions& opts) {
  if (p.degree() < 1) throw ValidationError("poly_roots: degree must be at least 1");
  ComplexVector roots(static_cast<std::size_t>(p.degree()));
  poly_roots_into(p.coefficients(), roots, false, opts);
  return roots;
}

}  // namespace imexglm
