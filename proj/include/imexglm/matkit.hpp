#pragma once

// Small dense and banded linear algebra, polynomials, and finite-difference
// weights. Sizes here are tiny (method tableaus, stability matrices up to
// 16x16) or banded (semi-discrete PDE Jacobians), so everything is written
// directly rather than through BLAS.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "imexglm/errors.hpp"

namespace imexglm {

using Complex = std::complex<double>;
using RealVector = std::vector<double>;
using ComplexVector = std::vector<Complex>;

template <class T>
inline double magnitude(const T& v) {
  return std::abs(v);
}

/// Dense row-major matrix over double or std::complex<double>.
template <class T>
class Matrix {
 public:
  using value_type = T;

  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, T fill = T{})
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::initializer_list<std::initializer_list<T>> init) {
    rows_ = init.size();
    cols_ = rows_ == 0 ? 0 : init.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& row : init) {
      if (row.size() != cols_) throw ValidationError("Matrix: ragged initializer");
      data_.insert(data_.end(), row.begin(), row.end());
    }
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T{1};
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }
  bool empty() const { return data_.empty(); }

  T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<T> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const T> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }
  std::span<T> data() { return data_; }
  std::span<const T> data() const { return data_; }

  std::vector<T> column(std::size_t j) const {
    std::vector<T> out(rows_);
    for (std::size_t i = 0; i < rows_; ++i) out[i] = (*this)(i, j);
    return out;
  }

  Matrix transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  Matrix& operator+=(const Matrix& o) {
    check_same(o, "+=");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
  }
  Matrix& operator-=(const Matrix& o) {
    check_same(o, "-=");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
  }
  Matrix& operator*=(const T& s) {
    for (auto& v : data_) v *= s;
    return *this;
  }

  bool operator==(const Matrix& o) const = default;

 private:
  void check_same(const Matrix& o, const char* op) const {
    if (rows_ != o.rows_ || cols_ != o.cols_)
      throw ValidationError(std::string("Matrix ") + op + ": dimension mismatch");
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

using RealMatrix = Matrix<double>;
using ComplexMatrix = Matrix<Complex>;

template <class T>
Matrix<T> operator+(Matrix<T> a, const Matrix<T>& b) {
  return a += b;
}
template <class T>
Matrix<T> operator-(Matrix<T> a, const Matrix<T>& b) {
  return a -= b;
}
template <class T>
Matrix<T> operator*(Matrix<T> a, const T& s) {
  return a *= s;
}
template <class T>
Matrix<T> operator*(const T& s, Matrix<T> a) {
  return a *= s;
}

template <class T>
Matrix<T> operator*(const Matrix<T>& a, const Matrix<T>& b) {
  if (a.cols() != b.rows()) throw ValidationError("Matrix product: dimension mismatch");
  Matrix<T> c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const T aik = a(i, k);
      if (aik == T{}) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

template <class T>
std::vector<T> operator*(const Matrix<T>& a, std::span<const T> x) {
  if (a.cols() != x.size()) throw ValidationError("Matrix-vector product: dimension mismatch");
  std::vector<T> y(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    T acc{};
    for (std::size_t j = 0; j < a.cols(); ++j) acc += a(i, j) * x[j];
    y[i] = acc;
  }
  return y;
}
template <class T>
std::vector<T> operator*(const Matrix<T>& a, const std::vector<T>& x) {
  return a * std::span<const T>(x);
}

ComplexMatrix to_complex(const RealMatrix& a);

/// Largest absolute entry.
template <class T>
double max_abs(const Matrix<T>& a) {
  double m = 0.0;
  for (const auto& v : a.data()) m = std::max(m, magnitude(v));
  return m;
}
template <class T>
double max_abs(std::span<const T> v) {
  double m = 0.0;
  for (const auto& x : v) m = std::max(m, magnitude(x));
  return m;
}
template <class T>
double max_abs(const std::vector<T>& v) {
  return max_abs(std::span<const T>(v));
}

/// Infinity norm (max absolute row sum).
template <class T>
double norm_inf(const Matrix<T>& a) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    for (const auto& v : a.row(i)) s += magnitude(v);
    m = std::max(m, s);
  }
  return m;
}

/// Relative pivot threshold below which a matrix is declared singular.
inline constexpr double kPivotTolerance = 1e-14;

/// LU factorization with partial pivoting, PA = LU stored in place.
template <class T>
class LuFactor {
 public:
  explicit LuFactor(Matrix<T> a) : lu_(std::move(a)), perm_(lu_.rows()) {
    if (!lu_.square()) throw ValidationError("LuFactor: matrix must be square");
    const std::size_t n = lu_.rows();
    const double scale = norm_inf(lu_);
    const double tol = kPivotTolerance * (scale > 0.0 ? scale : 1.0);
    for (std::size_t i = 0; i < n; ++i) perm_[i] = i;
    for (std::size_t k = 0; k < n; ++k) {
      std::size_t piv = k;
      double best = magnitude(lu_(k, k));
      for (std::size_t i = k + 1; i < n; ++i) {
        const double v = magnitude(lu_(i, k));
        if (v > best) {
          best = v;
          piv = i;
        }
      }
      if (!(best > tol)) {
        singular_ = true;
        continue;
      }
      if (piv != k) {
        for (std::size_t j = 0; j < n; ++j) std::swap(lu_(k, j), lu_(piv, j));
        std::swap(perm_[k], perm_[piv]);
        sign_ = -sign_;
      }
      const T inv = T{1} / lu_(k, k);
      for (std::size_t i = k + 1; i < n; ++i) {
        const T l = lu_(i, k) * inv;
        lu_(i, k) = l;
        if (l == T{}) continue;
        for (std::size_t j = k + 1; j < n; ++j) lu_(i, j) -= l * lu_(k, j);
      }
    }
  }

  bool singular() const { return singular_; }
  std::size_t size() const { return lu_.rows(); }

  /// det(A) as the signed product of pivots; zero pivots give zero.
  T determinant() const {
    T d = T(sign_);
    for (std::size_t i = 0; i < lu_.rows(); ++i) d *= lu_(i, i);
    return d;
  }

  std::vector<T> solve(std::span<const T> b) const {
    if (singular_) throw SingularMatrixError("LuFactor::solve: matrix is singular to working precision");
    const std::size_t n = lu_.rows();
    if (b.size() != n) throw ValidationError("LuFactor::solve: rhs size mismatch");
    std::vector<T> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = b[perm_[i]];
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < i; ++j) x[i] -= lu_(i, j) * x[j];
    for (std::size_t ii = n; ii-- > 0;) {
      for (std::size_t j = ii + 1; j < n; ++j) x[ii] -= lu_(ii, j) * x[j];
      x[ii] /= lu_(ii, ii);
    }
    return x;
  }
  std::vector<T> solve(const std::vector<T>& b) const { return solve(std::span<const T>(b)); }

  /// Solves A X = B column by column.
  Matrix<T> solve(const Matrix<T>& b) const {
    Matrix<T> x(b.rows(), b.cols());
    for (std::size_t j = 0; j < b.cols(); ++j) {
      const auto col = solve(b.column(j));
      for (std::size_t i = 0; i < b.rows(); ++i) x(i, j) = col[i];
    }
    return x;
  }

 private:
  Matrix<T> lu_;
  std::vector<std::size_t> perm_;
  int sign_ = 1;
  bool singular_ = false;
};

template <class T>
std::vector<T> lu_solve(const Matrix<T>& a, std::span<const T> b) {
  return LuFactor<T>(a).solve(b);
}
template <class T>
std::vector<T> lu_solve(const Matrix<T>& a, const std::vector<T>& b) {
  return LuFactor<T>(a).solve(std::span<const T>(b));
}

template <class T>
T determinant(const Matrix<T>& a) {
  if (!a.square()) throw ValidationError("determinant: matrix must be square");
  if (a.rows() == 0) return T{1};
  return LuFactor<T>(a).determinant();
}

template <class T>
Matrix<T> inverse(const Matrix<T>& a) {
  return LuFactor<T>(a).solve(Matrix<T>::identity(a.rows()));
}

/// Polynomial with complex coefficients stored in ascending degree.
class Polynomial {
 public:
  /// Coefficients with |c| <= this are treated as zero when trimming the top.
  static constexpr double kTrimThreshold = 1e-300;

  Polynomial() : coeffs_{Complex{0.0}} {}
  explicit Polynomial(ComplexVector ascending);
  Polynomial(std::initializer_list<Complex> ascending) : Polynomial(ComplexVector(ascending)) {}

  static Polynomial from_roots(std::span<const Complex> roots);

  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  const ComplexVector& coefficients() const { return coeffs_; }
  Complex operator[](std::size_t k) const { return k < coeffs_.size() ? coeffs_[k] : Complex{}; }
  Complex leading() const { return coeffs_.back(); }

  Complex operator()(Complex z) const;
  Polynomial derivative() const;
  Polynomial monic() const;

  /// Drops top coefficients whose magnitude is <= rel * max|c|.
  Polynomial trimmed_relative(double rel) const;

  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator+(const Polynomial& a, const Polynomial& b);

 private:
  void trim();
  ComplexVector coeffs_;
};

/// Monic characteristic polynomial det(wI - M) by the Faddeev-LeVerrier recurrence.
inline constexpr std::size_t kMaxCharPolyDimension = 16;
Polynomial char_poly(const ComplexMatrix& m);

/// In-place Faddeev-LeVerrier on an n x n row-major block; writes n+1 ascending
/// coefficients into `out`. Workspace must hold 2*n*n entries.
void char_poly_into(std::span<const Complex> m, std::size_t n, std::span<Complex> out,
                    std::span<Complex> workspace);

struct RootOptions {
  int max_sweeps = 500;
  int polish_steps = 2;
};

/// All complex roots (with multiplicity) by Aberth-Ehrlich simultaneous
/// iteration followed by Newton polishing.
ComplexVector poly_roots(const Polynomial& p, const RootOptions& opts = {});

/// Allocation-free variant on raw ascending coefficients (leading entry nonzero).
/// `roots` must have size degree; it is used as the starting guess when
/// `warm_start` is set.
void poly_roots_into(std::span<const Complex> ascending, std::span<Complex> roots,
                     bool warm_start = false, const RootOptions& opts = {});

/// Band matrix with kl sub- and ku super-diagonals, stored LAPACK style with
/// kl extra rows reserved for fill-in during pivoted factorization.
class BandedMatrix {
 public:
  BandedMatrix() = default;
  BandedMatrix(std::size_t n, std::size_t kl, std::size_t ku);

  std::size_t size() const { return n_; }
  std::size_t lower() const { return kl_; }
  std::size_t upper() const { return ku_; }

  bool in_band(std::size_t i, std::size_t j) const {
    return i <= j + kl_ && j <= i + ku_;
  }
  /// Entry (i,j); zero outside the band.
  double get(std::size_t i, std::size_t j) const;
  /// Sets entry (i,j); throws for positions outside the band.
  void set(std::size_t i, std::size_t j, double v);
  void add(std::size_t i, std::size_t j, double v);

  /// y = this * x
  void multiply(std::span<const double> x, std::span<double> y) const;
  RealVector multiply(std::span<const double> x) const;

  /// Returns I + scale * this.
  BandedMatrix shifted_identity(double scale) const;

  RealMatrix to_dense() const;
  double max_abs_entry() const;

 private:
  friend class BandedLu;
  std::size_t row_offset() const { return kl_ + ku_; }
  double& slot(std::size_t i, std::size_t j) { return ab_[j * ld_ + (row_offset() + i - j)]; }
  double slot(std::size_t i, std::size_t j) const { return ab_[j * ld_ + (row_offset() + i - j)]; }

  std::size_t n_ = 0, kl_ = 0, ku_ = 0, ld_ = 0;
  RealVector ab_;  // column-major, ld_ = 2*kl + ku + 1 rows
};

/// Partial-pivoting LU of a band matrix (fill grows the upper band to kl+ku).
class BandedLu {
 public:
  explicit BandedLu(BandedMatrix a);
  void solve_in_place(std::span<double> b) const;
  RealVector solve(std::span<const double> b) const;
  std::size_t size() const { return a_.n_; }

 private:
  BandedMatrix a_;
  std::vector<std::size_t> piv_;
};

inline BandedLu banded_lu(BandedMatrix a) { return BandedLu(std::move(a)); }
inline RealVector banded_solve(const BandedLu& f, std::span<const double> b) { return f.solve(b); }

/// Finite-difference weights (Fornberg) for the k-th derivative at x0 from
/// values at `nodes`. Exact for polynomials of degree < nodes.size().
RealVector fd_weights(std::span<const double> nodes, int k, double x0 = 0.0);

}  // namespace imexglm
