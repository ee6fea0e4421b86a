#pragma once

// Dense complex matrices and the Hermitian spectral calculus used by the
// projection construction: Jacobi eigendecomposition, operator norm,
// T^{1/2} / T^{-1/2}, and projection residuals.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "projgen/errors.hpp"

namespace projgen {

using Complex = std::complex<double>;

/// Row-major dense complex matrix. Entries are always finite.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;

  ComplexMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), entries_(rows * cols) {}

  static ComplexMatrix zeros(std::size_t rows, std::size_t cols) {
    return ComplexMatrix(rows, cols);
  }

  static ComplexMatrix identity(std::size_t n) {
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  static ComplexMatrix from_entries(std::size_t rows, std::size_t cols,
                                    std::vector<Complex> entries) {
    if (entries.size() != rows * cols) {
      throw precondition_error("matrix entry count " + std::to_string(entries.size()) +
                               " does not match shape " + std::to_string(rows) + "x" +
                               std::to_string(cols));
    }
    for (const auto& z : entries) {
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
        throw precondition_error("matrix entries must be finite");
      }
    }
    ComplexMatrix m;
    m.rows_ = rows;
    m.cols_ = cols;
    m.entries_ = std::move(entries);
    return m;
  }

  /// Diagonal matrix from real values.
  static ComplexMatrix diagonal(std::span<const double> values) {
    ComplexMatrix m(values.size(), values.size());
    for (std::size_t i = 0; i < values.size(); ++i) m(i, i) = values[i];
    return m;
  }

  /// Matrix unit e_{ij} (0-based) of size n.
  static ComplexMatrix unit(std::size_t n, std::size_t i, std::size_t j) {
    ComplexMatrix m(n, n);
    m(i, j) = 1.0;
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool is_square() const noexcept { return rows_ == cols_; }
  bool empty() const noexcept { return entries_.empty(); }

  Complex& operator()(std::size_t i, std::size_t j) { return entries_[i * cols_ + j]; }
  const Complex& operator()(std::size_t i, std::size_t j) const {
    return entries_[i * cols_ + j];
  }

  std::span<const Complex> entries() const noexcept { return entries_; }
  std::span<Complex> entries() noexcept { return entries_; }

  ComplexMatrix adjoint() const {
    ComplexMatrix out(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) out(j, i) = std::conj((*this)(i, j));
    return out;
  }

  Complex trace() const {
    Complex t = 0.0;
    for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
    return t;
  }

  double frobenius_norm() const {
    double s = 0.0;
    for (const auto& z : entries_) s += std::norm(z);
    return std::sqrt(s);
  }

  ComplexMatrix& operator+=(const ComplexMatrix& other) {
    require_same_shape(other);
    for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] += other.entries_[i];
    return *this;
  }

  ComplexMatrix& operator-=(const ComplexMatrix& other) {
    require_same_shape(other);
    for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] -= other.entries_[i];
    return *this;
  }

  ComplexMatrix& operator*=(Complex scalar) {
    for (auto& z : entries_) z *= scalar;
    return *this;
  }

  friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
  friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
  friend ComplexMatrix operator*(ComplexMatrix a, Complex s) { return a *= s; }
  friend ComplexMatrix operator*(Complex s, ComplexMatrix a) { return a *= s; }

  friend ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.cols_ != b.rows_) {
      throw precondition_error("matrix product shape mismatch");
    }
    ComplexMatrix out(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i) {
      for (std::size_t l = 0; l < a.cols_; ++l) {
        const Complex ail = a(i, l);
        if (ail == Complex{}) continue;
        const Complex* brow = &b.entries_[l * b.cols_];
        Complex* orow = &out.entries_[i * out.cols_];
        for (std::size_t j = 0; j < b.cols_; ++j) orow[j] += ail * brow[j];
      }
    }
    return out;
  }

  friend bool operator==(const ComplexMatrix&, const ComplexMatrix&) = default;

 private:
  void require_same_shape(const ComplexMatrix& other) const {
    if (rows_ != other.rows_ || cols_ != other.cols_) {
      throw precondition_error("matrix shape mismatch");
    }
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Complex> entries_;
};

/// Trace inner product <A, B> = trace(A* B).
inline Complex trace_inner(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw precondition_error("trace inner product shape mismatch");
  }
  Complex s = 0.0;
  auto ea = a.entries();
  auto eb = b.entries();
  for (std::size_t i = 0; i < ea.size(); ++i) s += std::conj(ea[i]) * eb[i];
  return s;
}

/// Places `block` at block position (i, j) of a k x k block matrix whose
/// blocks have the size of `block`. This is block ⊗ e_ij.
inline ComplexMatrix embed_block(const ComplexMatrix& block, std::size_t i, std::size_t j,
                                 std::size_t k) {
  const std::size_t d = block.rows();
  if (!block.is_square() || i >= k || j >= k) {
    throw precondition_error("embed_block: bad block or index");
  }
  ComplexMatrix out(k * d, k * d);
  for (std::size_t r = 0; r < d; ++r)
    for (std::size_t c = 0; c < d; ++c) out(i * d + r, j * d + c) = block(r, c);
  return out;
}

/// Copies the d x d block at block position (i, j).
inline ComplexMatrix extract_block(const ComplexMatrix& m, std::size_t i, std::size_t j,
                                   std::size_t d) {
  ComplexMatrix out(d, d);
  for (std::size_t r = 0; r < d; ++r)
    for (std::size_t c = 0; c < d; ++c) out(r, c) = m(i * d + r, j * d + c);
  return out;
}

inline ComplexMatrix hermitian_part(const ComplexMatrix& h) {
  return (h + h.adjoint()) * Complex(0.5);
}

/// Eigendecomposition H = U diag(eigenvalues) U*.
struct Spectrum {
  std::vector<double> eigenvalues;  // non-decreasing
  ComplexMatrix eigenvectors;       // columns
  std::size_t source_dim = 0;

  double min() const { return eigenvalues.empty() ? 0.0 : eigenvalues.front(); }
  double max() const { return eigenvalues.empty() ? 0.0 : eigenvalues.back(); }

  /// U f(Λ) U* for a real function f applied to each eigenvalue.
  template <typename F>
  ComplexMatrix apply(F&& f) const {
    const std::size_t n = source_dim;
    ComplexMatrix scaled = eigenvectors;
    for (std::size_t j = 0; j < n; ++j) {
      const double v = f(eigenvalues[j]);
      for (std::size_t i = 0; i < n; ++i) scaled(i, j) *= v;
    }
    return scaled * eigenvectors.adjoint();
  }

  ComplexMatrix reconstruct() const {
    return apply([](double x) { return x; });
  }
};

namespace detail {

// Frobenius norm of the strictly off-diagonal part.
inline double off_diagonal_norm(const ComplexMatrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (i != j) s += std::norm(a(i, j));
  return std::sqrt(s);
}

// One complex Jacobi rotation zeroing a(p, q); accumulates into v.
inline void jacobi_rotate(ComplexMatrix& a, ComplexMatrix& v, std::size_t p, std::size_t q) {
  const std::size_t n = a.rows();
  const double apq_abs = std::abs(a(p, q));
  const Complex phase = a(p, q) / apq_abs;
  const Complex phase_conj = std::conj(phase);
  const double theta = (a(q, q).real() - a(p, p).real()) / (2.0 * apq_abs);
  double t;
  if (std::abs(theta) > 1e150) {
    t = 0.5 / theta;
  } else {
    t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
  }
  const double c = 1.0 / std::sqrt(t * t + 1.0);
  const double s = t * c;

  // A <- A J, with J = [[c, s e^{iφ}], [-s e^{-iφ}, c]] on (p, q).
  for (std::size_t r = 0; r < n; ++r) {
    const Complex arp = a(r, p);
    const Complex arq = a(r, q);
    a(r, p) = c * arp - s * phase_conj * arq;
    a(r, q) = s * phase * arp + c * arq;
  }
  // A <- J* A
  for (std::size_t col = 0; col < n; ++col) {
    const Complex apc = a(p, col);
    const Complex aqc = a(q, col);
    a(p, col) = c * apc - s * phase * aqc;
    a(q, col) = s * phase_conj * apc + c * aqc;
  }
  a(p, q) = 0.0;
  a(q, p) = 0.0;
  a(p, p) = a(p, p).real();
  a(q, q) = a(q, q).real();

  for (std::size_t r = 0; r < n; ++r) {
    const Complex vrp = v(r, p);
    const Complex vrq = v(r, q);
    v(r, p) = c * vrp - s * phase_conj * vrq;
    v(r, q) = s * phase * vrp + c * vrq;
  }
}

// Largest-magnitude entry made real nonnegative; ties go to the lowest row.
inline void fix_column_phase(ComplexMatrix& u, std::size_t col) {
  std::size_t best = 0;
  double best_abs = -1.0;
  for (std::size_t r = 0; r < u.rows(); ++r) {
    const double m = std::abs(u(r, col));
    if (m > best_abs) {
      best_abs = m;
      best = r;
    }
  }
  if (best_abs <= 0.0) return;
  const Complex rot = std::conj(u(best, col)) / best_abs;
  for (std::size_t r = 0; r < u.rows(); ++r) u(r, col) *= rot;
  u(best, col) = best_abs;
}

}  // namespace detail

inline constexpr int kJacobiMaxSweeps = 100;
inline constexpr double kJacobiRelativeThreshold = 1e-13;

/// Cyclic Jacobi eigendecomposition of a Hermitian matrix.
///
/// The input is accepted when ‖H − H*‖_F ≤ tol·‖H‖_F; its Hermitian part is
/// diagonalized. Eigenvalues come back ascending and each eigenvector has its
/// largest-magnitude component real and nonnegative, so the output is a
/// deterministic function of the input.
inline Spectrum hermitian_eig(const ComplexMatrix& h, double tol = 1e-10) {
  if (!h.is_square()) throw precondition_error("hermitian_eig: matrix is not square");
  const double scale = h.frobenius_norm();
  if ((h - h.adjoint()).frobenius_norm() > tol * scale) {
    throw precondition_error("hermitian_eig: matrix is not Hermitian within tolerance");
  }
  const std::size_t n = h.rows();
  ComplexMatrix a = hermitian_part(h);
  ComplexMatrix v = ComplexMatrix::identity(n);

  const double threshold = kJacobiRelativeThreshold * scale;
  bool converged = detail::off_diagonal_norm(a) <= threshold;
  for (int sweep = 0; sweep < kJacobiMaxSweeps && !converged; ++sweep) {
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q)
        if (a(p, q) != Complex{}) detail::jacobi_rotate(a, v, p, q);
    converged = detail::off_diagonal_norm(a) <= threshold;
  }
  if (!converged) {
    throw numerical_error("hermitian_eig: Jacobi iteration did not converge in " +
                          std::to_string(kJacobiMaxSweeps) + " sweeps");
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return a(x, x).real() < a(y, y).real();
  });

  Spectrum out;
  out.source_dim = n;
  out.eigenvalues.resize(n);
  out.eigenvectors = ComplexMatrix(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    out.eigenvalues[j] = a(order[j], order[j]).real();
    for (std::size_t i = 0; i < n; ++i) out.eigenvectors(i, j) = v(i, order[j]);
    detail::fix_column_phase(out.eigenvectors, j);
  }
  return out;
}

/// Largest singular value: sqrt of the top eigenvalue of A*A (or AA*).
inline double operator_norm(const ComplexMatrix& a) {
  if (a.empty()) return 0.0;
  const ComplexMatrix gram = a.rows() < a.cols() ? a * a.adjoint() : a.adjoint() * a;
  if (gram.frobenius_norm() == 0.0) return 0.0;
  return std::sqrt(std::max(0.0, hermitian_eig(gram).max()));
}

enum class HalfPower { sqrt, inv_sqrt };

/// T^{1/2} or T^{-1/2} through the spectral decomposition of T.
///
/// Eigenvalues in [-tol, 0] are clamped to zero for the square root. The
/// inverse square root needs every eigenvalue above tol.
inline ComplexMatrix matrix_power_half(const ComplexMatrix& t, HalfPower power,
                                       double tol = 1e-12) {
  const Spectrum spec = hermitian_eig(t);
  for (double lambda : spec.eigenvalues) {
    if (lambda < -tol) {
      throw precondition_error("matrix_power_half: matrix is not positive semidefinite (eigenvalue " +
                               std::to_string(lambda) + ")");
    }
    if (power == HalfPower::inv_sqrt && lambda <= tol) {
      throw precondition_error("matrix_power_half: matrix is not invertible (eigenvalue " +
                               std::to_string(lambda) + ")");
    }
  }
  ComplexMatrix r = spec.apply([power](double lambda) {
    const double root = std::sqrt(std::max(lambda, 0.0));
    return power == HalfPower::sqrt ? root : 1.0 / root;
  });
  return hermitian_part(r);
}

struct ProjectionResiduals {
  double self_adjointness = 0.0;  // ‖P − P*‖
  double idempotency = 0.0;       // ‖P² − P‖
  double max() const { return std::max(self_adjointness, idempotency); }
};

inline ProjectionResiduals residuals(const ComplexMatrix& p) {
  if (!p.is_square()) throw precondition_error("residuals: matrix is not square");
  return {operator_norm(p - p.adjoint()), operator_norm(p * p - p)};
}

struct SpectrumBounds {
  double min = 0.0;
  double max = 0.0;
};

inline SpectrumBounds spectrum_bounds(const ComplexMatrix& t) {
  const Spectrum spec = hermitian_eig(t);
  return {spec.min(), spec.max()};
}

}  // namespace projgen
