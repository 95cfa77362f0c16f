#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"
#include "pure_state.hpp"

namespace mwq {

/// Dense complex matrix, row-major.
class ComplexMatrix {
public:
  ComplexMatrix() = default;

  ComplexMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, complex{0.0, 0.0}) {}

  ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<complex> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) {
      throw DimensionError("matrix data has " + std::to_string(data_.size()) +
                           " entries, expected " + std::to_string(rows_ * cols_));
    }
  }

  /// Row-wise literal, e.g. ComplexMatrix{{1, 0}, {0, 1}}.
  ComplexMatrix(std::initializer_list<std::initializer_list<complex>> rows) {
    rows_ = rows.size();
    cols_ = rows_ ? rows.begin()->size() : 0;
    data_.reserve(rows_ * cols_);
    for (const auto &r : rows) {
      if (r.size() != cols_) throw DimensionError("ragged matrix literal");
      data_.insert(data_.end(), r.begin(), r.end());
    }
  }

  static ComplexMatrix zeros(std::size_t rows, std::size_t cols) { return {rows, cols}; }

  static ComplexMatrix identity(std::size_t dim) {
    ComplexMatrix m(dim, dim);
    for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
    return m;
  }

  static ComplexMatrix diagonal(std::span<const complex> diag) {
    ComplexMatrix m(diag.size(), diag.size());
    for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
    return m;
  }

  static ComplexMatrix diagonal(std::initializer_list<complex> diag) {
    return diagonal(std::span<const complex>(diag.begin(), diag.size()));
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool is_square() const noexcept { return rows_ == cols_; }
  std::span<const complex> data() const noexcept { return data_; }

  complex &operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const complex &operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  ComplexMatrix adjoint() const {
    ComplexMatrix out(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) out(j, i) = std::conj((*this)(i, j));
    return out;
  }

  ComplexMatrix &operator+=(const ComplexMatrix &o) {
    require_same_shape(o, "+");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
  }

  ComplexMatrix &operator-=(const ComplexMatrix &o) {
    require_same_shape(o, "-");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
  }

  ComplexMatrix &operator*=(complex s) {
    for (auto &x : data_) x *= s;
    return *this;
  }

  friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix &b) { return a += b; }
  friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix &b) { return a -= b; }
  friend ComplexMatrix operator*(ComplexMatrix a, complex s) { return a *= s; }
  friend ComplexMatrix operator*(complex s, ComplexMatrix a) { return a *= s; }

  friend ComplexMatrix operator*(const ComplexMatrix &a, const ComplexMatrix &b) {
    if (a.cols_ != b.rows_) {
      throw DimensionError("cannot multiply " + a.shape() + " by " + b.shape());
    }
    ComplexMatrix out(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i) {
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const complex aik = a(i, k);
        if (aik == complex{}) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) out(i, j) += aik * b(k, j);
      }
    }
    return out;
  }

  friend bool operator==(const ComplexMatrix &, const ComplexMatrix &) = default;

  std::string shape() const { return std::to_string(rows_) + "x" + std::to_string(cols_); }

private:
  void require_same_shape(const ComplexMatrix &o, const char *op) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) {
      throw DimensionError(std::string("shape mismatch in ") + op + ": " + shape() + " vs " +
                           o.shape());
    }
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<complex> data_;
};

inline void require_square(const ComplexMatrix &a, const char *what) {
  if (!a.is_square()) throw DimensionError(std::string(what) + " needs a square matrix, got " + a.shape());
}

inline complex trace(const ComplexMatrix &a) {
  require_square(a, "trace");
  complex t{};
  for (std::size_t i = 0; i < a.rows(); ++i) t += a(i, i);
  return t;
}

/// Tr(AB) without forming the product.
inline complex trace_of_product(const ComplexMatrix &a, const ComplexMatrix &b) {
  if (a.rows() != b.cols() || a.cols() != b.rows()) {
    throw DimensionError("trace_of_product: " + a.shape() + " and " + b.shape());
  }
  complex t{};
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) t += a(i, k) * b(k, i);
  return t;
}

/// Largest entrywise modulus of A - B.
inline double max_abs_diff(const ComplexMatrix &a, const ComplexMatrix &b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError("max_abs_diff: " + a.shape() + " vs " + b.shape());
  }
  double m = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  return m;
}

/// max |A_ij - conj(A_ji)|; 0 for exactly Hermitian input.
inline double hermiticity_defect(const ComplexMatrix &a) {
  require_square(a, "hermiticity_defect");
  double m = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = i; j < a.cols(); ++j) m = std::max(m, std::abs(a(i, j) - std::conj(a(j, i))));
  return m;
}

inline bool is_hermitian(const ComplexMatrix &a, double tol = 1e-12) {
  return a.is_square() && hermiticity_defect(a) <= tol;
}

/// (A + A^dagger) / 2
inline ComplexMatrix hermitian_part(const ComplexMatrix &a) {
  require_square(a, "hermitian_part");
  ComplexMatrix out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = 0.5 * (a(i, j) + std::conj(a(j, i)));
  return out;
}

/// Second elementary symmetric polynomial of the spectrum, ((Tr A)^2 - Tr A^2) / 2,
/// evaluated from traces only so rank-deficient inputs need no eigensolver.
inline complex f2(const ComplexMatrix &a) {
  require_square(a, "f2");
  const complex t = trace(a);
  return 0.5 * (t * t - trace_of_product(a, a));
}

inline ComplexMatrix kron(const ComplexMatrix &a, const ComplexMatrix &b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const complex aij = a(i, j);
      if (aij == complex{}) continue;
      for (std::size_t k = 0; k < b.rows(); ++k)
        for (std::size_t l = 0; l < b.cols(); ++l) out(i * b.rows() + k, j * b.cols() + l) = aij * b(k, l);
    }
  return out;
}

/// Two-particle exchange on C^d (x) C^d: |i>|j> -> |j>|i>.
inline ComplexMatrix swap_operator(std::size_t d) {
  if (d < 1) throw DomainError("swap_operator needs d >= 1");
  ComplexMatrix s(d * d, d * d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) s(j * d + i, i * d + j) = 1.0;
  return s;
}

struct PartialTraceOptions {
  /// Replace the result by its Hermitian part. Disabling this exists for fault-injection self-tests.
  bool symmetrize = true;
};

/// Single-site reduced density matrix rho_k, computed directly from the amplitudes.
///
/// With stride s = d^{n-1-k}, amplitude index = outer * (d s) + b_k * s + inner, and
/// (rho_k)_{ab} = sum_{outer, inner} psi[outer, a, inner] conj(psi[outer, b, inner]).
/// O(d^2 d^{n-1}) time, O(d^2) extra memory.
inline ComplexMatrix partial_trace_single_site(const PureState &psi, std::size_t k,
                                               PartialTraceOptions opts = {}) {
  if (k >= psi.n()) {
    throw IndexError("site " + std::to_string(k) + " out of range for n = " + std::to_string(psi.n()));
  }
  const std::size_t d = psi.d();
  const std::size_t stride = checked_pow(d, psi.n() - 1 - k);
  const std::size_t block = d * stride;
  const std::size_t outer_count = psi.size() / block;
  const auto amp = psi.amplitudes();

  ComplexMatrix rho(d, d);
  for (std::size_t a = 0; a < d; ++a) {
    for (std::size_t b = 0; b < d; ++b) {
      complex acc{};
      for (std::size_t outer = 0; outer < outer_count; ++outer) {
        const complex *pa = amp.data() + outer * block + a * stride;
        const complex *pb = amp.data() + outer * block + b * stride;
        for (std::size_t inner = 0; inner < stride; ++inner) acc += pa[inner] * std::conj(pb[inner]);
      }
      rho(a, b) = acc;
    }
  }
  return opts.symmetrize ? hermitian_part(rho) : rho;
}

/// All single-site RDMs, in site order.
inline std::vector<ComplexMatrix> single_site_rdms(const PureState &psi, PartialTraceOptions opts = {}) {
  std::vector<ComplexMatrix> out;
  out.reserve(psi.n());
  for (std::size_t k = 0; k < psi.n(); ++k) out.push_back(partial_trace_single_site(psi, k, opts));
  return out;
}

} // namespace mwq
