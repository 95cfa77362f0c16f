#pragma once

// Independent reference computations. None of these share code paths with the
// production kernels they are compared against; they favour obviousness over speed.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "linalg.hpp"
#include "pure_state.hpp"

namespace mwq::oracle {

/// Base-d digits of `index`, site 0 first.
inline std::vector<std::size_t> digits(std::uint64_t index, std::size_t n, std::size_t d) {
  std::vector<std::size_t> out(n);
  for (std::size_t s = n; s-- > 0;) {
    out[s] = index % d;
    index /= d;
  }
  return out;
}

/// Forms the full N x N density matrix and sums over every basis pair that agrees
/// on all sites except k.
inline ComplexMatrix brute_force_rdm(const PureState &psi, std::size_t k) {
  const std::size_t N = psi.size();
  const std::size_t d = psi.d();
  ComplexMatrix full(N, N);
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) full(i, j) = psi[i] * std::conj(psi[j]);

  ComplexMatrix rho(d, d);
  for (std::size_t i = 0; i < N; ++i) {
    const auto di = digits(i, psi.n(), d);
    for (std::size_t j = 0; j < N; ++j) {
      const auto dj = digits(j, psi.n(), d);
      bool same_env = true;
      for (std::size_t s = 0; s < psi.n() && same_env; ++s)
        if (s != k && di[s] != dj[s]) same_env = false;
      if (same_env) rho(di[k], dj[k]) += full(i, j);
    }
  }
  return rho;
}

/// Eigenvalues of a Hermitian matrix by cyclic complex Jacobi rotations.
inline std::vector<double> hermitian_eigenvalues(ComplexMatrix a, double tol = 1e-15) {
  const std::size_t n = a.rows();
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += std::norm(a(p, q));
    if (std::sqrt(off) < tol) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const complex apq = a(p, q);
        if (std::abs(apq) < 1e-300) continue;
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        // Phase-rotate so the off-diagonal element is real, then apply a real Jacobi rotation.
        const complex phase = apq / std::abs(apq);
        const double theta = 0.5 * std::atan2(2.0 * std::abs(apq), aqq - app);
        const double c = std::cos(theta);
        const double s = std::sin(theta);
        // Columns p, q of the unitary: J = [[c, s*phase], [-s*conj(phase), c]] acting on (p, q).
        ComplexMatrix j = ComplexMatrix::identity(n);
        j(p, p) = c;
        j(q, q) = c;
        j(p, q) = s * phase;
        j(q, p) = -s * std::conj(phase);
        a = j.adjoint() * a * j;
      }
    }
  }
  std::vector<double> ev(n);
  for (std::size_t i = 0; i < n; ++i) ev[i] = a(i, i).real();
  std::sort(ev.begin(), ev.end());
  return ev;
}

/// sum_{i<j} lambda_i lambda_j from an explicit spectrum.
inline double pairwise_eigen_products(const std::vector<double> &ev) {
  double s = 0.0;
  for (std::size_t i = 0; i < ev.size(); ++i)
    for (std::size_t j = i + 1; j < ev.size(); ++j) s += ev[i] * ev[j];
  return s;
}

/// sum_{i in block a, j in block b} |rho_ij|^2 for contiguous diagonal sector blocks.
inline double cross_block_weight(const ComplexMatrix &rho, std::size_t a_begin, std::size_t a_len, std::size_t b_begin,
                                 std::size_t b_len) {
  double s = 0.0;
  for (std::size_t i = a_begin; i < a_begin + a_len; ++i)
    for (std::size_t j = b_begin; j < b_begin + b_len; ++j) s += std::norm(rho(i, j));
  return s;
}

/// Exact rational p/q with reduced terms.
struct Fraction {
  std::int64_t num = 0;
  std::int64_t den = 1;

  Fraction(std::int64_t n = 0, std::int64_t d = 1) : num(n), den(d) {
    if (den < 0) {
      num = -num;
      den = -den;
    }
    const auto g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
  }
  friend Fraction operator*(Fraction a, Fraction b) { return {a.num * b.num, a.den * b.den}; }
  friend Fraction operator+(Fraction a, Fraction b) { return {a.num * b.den + b.num * a.den, a.den * b.den}; }
  friend bool operator==(const Fraction &, const Fraction &) = default;
  double value() const { return double(num) / double(den); }
};

inline std::int64_t ipow(std::int64_t b, std::size_t e) {
  std::int64_t r = 1;
  while (e--) r *= b;
  return r;
}

/// Haar mean of Q_alpha in exact arithmetic: d_a(d_a-1)/(d(d-1)) * (d^n - d)/(d^n + 1).
inline Fraction exact_q_sector(std::size_t n, std::size_t d, std::size_t da) {
  const auto D = static_cast<std::int64_t>(d);
  const auto A = static_cast<std::int64_t>(da);
  return Fraction(A * (A - 1), D * (D - 1)) * Fraction(ipow(D, n) - D, ipow(D, n) + 1);
}

/// Haar mean of Q_{alpha beta} in exact arithmetic: 2 d_a d_b/(d(d-1)) * (d^n - d)/(d^n + 1).
inline Fraction exact_q_interference(std::size_t n, std::size_t d, std::size_t da, std::size_t db) {
  const auto D = static_cast<std::int64_t>(d);
  return Fraction(2 * std::int64_t(da) * std::int64_t(db), D * (D - 1)) * Fraction(ipow(D, n) - D, ipow(D, n) + 1);
}

} // namespace mwq::oracle
