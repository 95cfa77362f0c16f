#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace mwq {

using complex = std::complex<double>;

/// d^n with overflow detection. Throws ResourceError when the result does not fit in 64 bits.
inline std::uint64_t checked_pow(std::uint64_t d, std::uint64_t n) {
  std::uint64_t out = 1;
  for (std::uint64_t i = 0; i < n; ++i) {
    if (d != 0 && out > std::numeric_limits<std::uint64_t>::max() / d) {
      throw ResourceError("dimension " + std::to_string(d) + "^" + std::to_string(n) +
                          " overflows 64 bits");
    }
    out *= d;
  }
  return out;
}

/// Normalized pure state of n distinguishable d-level particles.
///
/// Amplitudes are indexed over the product basis with site 0 as the most
/// significant base-d digit: index = b_0 d^{n-1} + b_1 d^{n-2} + ... + b_{n-1}.
class PureState {
public:
  /// Takes ownership of `amplitudes`. Throws DimensionError if the length is not d^n and
  /// DomainError if the squared norm differs from 1 by more than `norm_tolerance(N)`.
  PureState(std::size_t n, std::size_t d, std::vector<complex> amplitudes)
      : n_(n), d_(d), amplitudes_(std::move(amplitudes)) {
    if (n_ < 1) throw DomainError("PureState needs at least one particle");
    if (d_ < 1) throw DomainError("PureState needs local dimension >= 1");
    if (amplitudes_.size() != checked_pow(d_, n_)) {
      throw DimensionError("amplitude vector has length " + std::to_string(amplitudes_.size()) +
                           ", expected d^n = " + std::to_string(checked_pow(d_, n_)));
    }
    const double dev = std::abs(squared_norm(amplitudes_) - 1.0);
    if (!(dev <= norm_tolerance(amplitudes_.size()))) {
      throw DomainError("state is not normalized (|norm^2 - 1| = " + std::to_string(dev) + ")");
    }
  }

  /// Rescales `amplitudes` to unit norm before constructing. Throws DomainError on a zero vector.
  static PureState normalized(std::size_t n, std::size_t d, std::vector<complex> amplitudes) {
    const double nrm = std::sqrt(squared_norm(amplitudes));
    if (!(nrm > 0.0)) throw DomainError("cannot normalize the zero vector");
    for (auto &a : amplitudes) a /= nrm;
    return PureState(n, d, std::move(amplitudes));
  }

  std::size_t n() const noexcept { return n_; }
  std::size_t d() const noexcept { return d_; }
  std::size_t size() const noexcept { return amplitudes_.size(); }
  std::span<const complex> amplitudes() const noexcept { return amplitudes_; }
  const complex &operator[](std::size_t i) const { return amplitudes_[i]; }

  friend bool operator==(const PureState &, const PureState &) = default;

  static double squared_norm(std::span<const complex> v) {
    double s = 0.0;
    for (const auto &a : v) s += std::norm(a);
    return s;
  }

  // 1e-12 plus a roundoff allowance that grows with the number of summed terms.
  static double norm_tolerance(std::size_t size) {
    return 1e-12 + 8.0 * static_cast<double>(size) * std::numeric_limits<double>::epsilon();
  }

private:
  std::size_t n_;
  std::size_t d_;
  std::vector<complex> amplitudes_;
};

} // namespace mwq
