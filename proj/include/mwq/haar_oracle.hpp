#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <vector>

#include "entanglement.hpp"
#include "errors.hpp"
#include "symmetry.hpp"

namespace mwq::haar {

/// Finite-size factor (1 - d^{1-n}) / (1 + d^{-n}) shared by every Haar-averaged term.
inline double correction_factor(std::size_t n, std::size_t d) {
  if (n < 1) throw DomainError("n must be >= 1");
  if (d < 2) throw DomainError("d must be >= 2");
  const double dd = static_cast<double>(d);
  const double nn = static_cast<double>(n);
  return (1.0 - std::pow(dd, 1.0 - nn)) / (1.0 + std::pow(dd, -nn));
}

/// Haar mean of Q_alpha: d_a (d_a - 1) / (d (d - 1)) times the correction factor.
inline double expected_q_sector(std::size_t n, std::size_t d, std::size_t d_alpha) {
  if (n < 2) throw DomainError("n must be >= 2");
  if (d_alpha < 1 || d_alpha > d) throw DomainError("need 1 <= d_alpha <= d");
  const double da = static_cast<double>(d_alpha);
  const double dd = static_cast<double>(d);
  return da * (da - 1.0) / (dd * (dd - 1.0)) * correction_factor(n, d);
}

/// Haar mean of Q_{alpha beta}: 2 d_a d_b / (d (d - 1)) times the correction factor.
inline double expected_q_interference(std::size_t n, std::size_t d, std::size_t d_alpha, std::size_t d_beta) {
  if (n < 2) throw DomainError("n must be >= 2");
  if (d_alpha < 1 || d_beta < 1 || d_alpha + d_beta > d) throw DomainError("need d_alpha, d_beta >= 1 and d_alpha + d_beta <= d");
  const double dd = static_cast<double>(d);
  return 2.0 * double(d_alpha) * double(d_beta) / (dd * (dd - 1.0)) * correction_factor(n, d);
}

struct HaarPrediction {
  std::size_t n = 0;
  std::size_t d = 0;
  ChargePartition partition;
  std::vector<double> q_sector_theory;
  std::map<SectorPair, double> q_interference_theory;
  double correction_factor = 0.0;

  double total() const {
    double s = 0.0;
    for (double q : q_sector_theory) s += q;
    for (const auto &[pair, q] : q_interference_theory) s += q;
    return s;
  }
};

inline HaarPrediction predict(std::size_t n, const ChargePartition &partition) {
  const std::size_t d = partition.d();
  HaarPrediction out{n, d, partition, {}, {}, correction_factor(n, d)};
  for (const auto &s : partition.sectors()) out.q_sector_theory.push_back(expected_q_sector(n, d, s.dim));
  for (std::size_t a = 0; a < partition.size(); ++a)
    for (std::size_t b = a + 1; b < partition.size(); ++b)
      out.q_interference_theory[{a, b}] = expected_q_interference(n, d, partition[a].dim, partition[b].dim);
  return out;
}

/// Sum of all sector and interference predictions. Equals correction_factor(n, d) for every partition.
inline double expected_q_total(std::size_t n, const ChargePartition &partition) { return predict(n, partition).total(); }

inline double expected_q_total(std::size_t n, std::size_t d, const ChargePartition &partition) {
  if (partition.d() != d) throw DomainError("partition " + partition.to_string() + " does not sum to d = " + std::to_string(d));
  return expected_q_total(n, partition);
}

} // namespace mwq::haar
