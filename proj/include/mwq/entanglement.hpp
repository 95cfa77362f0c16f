#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "linalg.hpp"
#include "pure_state.hpp"
#include "symmetry.hpp"

namespace mwq {

/// Unordered sector pair stored as (alpha, beta) with alpha < beta.
using SectorPair = std::pair<std::size_t, std::size_t>;

inline SectorPair make_sector_pair(std::size_t a, std::size_t b) {
  if (a == b) throw DomainError("interference needs two distinct sectors, got " + std::to_string(a) + " twice");
  return a < b ? SectorPair{a, b} : SectorPair{b, a};
}

/// Per-site ingredients of the decomposition, kept for inspection and validation.
struct SiteTerms {
  std::vector<double> probabilities;           // p_{k,alpha}
  std::vector<double> sector_f2;               // f2(rho_{k,alpha})
  std::map<SectorPair, double> interference_f2; // f2(rho_{k,alpha beta})
  double purity = 0.0;                         // Tr rho_k^2
};

/// Total global entanglement together with its sector and interference parts.
struct QDecomposition {
  double q_total = 0.0;
  std::vector<double> q_sector;                 // indexed by sector position
  std::map<SectorPair, double> q_interference;  // alpha < beta
  double sum_rule_residual = 0.0;               // |q_total - sum of parts|
  std::vector<SiteTerms> per_site;              // filled when requested

  double sector(std::size_t alpha) const { return q_sector.at(alpha); }
  double interference(std::size_t alpha, std::size_t beta) const {
    return q_interference.at(make_sector_pair(alpha, beta));
  }
  double sum_of_parts() const {
    double s = 0.0;
    for (double q : q_sector) s += q;
    for (const auto &[pair, q] : q_interference) s += q;
    return s;
  }
};

inline constexpr double kSumRuleTolerance = 1e-10;

/// iota_j(b): keeps the amplitudes whose j-th digit equals b and drops that digit.
/// The result is an unnormalized vector over n-1 particles.
inline std::vector<complex> iota(const PureState &psi, std::size_t j, std::size_t b) {
  if (psi.n() < 2) throw DomainError("iota needs n >= 2");
  if (j >= psi.n()) throw IndexError("site " + std::to_string(j) + " out of range");
  if (b >= psi.d()) throw IndexError("level " + std::to_string(b) + " out of range");
  const std::size_t stride = checked_pow(psi.d(), psi.n() - 1 - j);
  const std::size_t block = psi.d() * stride;
  std::vector<complex> out;
  out.reserve(psi.size() / psi.d());
  for (std::size_t outer = 0; outer < psi.size() / block; ++outer)
    for (std::size_t inner = 0; inner < stride; ++inner) out.push_back(psi[outer * block + b * stride + inner]);
  return out;
}

/// ||u ^ v||^2 = sum_{x<y} |u_x v_y - u_y v_x|^2, summed term by term (quadratic in the length).
inline double wedge_distance(std::span<const complex> u, std::span<const complex> v) {
  if (u.size() != v.size()) {
    throw DimensionError("wedge_distance: lengths " + std::to_string(u.size()) + " and " + std::to_string(v.size()));
  }
  double s = 0.0;
  for (std::size_t x = 0; x < u.size(); ++x)
    for (std::size_t y = x + 1; y < u.size(); ++y) s += std::norm(u[x] * v[y] - u[y] * v[x]);
  return s;
}

/// Original qubit form: Q = (4/n) sum_j D(iota_j(0) psi, iota_j(1) psi).
inline double q_wedge(const PureState &psi) {
  if (psi.d() != 2) {
    throw UnsupportedFormError("the wedge-product form of Q is defined for qubits only (d = " +
                               std::to_string(psi.d()) + ")");
  }
  if (psi.n() < 2) throw DomainError("Q needs n >= 2");
  double s = 0.0;
  for (std::size_t j = 0; j < psi.n(); ++j) s += wedge_distance(iota(psi, j, 0), iota(psi, j, 1));
  return 4.0 * s / static_cast<double>(psi.n());
}

/// Q = d/(d-1) * mean_k (1 - Tr rho_k^2) from precomputed single-site RDMs.
inline double q_linear_entropy(std::span<const ComplexMatrix> rdms) {
  if (rdms.size() < 2) throw DomainError("Q needs n >= 2");
  const double d = static_cast<double>(rdms.front().rows());
  double s = 0.0;
  for (const auto &rho : rdms) s += 1.0 - trace_of_product(rho, rho).real();
  return d / (d - 1.0) * s / static_cast<double>(rdms.size());
}

inline double q_linear_entropy(const PureState &psi) {
  if (psi.n() < 2) throw DomainError("Q needs n >= 2");
  if (psi.d() < 2) throw DomainError("Q needs d >= 2");
  const auto rdms = single_site_rdms(psi);
  return q_linear_entropy(rdms);
}

namespace detail {
inline void require_same_dim(const ComplexMatrix &rho, const ComplexMatrix &p, const char *what) {
  if (!rho.is_square() || !p.is_square() || rho.rows() != p.rows()) {
    throw DimensionError(std::string(what) + ": RDM " + rho.shape() + " vs projector " + p.shape());
  }
}
} // namespace detail

/// rho_{k,alpha} = P rho P
inline ComplexMatrix sector_rdm(const ComplexMatrix &rho_k, const ComplexMatrix &p) {
  detail::require_same_dim(rho_k, p, "sector_rdm");
  return p * rho_k * p;
}

/// rho_{k,alpha beta} = P_a rho P_b + P_b rho P_a. Traceless and Hermitian for Hermitian rho.
inline ComplexMatrix interference_rdm(const ComplexMatrix &rho_k, const ComplexMatrix &pa, const ComplexMatrix &pb) {
  detail::require_same_dim(rho_k, pa, "interference_rdm");
  detail::require_same_dim(rho_k, pb, "interference_rdm");
  if (pa == pb) throw DomainError("interference_rdm needs two distinct sectors");
  return pa * rho_k * pb + pb * rho_k * pa;
}

struct DecomposeOptions {
  bool keep_per_site = false;
  /// Throw ConsistencyError when |total - sum of parts| exceeds kSumRuleTolerance.
  bool enforce_sum_rule = true;
};

/// Sector/interference resolution of Q from precomputed single-site RDMs.
///
///   Q_alpha      = 2d/(d-1) mean_k f2(rho_{k,alpha})
///   Q_{alpha,beta} = 2d/(d-1) mean_k [p_{k,alpha} p_{k,beta} + f2(rho_{k,alpha beta})]
///
/// q_total is the linear-entropy value, computed independently of the parts.
inline QDecomposition decompose(std::span<const ComplexMatrix> rdms, const ProjectorFamily &fam,
                                DecomposeOptions opts = {}) {
  if (rdms.size() < 2) throw DomainError("decomposition needs n >= 2");
  const std::size_t d = fam.d();
  for (const auto &rho : rdms) {
    if (rho.rows() != d || rho.cols() != d) {
      throw DomainError("partition is for d = " + std::to_string(d) + ", RDM is " + rho.shape());
    }
  }
  const std::size_t m = fam.size();
  const double scale = 2.0 * double(d) / (double(d) - 1.0) / double(rdms.size());

  QDecomposition out;
  out.q_sector.assign(m, 0.0);
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = a + 1; b < m; ++b) out.q_interference[{a, b}] = 0.0;

  for (const auto &rho : rdms) {
    SiteTerms site;
    site.probabilities = sector_probabilities(rho, fam);
    site.purity = trace_of_product(rho, rho).real();
    for (std::size_t a = 0; a < m; ++a) {
      const double f = f2(sector_rdm(rho, fam[a])).real();
      site.sector_f2.push_back(f);
      out.q_sector[a] += f;
    }
    for (std::size_t a = 0; a < m; ++a) {
      for (std::size_t b = a + 1; b < m; ++b) {
        const double f = f2(interference_rdm(rho, fam[a], fam[b])).real();
        site.interference_f2[{a, b}] = f;
        out.q_interference[{a, b}] += site.probabilities[a] * site.probabilities[b] + f;
      }
    }
    if (opts.keep_per_site) out.per_site.push_back(std::move(site));
  }
  for (auto &q : out.q_sector) q *= scale;
  for (auto &[pair, q] : out.q_interference) q *= scale;

  out.q_total = q_linear_entropy(rdms);
  out.sum_rule_residual = std::abs(out.q_total - out.sum_of_parts());
  if (opts.enforce_sum_rule && !(out.sum_rule_residual <= kSumRuleTolerance)) {
    throw ConsistencyError("sum rule violated: |Q - (sum Q_alpha + sum Q_alpha,beta)| = " +
                           std::to_string(out.sum_rule_residual));
  }
  return out;
}

inline QDecomposition decompose(const PureState &psi, const ChargePartition &partition,
                                DecomposeOptions opts = {}) {
  if (psi.n() < 2) throw DomainError("decomposition needs n >= 2");
  if (partition.d() != psi.d()) {
    throw DomainError("partition " + partition.to_string() + " sums to " + std::to_string(partition.d()) +
                      " but the state has d = " + std::to_string(psi.d()));
  }
  const auto rdms = single_site_rdms(psi);
  return decompose(rdms, projectors(partition), opts);
}

/// Q' after projecting every site onto sectors mu and nu: rho_k -> (P_mu + P_nu) rho_k (P_mu + P_nu),
/// left unnormalized, then evaluated through the sector-regrouped expansion
///   d/(d-1) mean_k [ sum_a (p_a^2 - Tr rho_a^2) + sum_{a<b} (2 p_a p_b - Tr rho_ab^2) ].
/// Equals Q_mu + Q_nu + Q_{mu nu} of the unprojected state.
inline double projected_q(std::span<const ComplexMatrix> rdms, const ProjectorFamily &fam, std::size_t mu,
                          std::size_t nu) {
  if (mu == nu) throw DomainError("projected_q needs two distinct sectors");
  if (mu >= fam.size() || nu >= fam.size()) throw IndexError("sector index out of range");
  if (rdms.size() < 2) throw DomainError("projected_q needs n >= 2");
  const std::size_t d = fam.d();
  const std::size_t m = fam.size();
  const ComplexMatrix keep = fam[mu] + fam[nu];

  double s = 0.0;
  for (const auto &rho : rdms) {
    detail::require_same_dim(rho, keep, "projected_q");
    const ComplexMatrix projected = keep * rho * keep;
    const auto p = sector_probabilities(projected, fam);
    for (std::size_t a = 0; a < m; ++a) {
      const ComplexMatrix ra = sector_rdm(projected, fam[a]);
      s += p[a] * p[a] - trace_of_product(ra, ra).real();
    }
    for (std::size_t a = 0; a < m; ++a) {
      for (std::size_t b = a + 1; b < m; ++b) {
        const ComplexMatrix rab = interference_rdm(projected, fam[a], fam[b]);
        s += 2.0 * p[a] * p[b] - trace_of_product(rab, rab).real();
      }
    }
  }
  return double(d) / (double(d) - 1.0) * s / double(rdms.size());
}

inline double projected_q(const PureState &psi, const ChargePartition &partition, std::size_t mu, std::size_t nu) {
  if (partition.d() != psi.d()) throw DomainError("partition does not match the state's local dimension");
  if (mu == nu) throw DomainError("projected_q needs two distinct sectors");
  const auto rdms = single_site_rdms(psi);
  return projected_q(rdms, projectors(partition), mu, nu);
}

} // namespace mwq
