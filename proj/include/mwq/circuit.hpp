#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "entanglement.hpp"
#include "errors.hpp"
#include "linalg.hpp"
#include "states.hpp"
#include "symmetry.hpp"

namespace mwq {

// Interference-measurement protocol. Each site k gets one ancilla qubit and two copies of
// rho_k; the ancilla controls U = (P_a (x) P_b) SWAP between the copies, sandwiched by
// Hadamards. The ancilla's <Z> is Tr(rho_k P_a rho_k P_b) = -f2(rho_{k,ab}).
//
// U is not unitary whenever a projector is rank deficient. The gates are applied literally
// to the 2d^2-dimensional operator |0><0| (x) rho (x) rho; the register of one site never
// interacts with another, so sites are simulated independently.

/// diag(I_{d^2}, (P_a (x) P_b) SWAP), ancilla as the most significant factor.
inline ComplexMatrix controlled_u(const ComplexMatrix &pa, const ComplexMatrix &pb) {
  require_square(pa, "controlled_u");
  require_square(pb, "controlled_u");
  if (pa.rows() != pb.rows()) throw DimensionError("controlled_u: projectors " + pa.shape() + " and " + pb.shape());
  const std::size_t d = pa.rows();
  const std::size_t dd = d * d;
  const ComplexMatrix u = kron(pa, pb) * swap_operator(d);
  ComplexMatrix c(2 * dd, 2 * dd);
  for (std::size_t i = 0; i < dd; ++i) c(i, i) = 1.0;
  for (std::size_t i = 0; i < dd; ++i)
    for (std::size_t j = 0; j < dd; ++j) c(dd + i, dd + j) = u(i, j);
  return c;
}

/// Final single-ancilla readout of one circuit run.
struct AncillaReadout {
  double expectation = 0.0;   // <Z> = Tr(rho_anc Z)
  double p0 = 0.0;            // (1 + <Z>) / 2
  double p1 = 0.0;            // (1 - <Z>) / 2
  double literal_trace = 0.0; // trace of the ancilla operator after the literal gate sequence
  ComplexMatrix ancilla;      // 2x2 ancilla operator after tracing out both copies
};

/// Runs H, controlled-U, H on |0><0| (x) rho (x) rho and reads the ancilla.
///
/// Because U^dagger U = P_b (x) P_a != I, the literal ancilla operator has trace
/// (1 + p_a p_b) / 2 rather than 1; its Z expectation is unaffected. The outcome
/// probabilities are reported in the unit-trace form p = (1 +- <Z>) / 2.
inline AncillaReadout run_interference_circuit(const ComplexMatrix &rho_k, const ComplexMatrix &pa,
                                               const ComplexMatrix &pb) {
  require_square(rho_k, "run_interference_circuit");
  if (rho_k.rows() != pa.rows() || rho_k.rows() != pb.rows()) {
    throw DimensionError("run_interference_circuit: RDM " + rho_k.shape() + " vs projectors " + pa.shape());
  }
  const std::size_t d = rho_k.rows();
  const std::size_t dd = d * d;

  const double h = 1.0 / std::sqrt(2.0);
  const ComplexMatrix hadamard = kron(ComplexMatrix{{h, h}, {h, -h}}, ComplexMatrix::identity(dd));
  const ComplexMatrix cu = controlled_u(pa, pb);

  ComplexMatrix state = kron(ComplexMatrix::diagonal({1.0, 0.0}), kron(rho_k, rho_k));
  state = hadamard * state * hadamard;
  state = cu * state * cu.adjoint();
  state = hadamard * state * hadamard;

  AncillaReadout out;
  out.ancilla = ComplexMatrix(2, 2);
  for (std::size_t a = 0; a < 2; ++a)
    for (std::size_t b = 0; b < 2; ++b)
      for (std::size_t i = 0; i < dd; ++i) out.ancilla(a, b) += state(a * dd + i, b * dd + i);

  out.expectation = (out.ancilla(0, 0) - out.ancilla(1, 1)).real();
  out.literal_trace = (out.ancilla(0, 0) + out.ancilla(1, 1)).real();
  out.p0 = 0.5 * (1.0 + out.expectation);
  out.p1 = 0.5 * (1.0 - out.expectation);
  return out;
}

struct ShotEstimate {
  double estimate = 0.0;       // 1 - 2 k / shots
  double standard_error = 0.0; // 2 sqrt(phat (1 - phat) / shots)
  std::uint64_t ones = 0;      // k, number of ancilla outcomes equal to 1
  std::uint64_t shots = 0;
};

inline constexpr double kExpectationSlack = 1e-12;

/// Draws `shots` ancilla measurements with P(1) = (1 - <Z>) / 2.
inline ShotEstimate sample_shots(double expectation, std::uint64_t shots, std::uint64_t seed) {
  if (shots < 1) throw DomainError("need at least one shot");
  if (!(expectation >= -kExpectationSlack && expectation <= 1.0 + kExpectationSlack)) {
    throw DomainError("ancilla expectation " + std::to_string(expectation) + " outside [0, 1]");
  }
  const double z = std::clamp(expectation, 0.0, 1.0);
  const double p1 = 0.5 * (1.0 - z);
  std::mt19937_64 rng(splitmix64(seed));
  std::binomial_distribution<std::uint64_t> binom(shots, p1);
  ShotEstimate out;
  out.shots = shots;
  out.ones = binom(rng);
  const double phat = double(out.ones) / double(shots);
  out.estimate = 1.0 - 2.0 * phat;
  out.standard_error = 2.0 * std::sqrt(phat * (1.0 - phat) / double(shots));
  return out;
}

struct CircuitOutcome {
  std::size_t site = 0;
  double exact_expectation = 0.0;
  std::optional<double> shot_estimate;
  std::optional<std::uint64_t> shots;
  std::optional<double> standard_error;
};

struct InterferenceReconstruction {
  double value = 0.0;          // reconstructed Q_{alpha beta}
  double standard_error = 0.0; // zero in exact mode
  std::vector<CircuitOutcome> sites;
};

/// Q_{ab} = 2d/(d-1) mean_k (p_{k,a} p_{k,b} - <Z>_k), with <Z>_k from the per-site circuit.
/// Probabilities are taken exactly; with `shots`, each <Z>_k is replaced by a binomial estimate
/// seeded by derive_seed(seed, k).
inline InterferenceReconstruction reconstruct_q_interference(const PureState &psi, const ChargePartition &partition,
                                                             std::size_t alpha, std::size_t beta,
                                                             std::optional<std::uint64_t> shots = std::nullopt,
                                                             std::uint64_t seed = 0) {
  if (alpha == beta) throw DomainError("reconstruction needs two distinct sectors");
  if (alpha >= partition.size() || beta >= partition.size()) throw IndexError("sector index out of range");
  if (partition.d() != psi.d()) throw DomainError("partition does not match the state's local dimension");
  if (psi.n() < 2) throw DomainError("reconstruction needs n >= 2");
  const auto fam = projectors(partition);
  const double d = double(psi.d());
  const double scale = 2.0 * d / (d - 1.0) / double(psi.n());

  InterferenceReconstruction out;
  double var = 0.0;
  for (std::size_t k = 0; k < psi.n(); ++k) {
    const ComplexMatrix rho = partial_trace_single_site(psi, k);
    const auto p = sector_probabilities(rho, fam);
    CircuitOutcome oc;
    oc.site = k;
    oc.exact_expectation = run_interference_circuit(rho, fam[alpha], fam[beta]).expectation;
    double z = oc.exact_expectation;
    if (shots) {
      const ShotEstimate est = sample_shots(oc.exact_expectation, *shots, derive_seed(seed, k));
      oc.shot_estimate = est.estimate;
      oc.shots = *shots;
      oc.standard_error = est.standard_error;
      z = est.estimate;
      var += est.standard_error * est.standard_error;
    }
    out.value += p[alpha] * p[beta] - z;
    out.sites.push_back(oc);
  }
  out.value *= scale;
  out.standard_error = scale * std::sqrt(var);
  return out;
}

} // namespace mwq
