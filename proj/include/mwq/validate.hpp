#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "circuit.hpp"
#include "entanglement.hpp"
#include "haar_oracle.hpp"
#include "linalg.hpp"
#include "oracles.hpp"
#include "states.hpp"
#include "symmetry.hpp"

namespace mwq {

struct ValidateOptions {
  std::uint64_t seed = 0;
  std::uint64_t dim_cap = kDefaultDimCap;
  std::size_t states_per_point = 20;
  /// Self-test hook: build RDMs without the Hermitian symmetrization step.
  bool skip_rdm_symmetrization = false;
};

struct SuiteResult {
  std::string name;
  std::size_t checks = 0;
  std::size_t failures = 0;
  std::string first_failure;

  bool passed() const { return failures == 0; }
};

namespace detail {

class SuiteRecorder {
public:
  explicit SuiteRecorder(std::string name) { result_.name = std::move(name); }

  /// Records |value| <= tol (NaN fails).
  void within(double value, double tol, const std::string &what) {
    ++result_.checks;
    if (!(std::abs(value) <= tol)) fail(what + ": residual " + format(value) + " > " + format(tol));
  }

  void expect(bool ok, const std::string &what) {
    ++result_.checks;
    if (!ok) fail(what);
  }

  SuiteResult take() { return std::move(result_); }

private:
  static std::string format(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", x);
    return buf;
  }
  void fail(const std::string &msg) {
    if (result_.failures++ == 0) result_.first_failure = msg;
  }
  SuiteResult result_;
};

struct GridPoint {
  std::size_t n;
  std::size_t d;
};

inline std::vector<GridPoint> grid(std::uint64_t dim_cap, std::size_t n_max, std::size_t d_max,
                                   std::uint64_t extra_cap = UINT64_MAX) {
  std::vector<GridPoint> out;
  for (std::size_t n = 2; n <= n_max; ++n)
    for (std::size_t d = 2; d <= d_max; ++d) {
      const std::uint64_t dim = checked_pow(d, n);
      if (dim <= dim_cap && dim <= extra_cap) out.push_back({n, d});
    }
  return out;
}

inline std::string at(const GridPoint &g, std::size_t sample) {
  return "(n=" + std::to_string(g.n) + ",d=" + std::to_string(g.d) + ",sample=" + std::to_string(sample) + ")";
}

} // namespace detail

/// Runs every invariant suite. The grid shrinks automatically to respect dim_cap.
inline std::vector<SuiteResult> run_validation(const ValidateOptions &opt) {
  using detail::SuiteRecorder;
  const PartialTraceOptions pt{.symmetrize = !opt.skip_rdm_symmetrization};
  const auto points = detail::grid(opt.dim_cap, 5, 6);
  std::vector<SuiteResult> results;

  auto state_for = [&](const detail::GridPoint &g, std::size_t s, std::uint64_t salt) {
    return haar_random(g.n, g.d, derive_seed(opt.seed ^ salt, (g.n << 24) | (g.d << 16) | s), opt.dim_cap);
  };

  {
    SuiteRecorder r("partial-trace-vs-brute-force");
    for (const auto &g : detail::grid(opt.dim_cap, 8, 6, 256)) {
      for (std::size_t s = 0; s < 3; ++s) {
        const auto psi = state_for(g, s, 0x11);
        for (std::size_t k = 0; k < g.n; ++k) {
          r.within(max_abs_diff(partial_trace_single_site(psi, k, pt), oracle::brute_force_rdm(psi, k)), 1e-12,
                   "rho_" + std::to_string(k) + " " + detail::at(g, s));
        }
      }
    }
    results.push_back(r.take());
  }

  {
    SuiteRecorder r("rdm-trace-purity-hermiticity");
    for (const auto &g : points) {
      for (std::size_t s = 0; s < opt.states_per_point; ++s) {
        const auto psi = state_for(g, s, 0x22);
        for (std::size_t k = 0; k < g.n; ++k) {
          const auto rho = partial_trace_single_site(psi, k, pt);
          const auto where = detail::at(g, s);
          r.within(std::abs(trace(rho) - 1.0), 1e-12, "trace " + where);
          r.expect(trace_of_product(rho, rho).real() <= 1.0 + 1e-12, "purity <= 1 " + where);
          r.expect(hermiticity_defect(rho) == 0.0, "exact hermiticity after symmetrization " + where);
          r.within(f2(rho).imag(), 1e-12, "f2 real " + where);
        }
      }
    }
    for (const auto &g : points) {
      const auto prod = named_state(NamedState::ProductZero, g.n, g.d);
      for (std::size_t k = 0; k < g.n; ++k) {
        const auto rho = partial_trace_single_site(prod, k, pt);
        r.within(1.0 - trace_of_product(rho, rho).real(), 1e-12, "product-state marginal is pure");
      }
    }
    results.push_back(r.take());
  }

  {
    SuiteRecorder r("projector-axioms");
    for (std::size_t d = 2; d <= 6; ++d) {
      for (const auto &part : ordered_partitions(d)) {
        const auto fam = projectors(part);
        ComplexMatrix sum(d, d);
        for (std::size_t a = 0; a < fam.size(); ++a) {
          sum += fam[a];
          r.within(max_abs_diff(fam[a] * fam[a], fam[a]), 1e-15, "idempotence " + part.to_string());
          r.within(std::abs(trace(fam[a]) - double(part[a].dim)), 1e-15, "rank " + part.to_string());
          for (std::size_t b = 0; b < fam.size(); ++b)
            if (a != b)
              r.within(max_abs_diff(fam[a] * fam[b], ComplexMatrix(d, d)), 1e-15, "orthogonality " + part.to_string());
        }
        r.within(max_abs_diff(sum, ComplexMatrix::identity(d)), 1e-15, "completeness " + part.to_string());
      }
    }
    results.push_back(r.take());
  }

  {
    SuiteRecorder r("three-way-agreement");
    for (const auto &g : points) {
      for (std::size_t s = 0; s < opt.states_per_point; ++s) {
        const auto psi = state_for(g, s, 0x33);
        const auto rdms = single_site_rdms(psi, pt);
        const double ql = q_linear_entropy(rdms);
        if (g.d == 2) r.within(q_wedge(psi) - ql, 1e-10, "wedge vs linear entropy " + detail::at(g, s));
        for (const auto &part : ordered_partitions(g.d, kDefaultPartitionCap)) {
          const auto q = decompose(rdms, projectors(part), {.enforce_sum_rule = false});
          r.within(q.sum_of_parts() - ql, 1e-10, "decomposition " + part.to_string() + " " + detail::at(g, s));
          r.expect(ql >= -1e-10 && ql <= 1.0 + 1e-10, "Q in [0,1] " + detail::at(g, s));
        }
      }
    }
    for (const auto &g : points) {
      r.within(q_linear_entropy(named_state(NamedState::ProductZero, g.n, g.d)), 1e-12, "Q(product) = 0");
    }
    results.push_back(r.take());
  }

  {
    SuiteRecorder pur("purity-relation");
    SuiteRecorder anti("anticommutator-cancellation");
    SuiteRecorder prob("probability-normalization");
    SuiteRecorder sum("sum-rule");
    SuiteRecorder det("qubit-determinant-form");
    for (const auto &g : points) {
      for (std::size_t s = 0; s < opt.states_per_point; ++s) {
        const auto psi = state_for(g, s, 0x44);
        const auto rdms = single_site_rdms(psi, pt);
        const auto where = detail::at(g, s);
        for (const auto &part : ordered_partitions(g.d, kDefaultPartitionCap)) {
          const auto fam = projectors(part);
          const auto q = decompose(rdms, fam, {.enforce_sum_rule = false});
          sum.within(q.sum_rule_residual, kSumRuleTolerance, "Q sum rule " + part.to_string() + " " + where);
          for (const auto &rho : rdms) {
            std::vector<ComplexMatrix> sec;
            for (std::size_t a = 0; a < fam.size(); ++a) sec.push_back(sector_rdm(rho, fam[a]));
            std::vector<ComplexMatrix> inter;
            for (std::size_t a = 0; a < fam.size(); ++a)
              for (std::size_t b = a + 1; b < fam.size(); ++b) inter.push_back(interference_rdm(rho, fam[a], fam[b]));

            double parts = 0.0;
            for (const auto &x : sec) parts += trace_of_product(x, x).real();
            for (const auto &x : inter) parts += trace_of_product(x, x).real();
            pur.within(trace_of_product(rho, rho).real() - parts, 1e-12, "purity " + part.to_string() + " " + where);

            for (const auto &x : sec)
              for (const auto &y : inter)
                anti.within(std::abs(trace_of_product(x, y) + trace_of_product(y, x)), 1e-12,
                            "Tr{rho_g, rho_ab} " + part.to_string() + " " + where);

            const auto p = sector_probabilities(rho, fam);
            double sq = 0.0;
            for (std::size_t a = 0; a < p.size(); ++a) {
              sq += p[a] * p[a];
              for (std::size_t b = a + 1; b < p.size(); ++b) sq += 2.0 * p[a] * p[b];
            }
            prob.within(sq - 1.0, 1e-12, "(sum p)^2 " + part.to_string() + " " + where);

            if (g.d == 2) {
              for (const auto &x : sec) {
                const complex dt = x(0, 0) * x(1, 1) - x(0, 1) * x(1, 0);
                det.within(std::abs(f2(x) - dt), 1e-12, "f2 = det " + part.to_string() + " " + where);
              }
            }
          }
        }
      }
    }
    results.push_back(pur.take());
    results.push_back(anti.take());
    results.push_back(prob.take());
    results.push_back(sum.take());
    results.push_back(det.take());
  }

  {
    SuiteRecorder r("vanishing-sector");
    for (const auto &g : points) {
      for (std::size_t s = 0; s < opt.states_per_point; ++s) {
        const auto psi = state_for(g, s, 0x55);
        const auto rdms = single_site_rdms(psi, pt);
        for (const auto &part : ordered_partitions(g.d, kDefaultPartitionCap)) {
          const auto q = decompose(rdms, projectors(part), {.enforce_sum_rule = false});
          for (std::size_t a = 0; a < part.size(); ++a)
            if (part[a].dim == 1)
              r.within(q.q_sector[a], 1e-12, "Q_alpha with d_alpha = 1, " + part.to_string() + " " + detail::at(g, s));
        }
      }
    }
    results.push_back(r.take());
  }

  {
    SuiteRecorder r("circuit-exactness");
    SuiteRecorder proj("projected-q-identity");
    for (const auto &g : points) {
      for (std::size_t s = 0; s < std::min<std::size_t>(opt.states_per_point, 5); ++s) {
        const auto psi = state_for(g, s, 0x66);
        const auto rdms = single_site_rdms(psi, pt);
        const auto where = detail::at(g, s);
        const auto parts = ordered_partitions(g.d, 4);
        for (const auto &part : parts) {
          if (part.size() < 2) continue;
          const auto fam = projectors(part);
          const auto q = decompose(rdms, fam, {.enforce_sum_rule = false});
          for (std::size_t a = 0; a < fam.size(); ++a) {
            for (std::size_t b = a + 1; b < fam.size(); ++b) {
              for (const auto &rho : rdms) {
                const auto run = run_interference_circuit(rho, fam[a], fam[b]);
                const double direct = trace_of_product(rho * fam[a], rho * fam[b]).real();
                r.within(run.expectation - direct, 1e-12, "<Z> vs Tr(rho Pa rho Pb) " + where);
                r.expect(direct >= -1e-14, "positivity " + where);
                r.within(run.p0 + run.p1 - 1.0, 1e-12, "p0 + p1 " + where);
              }
              proj.within(projected_q(rdms, fam, a, b) - (q.q_sector[a] + q.q_sector[b] + q.interference(a, b)), 1e-10,
                          "Q' = Q_mu + Q_nu + Q_mu,nu " + part.to_string() + " " + where);
            }
          }
        }
      }
    }
    results.push_back(r.take());
    results.push_back(proj.take());
  }

  {
    SuiteRecorder r("haar-closed-forms");
    for (std::size_t d = 2; d <= 6; ++d) {
      for (std::size_t n = 2; n <= 8; ++n) {
        const double cf = haar::correction_factor(n, d);
        r.expect(cf >= 0.0 && cf < 1.0, "correction factor in [0,1)");
        r.expect(haar::correction_factor(n + 1, d) > cf, "correction factor increases with n");
        for (const auto &part : ordered_partitions(d)) {
          r.within(haar::expected_q_total(n, part) - cf, 1e-14, "partition independence " + part.to_string());
        }
        for (std::size_t da = 1; da < d; ++da) {
          for (std::size_t db = 1; da + db <= d; ++db) {
            const double ratio = haar::expected_q_sector(n, d, da) / haar::expected_q_interference(n, d, da, db);
            r.within(ratio - double(da - 1) / double(2 * db), 1e-14, "equipartition ratio");
          }
        }
      }
    }
    results.push_back(r.take());
  }

  {
    SuiteRecorder r("sector-relabeling-covariance");
    for (const auto &g : points) {
      const auto psi = state_for(g, 0, 0x77);
      const auto rho = partial_trace_single_site(psi, 0, pt);
      for (const auto &part : ordered_partitions(g.d, 8)) {
        if (part.size() < 2) continue;
        // Swap the first two sectors: same blocks, listed in the other order.
        std::vector<ComplexMatrix> swapped = projectors(part).projectors();
        std::swap(swapped[0], swapped[1]);
        auto dims = part.dims();
        std::swap(dims[0], dims[1]);
        const auto base = sector_probabilities(rho, projectors(part));
        const auto perm = sector_probabilities(rho, ProjectorFamily(ChargePartition::from_dims(dims), swapped));
        r.within(base[0] - perm[1], 1e-15, "relabel " + part.to_string());
        r.within(base[1] - perm[0], 1e-15, "relabel " + part.to_string());
      }
    }
    results.push_back(r.take());
  }

  return results;
}

} // namespace mwq
