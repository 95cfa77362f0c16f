// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <mwq/circuit.hpp>
#include <mwq/ensemble.hpp>
#include <mwq/entanglement.hpp>
#include <mwq/haar_oracle.hpp>
#include <mwq/states.hpp>

using namespace mwq;

namespace {

constexpr double kAgreementTol = 1e-10;
constexpr double kHaarAbsTol = 3e-3;
constexpr double kHaarSeFactor = 3.0;
constexpr double kSectorSeCeiling = 1e-2;
constexpr double kVanishTol = 1e-12;
constexpr double kIdentityTol = 1e-12;
constexpr double kSumRuleTol = 1e-10;
constexpr double kCircuitTol = 1e-12;
constexpr double kProjectedTol = 1e-10;
constexpr double kShotSeFactor = 3.0;
constexpr std::size_t kShotsPerSite = 10000;
constexpr std::size_t kShotTrials = 100;
constexpr std::size_t kShotTrialsRequired = 99;
constexpr double kMomentSeFactor = 5.0;
constexpr double kRuntime1 = 30.0;
constexpr double kRuntime2 = 300.0;
constexpr std::uint64_t kSeed = 20240101;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Verdict {
  bool pass;
  std::string detail;
};

char buf[512];

template <class... A> std::string fmt(const char *f, A... a) {
  std::snprintf(buf, sizeof buf, f, a...);
  return buf;
}

Verdict three_way() {
  const auto t0 = Clock::now();
  double wedge = 0.0, total = 0.0;
  for (std::size_t n = 2; n <= 5; ++n) {
    for (std::size_t d = 2; d <= 4; ++d) {
      const auto parts = ordered_partitions(d);
      for (std::size_t s = 0; s < 100; ++s) {
        const auto psi = haar_random(n, d, derive_seed(grid_seed(kSeed + 1, n, d), s));
        const auto rdms = single_site_rdms(psi);
        const double ql = q_linear_entropy(rdms);
        if (d == 2) wedge = std::max(wedge, std::abs(q_wedge(psi) - ql));
        for (const auto &p : parts)
          total = std::max(total, std::abs(decompose(rdms, projectors(p)).q_total - ql));
      }
    }
  }
  const double t = seconds_since(t0);
  return {wedge <= kAgreementTol && total <= kAgreementTol && t < kRuntime1,
          fmt("max|wedge-linear| %.2e, max|linear-decompose| %.2e (tol %.0e), %.1f s (limit %.0f s)", wedge, total,
              kAgreementTol, t, kRuntime1)};
}

struct SweepChecks {
  Verdict sector, interference, total;
};

SweepChecks fig1_sweep() {
  SweepConfig cfg;
  cfg.n_values = {3, 4, 5};
  cfg.d_values = {2, 3, 4, 5, 6};
  cfg.samples = 500;
  cfg.master_seed = kSeed;
  cfg.workers = 1;
  const auto t0 = Clock::now();
  const auto report = run_sweep(cfg);
  const double t = seconds_since(t0);

  std::size_t sector_bad = 0, sector_rows = 0, inter_bad = 0, inter_rows = 0, se_bad = 0;
  double worst_sector = 0.0, worst_inter = 0.0, max_se = 0.0, max_std = 0.0;
  std::string first_sector, first_inter;
  double total_worst = 0.0, spread_worst = 0.0;
  std::string first_total;
  std::size_t total_within_3se = 0, total_rows = 0;
  std::set<std::pair<std::size_t, std::size_t>> bad_points;
  std::map<std::pair<std::size_t, std::size_t>, std::vector<double>> totals;

  for (const auto &r : report.rows) {
    const double tol = std::max(kHaarAbsTol, kHaarSeFactor * r.standard_error());
    const std::string where = fmt("n=%zu d=%zu %s %s: |%.5f-%.5f|=%.1e tol %.1e", r.n, r.d, r.partition.c_str(),
                                  r.label.c_str(), r.mean, r.theory, r.abs_err, tol);
    if (r.kind == TermKind::Sector) {
      ++sector_rows;
      worst_sector = std::max(worst_sector, r.abs_err / tol);
      max_se = std::max(max_se, r.standard_error());
      max_std = std::max(max_std, r.std);
      if (r.standard_error() > kSectorSeCeiling) ++se_bad;
      if (r.abs_err > tol && sector_bad++ == 0) first_sector = where;
    } else if (r.kind == TermKind::Interference) {
      ++inter_rows;
      worst_inter = std::max(worst_inter, r.abs_err / tol);
      if (r.abs_err > tol && inter_bad++ == 0) first_inter = where;
    } else {
      totals[{r.n, r.d}].push_back(r.mean);
      ++total_rows;
      total_worst = std::max(total_worst, r.abs_err);
      if (r.abs_err <= kHaarSeFactor * r.standard_error()) ++total_within_3se;
      if (r.abs_err > kHaarAbsTol && bad_points.insert({r.n, r.d}).second && bad_points.size() == 1)
        first_total = fmt("n=%zu d=%zu: mean %.5f vs %.5f (|err| %.1e, SE %.1e)", r.n, r.d, r.mean, r.theory, r.abs_err,
                          r.standard_error());
    }
  }
  for (const auto &[key, v] : totals) {
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    spread_worst = std::max(spread_worst, *hi - *lo);
  }

  SweepChecks out;
  out.sector = {sector_bad == 0 && se_bad == 0 && t < kRuntime2,
                fmt("%zu/%zu sector rows in tolerance (worst err/tol %.2f), max SE %.1e (ceiling %.0e), max per-sample "
                    "std %.1e, sweep %.1f s (limit %.0f s)",
                    sector_rows - sector_bad, sector_rows, worst_sector, max_se, kSectorSeCeiling, max_std, t, kRuntime2) +
                    (first_sector.empty() ? "" : "; first miss " + first_sector)};
  out.interference = {inter_bad == 0, fmt("%zu/%zu interference rows in tolerance (worst err/tol %.2f)", inter_rows - inter_bad,
                                          inter_rows, worst_inter) +
                                          (first_inter.empty() ? "" : "; first miss " + first_inter)};
  out.total = {bad_points.empty() && spread_worst <= kAgreementTol,
               fmt("%zu/%zu grid points within %.0e (worst %.1e), max spread across partitions %.1e; for reference %zu/%zu "
                   "total rows within 3 SE",
                   totals.size() - bad_points.size(), totals.size(), kHaarAbsTol, total_worst, spread_worst, total_within_3se,
                   total_rows) +
                   (first_total.empty() ? "" : "; first miss " + first_total)};
  return out;
}

Verdict vanishing_sectors() {
  double worst = 0.0;
  std::size_t checked = 0;
  for (std::size_t n = 3; n <= 5; ++n) {
    for (std::size_t d = 2; d <= 6; ++d) {
      std::vector<ProjectorFamily> fams;
      for (const auto &p : ordered_partitions(d, kDefaultPartitionCap)) fams.push_back(projectors(p));
      for (std::size_t s = 0; s < 100; ++s) {
        const auto rdms = single_site_rdms(haar_random(n, d, derive_seed(grid_seed(kSeed + 4, n, d), s)));
        for (const auto &fam : fams) {
          const auto q = decompose(rdms, fam);
          for (std::size_t a = 0; a < fam.size(); ++a) {
            if (fam.partition()[a].dim != 1) continue;
            worst = std::max(worst, std::abs(q.q_sector[a]));
            ++checked;
          }
        }
      }
    }
  }
  return {worst <= kVanishTol, fmt("%zu one-dimensional sector values, max Q_alpha %.2e (tol %.0e)", checked, worst, kVanishTol)};
}

Verdict purity_and_sum_rule_identities() {
  std::mt19937_64 rng(splitmix64(kSeed + 5));
  double purity = 0.0, anti = 0.0, norm = 0.0, sum_rule = 0.0;
  for (std::size_t pair = 0; pair < 1000; ++pair) {
    const std::size_t n = 2 + rng() % 4;
    const std::size_t d = 2 + rng() % 4;
    const auto parts = ordered_partitions(d);
    const auto &part = parts[rng() % parts.size()];
    const auto fam = projectors(part);
    const auto rdms = single_site_rdms(haar_random(n, d, rng()));
    sum_rule = std::max(sum_rule, decompose(rdms, fam, {.enforce_sum_rule = false}).sum_rule_residual);
    for (const auto &rho : rdms) {
      const auto p = sector_probabilities(rho, fam);
      std::vector<ComplexMatrix> sec;
      std::vector<ComplexMatrix> inter;
      double parts_purity = 0.0, sq = 0.0;
      for (std::size_t a = 0; a < fam.size(); ++a) {
        sec.push_back(sector_rdm(rho, fam[a]));
        parts_purity += trace_of_product(sec[a], sec[a]).real();
        sq += p[a] * p[a];
        for (std::size_t b = a + 1; b < fam.size(); ++b) {
          inter.push_back(interference_rdm(rho, fam[a], fam[b]));
          parts_purity += trace_of_product(inter.back(), inter.back()).real();
          sq += 2.0 * p[a] * p[b];
        }
      }
      purity = std::max(purity, std::abs(trace_of_product(rho, rho).real() - parts_purity));
      norm = std::max(norm, std::abs(sq - 1.0));
      for (const auto &s : sec)
        for (const auto &x : inter) anti = std::max(anti, std::abs(trace_of_product(s, x) + trace_of_product(x, s)));
      for (std::size_t a = 0; a < sec.size(); ++a)
        for (std::size_t b = a + 1; b < sec.size(); ++b)
          anti = std::max(anti, std::abs(trace_of_product(sec[a], sec[b]) + trace_of_product(sec[b], sec[a])));
    }
  }
  return {purity <= kIdentityTol && anti <= kIdentityTol && norm <= kIdentityTol && sum_rule <= kSumRuleTol,
          fmt("1000 pairs: purity %.1e, anticommutator %.1e, probability normalization %.1e (tol %.0e), sum rule %.1e "
              "(tol %.0e)",
              purity, anti, norm, kIdentityTol, sum_rule, kSumRuleTol)};
}

Verdict circuit_exactness() {
  std::mt19937_64 rng(splitmix64(kSeed + 6));
  std::normal_distribution<double> g;
  double worst = 0.0, worst_proj = 0.0;
  for (std::size_t d = 2; d <= 6; ++d) {
    const auto parts = ordered_partitions(d);
    for (std::size_t i = 0; i < 100; ++i) {
      ComplexMatrix a(d, d);
      for (std::size_t r = 0; r < d; ++r)
        for (std::size_t c = 0; c < d; ++c) a(r, c) = complex(g(rng), g(rng));
      ComplexMatrix rho = a * a.adjoint();
      rho *= 1.0 / trace(rho).real();
      rho = hermitian_part(rho);
      const auto &part = parts[parts.size() - 1 - rng() % (parts.size() - 1)];
      const auto fam = projectors(part);
      const std::size_t al = rng() % part.size();
      const std::size_t be = (al + 1 + rng() % (part.size() - 1)) % part.size();
      const double z = run_interference_circuit(rho, fam[al], fam[be]).expectation;
      worst = std::max(worst, std::abs(z - trace(rho * fam[al] * rho * fam[be]).real()));

      const auto psi = haar_random(3, d, rng());
      const auto rdms = single_site_rdms(psi);
      const auto q = decompose(rdms, fam);
      const double qp = projected_q(rdms, fam, al, be);
      worst_proj = std::max(worst_proj, std::abs(qp - (q.q_sector[al] + q.q_sector[be] + q.interference(al, be))));
    }
  }
  return {worst <= kCircuitTol && worst_proj <= kProjectedTol,
          fmt("500 instances: max|<Z>-Tr(rho Pa rho Pb)| %.1e (tol %.0e), max projected-Q residual %.1e (tol %.0e)", worst,
              kCircuitTol, worst_proj, kProjectedTol)};
}

Verdict shot_convergence() {
  const auto psi = haar_random(4, 3, kSeed + 7);
  const auto part = ChargePartition::from_dims({1, 2});
  const double exact = decompose(psi, part).interference(0, 1);
  std::size_t ok = 0;
  double worst = 0.0;
  for (std::size_t t = 0; t < kShotTrials; ++t) {
    const auto rec = reconstruct_q_interference(psi, part, 0, 1, kShotsPerSite, derive_seed(kSeed + 7, t));
    const double z = std::abs(rec.value - exact) / rec.standard_error;
    worst = std::max(worst, z);
    if (z <= kShotSeFactor) ++ok;
  }
  return {ok >= kShotTrialsRequired, fmt("%zu/%zu trials within %.0f SE at %zu shots (required %zu, worst %.2f SE)", ok,
                                         kShotTrials, kShotSeFactor, kShotsPerSite, kShotTrialsRequired, worst)};
}

Verdict moments() {
  constexpr std::size_t samples = 10000, N = 4;
  // Accumulators for Re/Im of q_a q_b* and for q_a q_b q_c* q_d*.
  std::vector<double> s2(N * N * 2), ss2(N * N * 2), s4(N * N * N * N * 2), ss4(N * N * N * N * 2);
  for (std::size_t s = 0; s < samples; ++s) {
    const auto psi = haar_random(2, 2, derive_seed(kSeed + 9, s));
    for (std::size_t a = 0; a < N; ++a)
      for (std::size_t b = 0; b < N; ++b) {
        const complex v = psi[a] * std::conj(psi[b]);
        const std::size_t i = (a * N + b) * 2;
        s2[i] += v.real(), ss2[i] += v.real() * v.real();
        s2[i + 1] += v.imag(), ss2[i + 1] += v.imag() * v.imag();
        for (std::size_t c = 0; c < N; ++c)
          for (std::size_t d = 0; d < N; ++d) {
            const complex w = psi[a] * psi[b] * std::conj(psi[c]) * std::conj(psi[d]);
            const std::size_t j = (((a * N + b) * N + c) * N + d) * 2;
            s4[j] += w.real(), ss4[j] += w.real() * w.real();
            s4[j + 1] += w.imag(), ss4[j + 1] += w.imag() * w.imag();
          }
      }
  }
  double worst = 0.0;
  std::size_t bad = 0, checked = 0;
  auto check = [&](double sum, double sumsq, double expected) {
    const double mean = sum / samples;
    const double var = std::max(0.0, (sumsq / samples - mean * mean) * samples / (samples - 1.0));
    const double se = std::sqrt(var / samples);
    const double dev = std::abs(mean - expected);
    ++checked;
    if (se == 0.0) {
      if (dev > 1e-15) ++bad;
      return;
    }
    worst = std::max(worst, dev / se);
    if (dev > kMomentSeFactor * se) ++bad;
  };
  const double n1 = 1.0 / N, n2 = 1.0 / (N * (N + 1.0));
  for (std::size_t a = 0; a < N; ++a)
    for (std::size_t b = 0; b < N; ++b) {
      check(s2[(a * N + b) * 2], ss2[(a * N + b) * 2], a == b ? n1 : 0.0);
      check(s2[(a * N + b) * 2 + 1], ss2[(a * N + b) * 2 + 1], 0.0);
      for (std::size_t c = 0; c < N; ++c)
        for (std::size_t d = 0; d < N; ++d) {
          const double expected = n2 * (double(a == c && b == d) + double(a == d && b == c));
          const std::size_t j = (((a * N + b) * N + c) * N + d) * 2;
          check(s4[j], ss4[j], expected);
          check(s4[j + 1], ss4[j + 1], 0.0);
        }
    }
  return {bad == 0, fmt("%zu/%zu moment components within %.0f SE (worst %.2f SE), 10000 samples", checked - bad, checked,
                        kMomentSeFactor, worst)};
}

} // namespace

int main() {
  int failed = 0;
  auto report = [&](int id, const char *name, const Verdict &v) {
    std::printf("%s [%d] %s: %s\n", v.pass ? "PASS" : "FAIL", id, name, v.detail.c_str());
    std::fflush(stdout);
    if (!v.pass) ++failed;
  };
  report(1, "three-formulation agreement", three_way());
  const auto sweep = fig1_sweep();
  report(2, "sector terms vs Haar closed form", sweep.sector);
  report(3, "interference terms vs Haar closed form", sweep.interference);
  report(4, "vanishing one-dimensional sectors", vanishing_sectors());
  report(5, "purity, anticommutator, normalization, sum rule", purity_and_sum_rule_identities());
  report(6, "circuit exactness and projected Q", circuit_exactness());
  report(7, "shot convergence", shot_convergence());
  report(8, "partition-independent Haar total", sweep.total);
  report(9, "Haar moment identities", moments());
  std::printf("%d of 9 criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}
