#pragma once

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "circuit.hpp"
#include "ensemble.hpp"
#include "entanglement.hpp"
#include "errors.hpp"
#include "states.hpp"
#include "symmetry.hpp"
#include "validate.hpp"

namespace mwq::cli {

enum ExitCode : int { kOk = 0, kDomainError = 2, kResourceError = 3, kValidationFailure = 4 };

namespace detail {

inline std::string fmt17(double x) { return format_double(x); }

inline std::string pair_label(const SectorPair &p) { return std::to_string(p.first) + "," + std::to_string(p.second); }

inline void print_decomposition(std::ostream &out, const QDecomposition &q, const ChargePartition &part) {
  out << "partition      " << part.to_string() << '\n';
  out << "q_total        " << fmt17(q.q_total) << '\n';
  for (std::size_t a = 0; a < q.q_sector.size(); ++a) {
    out << "q_sector[" << a << "]    " << fmt17(q.q_sector[a]) << "   (d_alpha = " << part[a].dim << ")\n";
  }
  for (const auto &[pair, v] : q.q_interference) {
    out << "q_interf[" << pair_label(pair) << "]  " << fmt17(v) << '\n';
  }
  out << "sum_rule_residual " << fmt17(q.sum_rule_residual) << '\n';
}

inline void write_decomposition_csv(const std::string &path, const QDecomposition &q) {
  std::ofstream f(path);
  if (!f) throw ParseError("cannot open '" + path + "' for writing");
  f << "kind,label,value\n";
  f << "total,Q," << fmt17(q.q_total) << '\n';
  for (std::size_t a = 0; a < q.q_sector.size(); ++a) f << "sector," << a << ',' << fmt17(q.q_sector[a]) << '\n';
  for (const auto &[pair, v] : q.q_interference) f << "interference," << pair.first << '-' << pair.second << ',' << fmt17(v) << '\n';
  f << "residual,sum_rule," << fmt17(q.sum_rule_residual) << '\n';
}

} // namespace detail

/// Entry point shared by the executable and the CLI tests.
inline int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
  CLI::App app{"Symmetry-resolved Meyer-Wallach global entanglement"};
  app.require_subcommand(1);

  // sweep
  SweepConfig sweep_cfg;
  std::string config_path;
  std::vector<std::size_t> n_values, d_values;
  std::vector<std::string> partition_texts;
  std::optional<std::size_t> samples, workers, partition_cap;
  std::optional<std::uint64_t> seed, dim_cap;
  std::string out_path;
  auto *sweep = app.add_subcommand("sweep", "Haar-ensemble sweep against closed-form averages, CSV output");
  sweep->add_option("--config", config_path, "key = value config file (flags override it)");
  sweep->add_option("--n", n_values, "particle counts")->delimiter(',');
  sweep->add_option("--d", d_values, "local dimensions")->delimiter(',');
  sweep->add_option("--partition", partition_texts, "partition such as 'd=6 sectors=3,2,1' (repeatable)");
  sweep->add_option("--samples", samples, "states per grid point");
  sweep->add_option("--seed", seed, "master seed");
  sweep->add_option("--out", out_path, "CSV path (stdout if omitted)");
  sweep->add_option("--dim-cap", dim_cap, "maximum d^n");
  sweep->add_option("--workers", workers, "threads");
  sweep->add_option("--partition-cap", partition_cap, "ordered partitions per d when none are given");

  // decompose
  std::string state_path, partition_text, decompose_csv;
  auto *dec = app.add_subcommand("decompose", "sector and interference parts of Q for one state");
  dec->add_option("--state,state", state_path, "state file")->required();
  dec->add_option("--partition", partition_text, "partition such as 'd=2 sectors=1,1'")->required();
  dec->add_option("--out", decompose_csv, "also write the terms as CSV");

  // circuit
  std::size_t alpha = 0, beta = 1;
  std::optional<std::uint64_t> shots;
  std::uint64_t circuit_seed = 0;
  auto *circ = app.add_subcommand("circuit", "simulate the interference-measurement circuit and rebuild Q_ab");
  circ->add_option("--state,state", state_path, "state file")->required();
  circ->add_option("--partition", partition_text, "partition")->required();
  circ->add_option("--alpha", alpha, "first sector index")->required();
  circ->add_option("--beta", beta, "second sector index")->required();
  circ->add_option("--shots", shots, "ancilla shots per site (exact if omitted)");
  circ->add_option("--seed", circuit_seed, "shot sampling seed");

  // validate
  ValidateOptions vopt;
  std::string inject;
  auto *val = app.add_subcommand("validate", "run every invariant suite");
  val->add_option("--seed", vopt.seed, "seed");
  val->add_option("--dim-cap", vopt.dim_cap, "maximum d^n; the grid shrinks to fit");
  val->add_option("--states", vopt.states_per_point, "random states per grid point");
  val->add_option("--inject-fault", inject, "self-test: skip-symmetrization")->check(CLI::IsMember({"skip-symmetrization"}));

  // make-state
  std::string kind = "haar";
  std::size_t ms_n = 3, ms_d = 2;
  std::uint64_t ms_seed = 0;
  auto *mk = app.add_subcommand("make-state", "write a Haar-random or named state file");
  mk->add_option("--kind", kind, "haar, product-zero, ghz, w, bell, plus-product");
  mk->add_option("--n", ms_n, "particles");
  mk->add_option("--d", ms_d, "local dimension");
  mk->add_option("--seed", ms_seed, "seed for haar");
  mk->add_option("--out", out_path, "output path (stdout if omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? kOk : kDomainError;
  }

  try {
    if (*sweep) {
      if (!config_path.empty()) {
        std::ifstream f(config_path);
        if (!f) throw ParseError("cannot open config '" + config_path + "'");
        sweep_cfg = parse_sweep_config(f);
      }
      if (!n_values.empty()) sweep_cfg.n_values = n_values;
      if (!d_values.empty()) sweep_cfg.d_values = d_values;
      if (!partition_texts.empty()) {
        sweep_cfg.partitions.clear();
        for (const auto &t : partition_texts) sweep_cfg.partitions.push_back(parse_partition(t));
      }
      if (samples) sweep_cfg.samples = *samples;
      if (seed) sweep_cfg.master_seed = *seed;
      if (dim_cap) sweep_cfg.dim_cap = *dim_cap;
      if (workers) sweep_cfg.workers = *workers;
      if (partition_cap) sweep_cfg.partition_cap = *partition_cap;
      if (!out_path.empty()) sweep_cfg.output_path = out_path;

      const auto report = run_sweep(sweep_cfg);
      if (sweep_cfg.output_path.empty()) {
        write_csv(out, report);
      } else {
        std::ofstream f(sweep_cfg.output_path);
        if (!f) throw ParseError("cannot open '" + sweep_cfg.output_path + "' for writing");
        write_csv(f, report);
        std::ofstream meta(sweep_cfg.output_path + ".meta");
        write_metadata(meta, sweep_cfg);
        out << "wrote " << report.rows.size() << " rows to " << sweep_cfg.output_path << '\n';
      }
      return kOk;
    }

    if (*dec) {
      const auto psi = read_state_file(state_path);
      const auto part = parse_partition(partition_text);
      const auto q = decompose(psi, part);
      detail::print_decomposition(out, q, part);
      if (!decompose_csv.empty()) detail::write_decomposition_csv(decompose_csv, q);
      return kOk;
    }

    if (*circ) {
      const auto psi = read_state_file(state_path);
      const auto part = parse_partition(partition_text);
      if (alpha == beta) throw DomainError("--alpha and --beta must name different sectors");
      const auto q = decompose(psi, part);
      const double exact = q.interference(alpha, beta);
      const auto rec = reconstruct_q_interference(psi, part, alpha, beta, shots, circuit_seed);
      out << "q_interference_exact  " << detail::fmt17(exact) << '\n';
      out << "reconstructed         " << detail::fmt17(rec.value) << '\n';
      if (shots) {
        out << "shots_per_site        " << *shots << '\n';
        out << "standard_error        " << detail::fmt17(rec.standard_error) << '\n';
      }
      out << "deviation             " << detail::fmt17(rec.value - exact) << '\n';
      for (const auto &s : rec.sites) {
        out << "site " << s.site << "  <Z> = " << detail::fmt17(s.exact_expectation);
        if (s.shot_estimate) out << "  estimate = " << detail::fmt17(*s.shot_estimate) << " +- " << detail::fmt17(*s.standard_error);
        out << '\n';
      }
      return kOk;
    }

    if (*val) {
      vopt.skip_rdm_symmetrization = inject == "skip-symmetrization";
      const auto results = run_validation(vopt);
      bool ok = true;
      for (const auto &r : results) {
        out << (r.passed() ? "PASS " : "FAIL ") << std::left << std::setw(32) << r.name << ' '
            << (r.checks - r.failures) << '/' << r.checks << '\n';
        if (!r.passed()) {
          out << "     first failing invariant: " << r.first_failure << '\n';
          ok = false;
        }
      }
      return ok ? kOk : kValidationFailure;
    }

    if (*mk) {
      const PureState psi = kind == "haar" ? haar_random(ms_n, ms_d, ms_seed) : named_state(parse_named_state(kind), ms_n, ms_d);
      if (out_path.empty()) write_state(out, psi);
      else write_state_file(out_path, psi);
      return kOk;
    }
  } catch (const ResourceError &e) {
    err << "resource error: " << e.what() << '\n';
    return kResourceError;
  } catch (const ConsistencyError &e) {
    err << "consistency error: " << e.what() << '\n';
    return kValidationFailure;
  } catch (const ParseError &e) {
    err << "parse error: " << e.what() << '\n';
    return kDomainError;
  } catch (const std::logic_error &e) { // DomainError, DimensionError, IndexError
    err << "error: " << e.what() << '\n';
    return kDomainError;
  }
  return kDomainError;
}

} // namespace mwq::cli
