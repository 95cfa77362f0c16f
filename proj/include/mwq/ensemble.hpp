#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "entanglement.hpp"
#include "errors.hpp"
#include "haar_oracle.hpp"
#include "states.hpp"
#include "symmetry.hpp"

namespace mwq {

inline constexpr std::size_t kDefaultPartitionCap = 16;

struct SweepConfig {
  std::vector<std::size_t> n_values{3, 4, 5};
  std::vector<std::size_t> d_values{2, 3, 4, 5, 6};
  /// Explicit partitions; each applies to the d it sums to. Empty means every ordered
  /// partition of each d, truncated to `partition_cap`.
  std::vector<ChargePartition> partitions;
  std::size_t partition_cap = kDefaultPartitionCap;
  std::size_t samples = 500;
  std::uint64_t master_seed = 0;
  std::string output_path;
  std::uint64_t dim_cap = kDefaultDimCap;
  std::size_t workers = 1;

  /// Throws DomainError / ResourceError naming the offending entry.
  void validate() const {
    if (samples < 2) throw DomainError("samples must be >= 2");
    if (n_values.empty() || d_values.empty()) throw DomainError("empty n or d grid");
    if (workers < 1) throw DomainError("workers must be >= 1");
    for (auto n : n_values) {
      if (n < 2) throw DomainError("n must be >= 2, got " + std::to_string(n));
      for (auto d : d_values) checked_hilbert_dim(n, d, dim_cap);
    }
    for (const auto &p : partitions) {
      if (std::find(d_values.begin(), d_values.end(), p.d()) == d_values.end()) {
        throw DomainError("partition " + p.to_string() + " matches no d in the grid");
      }
    }
  }

  std::vector<ChargePartition> partitions_for(std::size_t d) const {
    if (partitions.empty()) return ordered_partitions(d, partition_cap);
    std::vector<ChargePartition> out;
    for (const auto &p : partitions)
      if (p.d() == d) out.push_back(p);
    return out;
  }
};

enum class TermKind { Sector, Interference, Total };

inline const char *to_string(TermKind k) {
  switch (k) {
  case TermKind::Sector: return "sector";
  case TermKind::Interference: return "interference";
  case TermKind::Total: return "total";
  }
  return "?";
}

struct EnsembleRow {
  std::size_t n = 0;
  std::size_t d = 0;
  std::string partition;
  TermKind kind = TermKind::Total;
  std::string label;
  std::vector<std::size_t> sector_dims; // d_alpha (sector), d_alpha,d_beta (interference), empty (total)
  double mean = 0.0;
  double std = 0.0;
  double theory = 0.0;
  double abs_err = 0.0;
  std::size_t samples = 0;
  std::uint64_t seed = 0;

  double standard_error() const { return std / std::sqrt(double(samples)); }
};

struct EnsembleReport {
  std::vector<EnsembleRow> rows;
};

/// Seed of the state ensemble at grid point (n, d); shared by all partitions of that d.
inline std::uint64_t grid_seed(std::uint64_t master, std::size_t n, std::size_t d) {
  return derive_seed(master, (std::uint64_t(n) << 32) | std::uint64_t(d));
}

namespace detail {

struct MeanStd {
  double mean;
  double std;
};

// Two-pass, in sample order.
inline MeanStd mean_std(const std::vector<double> &v) {
  double s = 0.0;
  for (double x : v) s += x;
  const double mean = s / double(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / double(v.size() - 1))};
}

inline std::string sector_label(const ChargePartition &p, std::size_t a) {
  return "s" + std::to_string(a) + "[" + std::to_string(p[a].dim) + "]";
}

} // namespace detail

/// Draws `samples` Haar states per (n, d), decomposes each under every partition and
/// aggregates per term. Output is independent of `workers`.
inline EnsembleReport run_sweep(const SweepConfig &cfg) {
  cfg.validate();
  EnsembleReport report;
  for (std::size_t n : cfg.n_values) {
    for (std::size_t d : cfg.d_values) {
      const auto parts = cfg.partitions_for(d);
      if (parts.empty()) continue;
      std::vector<ProjectorFamily> fams;
      for (const auto &p : parts) fams.push_back(projectors(p));

      // values[partition][term][sample]; terms: sectors, then pairs in (a<b) order, then total
      std::vector<std::vector<std::vector<double>>> values(parts.size());
      for (std::size_t i = 0; i < parts.size(); ++i) {
        const std::size_t m = parts[i].size();
        values[i].assign(m + m * (m - 1) / 2 + 1, std::vector<double>(cfg.samples));
      }

      const std::uint64_t gseed = grid_seed(cfg.master_seed, n, d);
      auto work = [&](std::size_t first, std::size_t stride) {
        for (std::size_t j = first; j < cfg.samples; j += stride) {
          const PureState psi = haar_random(n, d, derive_seed(gseed, j), cfg.dim_cap);
          const auto rdms = single_site_rdms(psi);
          for (std::size_t i = 0; i < parts.size(); ++i) {
            const QDecomposition q = decompose(rdms, fams[i]);
            std::size_t t = 0;
            for (double x : q.q_sector) values[i][t++][j] = x;
            for (const auto &[pair, x] : q.q_interference) values[i][t++][j] = x;
            values[i][t][j] = q.q_total;
          }
        }
      };
      const std::size_t nw = std::min(cfg.workers, cfg.samples);
      if (nw <= 1) {
        work(0, 1);
      } else {
        std::vector<std::exception_ptr> errors(nw);
        {
          std::vector<std::jthread> pool;
          for (std::size_t w = 0; w < nw; ++w) {
            pool.emplace_back([&, w] {
              try {
                work(w, nw);
              } catch (...) {
                errors[w] = std::current_exception();
              }
            });
          }
        }
        for (const auto &e : errors)
          if (e) std::rethrow_exception(e);
      }

      for (std::size_t i = 0; i < parts.size(); ++i) {
        const auto &p = parts[i];
        const auto pred = haar::predict(n, p);
        auto emit = [&](TermKind kind, std::string label, std::vector<std::size_t> dims, const std::vector<double> &v,
                        double theory) {
          const auto ms = detail::mean_std(v);
          report.rows.push_back({n, d, p.to_string(), kind, std::move(label), std::move(dims), ms.mean, ms.std, theory,
                                 std::abs(ms.mean - theory), cfg.samples, gseed});
        };
        std::size_t t = 0;
        for (std::size_t a = 0; a < p.size(); ++a, ++t) {
          emit(TermKind::Sector, detail::sector_label(p, a), {p[a].dim}, values[i][t], pred.q_sector_theory[a]);
        }
        for (std::size_t a = 0; a < p.size(); ++a) {
          for (std::size_t b = a + 1; b < p.size(); ++b, ++t) {
            emit(TermKind::Interference, detail::sector_label(p, a) + "-" + detail::sector_label(p, b),
                 {p[a].dim, p[b].dim}, values[i][t], pred.q_interference_theory.at({a, b}));
          }
        }
        emit(TermKind::Total, "Q", {}, values[i][t], pred.total());
      }
    }
  }
  return report;
}

inline constexpr const char *kCsvHeader = "n,d,partition,kind,label,mean,std,theory,abs_err,samples,seed";

inline std::string format_double(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

inline void write_csv(std::ostream &os, const EnsembleReport &report) {
  os << kCsvHeader << '\n';
  for (const auto &r : report.rows) {
    os << r.n << ',' << r.d << ',' << r.partition << ',' << to_string(r.kind) << ',' << r.label << ','
       << format_double(r.mean) << ',' << format_double(r.std) << ',' << format_double(r.theory) << ','
       << format_double(r.abs_err) << ',' << r.samples << ',' << r.seed << '\n';
  }
}

/// Key-value companion of a sweep CSV: generator, seed and grid.
inline void write_metadata(std::ostream &os, const SweepConfig &cfg) {
  auto join = [](const auto &v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
    return s;
  };
  os << "generator = " << kGeneratorName << '\n';
  os << "master_seed = " << cfg.master_seed << '\n';
  os << "n_values = " << join(cfg.n_values) << '\n';
  os << "d_values = " << join(cfg.d_values) << '\n';
  os << "samples = " << cfg.samples << '\n';
  os << "dim_cap = " << cfg.dim_cap << '\n';
  if (cfg.partitions.empty()) {
    os << "partitions = all-ordered\n";
    os << "partition_cap = " << cfg.partition_cap << '\n';
  } else {
    std::string s;
    for (std::size_t i = 0; i < cfg.partitions.size(); ++i) s += (i ? ";" : "") + cfg.partitions[i].to_string();
    os << "partitions = " << s << '\n';
  }
}

namespace detail {

inline std::string trim(const std::string &s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::size_t> parse_size_list(const std::string &v, std::size_t line) {
  std::vector<std::size_t> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    try {
      std::size_t pos = 0;
      const auto x = std::stoull(item, &pos);
      if (pos != item.size() || item[0] == '-') throw std::invalid_argument(item);
      out.push_back(x);
    } catch (const std::logic_error &) {
      throw ParseError("bad integer '" + item + "'", line);
    }
  }
  return out;
}

inline std::uint64_t parse_u64(const std::string &v, std::size_t line) {
  try {
    std::size_t pos = 0;
    const auto x = std::stoull(v, &pos);
    if (pos != v.size() || v[0] == '-') throw std::invalid_argument(v);
    return x;
  } catch (const std::logic_error &) {
    throw ParseError("bad integer '" + v + "'", line);
  }
}

} // namespace detail

/// Flat `key = value` config mirroring SweepConfig. '#' starts a comment.
/// Keys: n_values, d_values, partitions (';'-separated, each `a+b+c` or `a,b,c`, or `all-ordered`),
/// partition_cap, samples, master_seed, output_path, dim_cap, workers.
inline SweepConfig parse_sweep_config(std::istream &is) {
  SweepConfig cfg;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("expected 'key = value'", line_no);
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string val = detail::trim(line.substr(eq + 1));
    if (val.empty()) throw ParseError("empty value for '" + key + "'", line_no);
    if (key == "n_values") cfg.n_values = detail::parse_size_list(val, line_no);
    else if (key == "d_values") cfg.d_values = detail::parse_size_list(val, line_no);
    else if (key == "samples") cfg.samples = detail::parse_u64(val, line_no);
    else if (key == "master_seed" || key == "seed") cfg.master_seed = detail::parse_u64(val, line_no);
    else if (key == "dim_cap") cfg.dim_cap = detail::parse_u64(val, line_no);
    else if (key == "partition_cap") cfg.partition_cap = detail::parse_u64(val, line_no);
    else if (key == "workers") cfg.workers = detail::parse_u64(val, line_no);
    else if (key == "output_path") cfg.output_path = val;
    else if (key == "partitions") {
      cfg.partitions.clear();
      if (val == "all-ordered") continue;
      std::stringstream ss(val);
      std::string item;
      while (std::getline(ss, item, ';')) {
        try {
          cfg.partitions.push_back(parse_partition(detail::trim(item)));
        } catch (const std::exception &e) {
          throw ParseError(e.what(), line_no);
        }
      }
    } else {
      throw ParseError("unknown key '" + key + "'", line_no);
    }
  }
  return cfg;
}

} // namespace mwq
