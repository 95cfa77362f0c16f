#pragma once

#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"
#include "linalg.hpp"

namespace mwq {

/// One charge sector: a d_alpha-dimensional block hosting `multiplicity` copies of an
/// irrep of dimension `dim_irrep`.
struct SectorSpec {
  std::size_t label = 0;
  std::size_t dim = 1;
  std::size_t dim_irrep = 1;
  std::size_t multiplicity = 1;

  /// Abelian-style sector: one-dimensional irreps, multiplicity = dim.
  static SectorSpec abelian(std::size_t label, std::size_t dim) { return {label, dim, 1, dim}; }

  friend bool operator==(const SectorSpec &, const SectorSpec &) = default;
};

/// Ordered split of the local dimension into sector dimensions, d = sum_alpha d_alpha.
class ChargePartition {
public:
  ChargePartition(std::size_t d, std::vector<SectorSpec> sectors) : d_(d), sectors_(std::move(sectors)) {
    if (sectors_.empty()) throw DomainError("partition needs at least one sector");
    std::size_t total = 0;
    for (const auto &s : sectors_) {
      if (s.dim < 1) throw DomainError("sector dimensions must be >= 1");
      if (s.dim_irrep < 1 || s.dim_irrep * s.multiplicity != s.dim) {
        throw DomainError("sector " + std::to_string(s.label) + ": d_alpha = " + std::to_string(s.dim) +
                          " is not dim_irrep * multiplicity = " + std::to_string(s.dim_irrep) + " * " +
                          std::to_string(s.multiplicity));
      }
      total += s.dim;
    }
    if (total != d_) {
      throw DomainError("sector dimensions sum to " + std::to_string(total) + ", local dimension is " +
                        std::to_string(d_));
    }
  }

  /// Sectors labelled 0, 1, ... in the given order with unit irrep dimension.
  static ChargePartition from_dims(const std::vector<std::size_t> &dims) {
    std::vector<SectorSpec> s;
    s.reserve(dims.size());
    for (std::size_t i = 0; i < dims.size(); ++i) s.push_back(SectorSpec::abelian(i, dims[i]));
    return {std::accumulate(dims.begin(), dims.end(), std::size_t{0}), std::move(s)};
  }

  /// Z_m acting through its regular representation: m one-dimensional sectors.
  static ChargePartition regular_abelian(std::size_t m) { return from_dims(std::vector<std::size_t>(m, 1)); }

  std::size_t d() const noexcept { return d_; }
  std::size_t size() const noexcept { return sectors_.size(); }
  const std::vector<SectorSpec> &sectors() const noexcept { return sectors_; }
  const SectorSpec &operator[](std::size_t i) const { return sectors_.at(i); }

  std::vector<std::size_t> dims() const {
    std::vector<std::size_t> out;
    for (const auto &s : sectors_) out.push_back(s.dim);
    return out;
  }

  /// First basis index of sector i (blocks are contiguous, in partition order).
  std::size_t offset(std::size_t i) const {
    std::size_t o = 0;
    for (std::size_t j = 0; j < i; ++j) o += sectors_.at(j).dim;
    return o;
  }

  /// "a+b+c", as used in CSV output.
  std::string to_string() const {
    std::string out;
    for (std::size_t i = 0; i < sectors_.size(); ++i) {
      if (i) out += '+';
      out += std::to_string(sectors_[i].dim);
    }
    return out;
  }

  friend bool operator==(const ChargePartition &, const ChargePartition &) = default;

private:
  std::size_t d_;
  std::vector<SectorSpec> sectors_;
};

namespace detail {

inline std::vector<std::size_t> parse_dim_list(std::string_view text, char sep) {
  std::vector<std::size_t> out;
  std::string item;
  std::istringstream ss{std::string(text)};
  while (std::getline(ss, item, sep)) {
    std::size_t pos = 0;
    unsigned long v = 0;
    try {
      v = std::stoul(item, &pos);
    } catch (const std::exception &) {
      throw ParseError("bad sector dimension '" + item + "'");
    }
    if (pos != item.size() || item.empty() || item[0] == '-') {
      throw ParseError("bad sector dimension '" + item + "'");
    }
    out.push_back(v);
  }
  if (out.empty()) throw ParseError("empty sector list");
  return out;
}

} // namespace detail

/// Parses `d=6 sectors=3,2,1`. The bare forms `3,2,1` and `3+2+1` are accepted too, with d
/// taken as the sum.
inline ChargePartition parse_partition(std::string_view text) {
  std::istringstream ss{std::string(text)};
  std::string tok;
  std::optional<std::size_t> d;
  std::optional<std::vector<std::size_t>> dims;
  while (ss >> tok) {
    if (tok.rfind("d=", 0) == 0) {
      try {
        std::size_t pos = 0;
        d = std::stoul(tok.substr(2), &pos);
        if (pos != tok.size() - 2) throw ParseError("bad d in partition '" + tok + "'");
      } catch (const std::logic_error &) {
        throw ParseError("bad d in partition '" + tok + "'");
      }
    } else if (tok.rfind("sectors=", 0) == 0) {
      dims = detail::parse_dim_list(tok.substr(8), ',');
    } else if (!dims && tok.find('=') == std::string::npos) {
      dims = detail::parse_dim_list(tok, tok.find('+') != std::string::npos ? '+' : ',');
    } else {
      throw ParseError("unexpected token '" + tok + "' in partition");
    }
  }
  if (!dims) throw ParseError("partition has no sectors");
  auto p = ChargePartition::from_dims(*dims);
  if (d && *d != p.d()) {
    throw DomainError("sectors sum to " + std::to_string(p.d()) + " but d=" + std::to_string(*d));
  }
  return p;
}

/// All compositions of d in descending-lexicographic order ([d], [d-1,1], ...),
/// truncated to the first `cap` entries.
inline std::vector<ChargePartition> ordered_partitions(std::size_t d, std::size_t cap = SIZE_MAX) {
  std::vector<ChargePartition> out;
  std::vector<std::size_t> cur;
  auto rec = [&](auto &self, std::size_t remaining) -> void {
    if (out.size() >= cap) return;
    if (remaining == 0) {
      out.push_back(ChargePartition::from_dims(cur));
      return;
    }
    for (std::size_t first = remaining; first >= 1; --first) {
      cur.push_back(first);
      self(self, remaining - first);
      cur.pop_back();
      if (out.size() >= cap) return;
    }
  };
  if (d >= 1) rec(rec, d);
  return out;
}

/// Orthogonal projectors onto the charge sectors of one site.
class ProjectorFamily {
public:
  ProjectorFamily(ChargePartition partition, std::vector<ComplexMatrix> projectors)
      : partition_(std::move(partition)), projectors_(std::move(projectors)) {
    if (projectors_.size() != partition_.size()) throw DimensionError("one projector per sector required");
    for (const auto &p : projectors_) {
      if (p.rows() != partition_.d() || p.cols() != partition_.d()) {
        throw DimensionError("projector shape " + p.shape() + " does not match d = " +
                             std::to_string(partition_.d()));
      }
    }
  }

  const ChargePartition &partition() const noexcept { return partition_; }
  std::size_t d() const noexcept { return partition_.d(); }
  std::size_t size() const noexcept { return projectors_.size(); }
  const ComplexMatrix &operator[](std::size_t i) const { return projectors_.at(i); }
  const std::vector<ComplexMatrix> &projectors() const noexcept { return projectors_; }

private:
  ChargePartition partition_;
  std::vector<ComplexMatrix> projectors_;
};

/// Diagonal projectors, ones on each sector's contiguous index block. If `basis` is given,
/// every projector is conjugated as V P V^dagger (V must be unitary).
inline ProjectorFamily projectors(const ChargePartition &partition,
                                  const std::optional<ComplexMatrix> &basis = std::nullopt) {
  const std::size_t d = partition.d();
  if (basis && (basis->rows() != d || basis->cols() != d)) {
    throw DimensionError("basis rotation must be " + std::to_string(d) + "x" + std::to_string(d));
  }
  if (basis && max_abs_diff((*basis) * basis->adjoint(), ComplexMatrix::identity(d)) > 1e-10) {
    throw DomainError("basis rotation is not unitary");
  }
  std::vector<ComplexMatrix> ps;
  std::size_t offset = 0;
  for (const auto &s : partition.sectors()) {
    ComplexMatrix p(d, d);
    for (std::size_t i = offset; i < offset + s.dim; ++i) p(i, i) = 1.0;
    offset += s.dim;
    ps.push_back(basis ? (*basis) * p * basis->adjoint() : std::move(p));
  }
  return {partition, std::move(ps)};
}

/// p_{k,alpha} = Tr(P_alpha rho_k), indexed by sector position.
inline std::vector<double> sector_probabilities(const ComplexMatrix &rho_k, const ProjectorFamily &fam) {
  if (rho_k.rows() != fam.d() || rho_k.cols() != fam.d()) {
    throw DimensionError("RDM " + rho_k.shape() + " does not match projector dimension " +
                         std::to_string(fam.d()));
  }
  std::vector<double> p;
  p.reserve(fam.size());
  for (const auto &proj : fam.projectors()) p.push_back(trace_of_product(proj, rho_k).real());
  return p;
}

} // namespace mwq
