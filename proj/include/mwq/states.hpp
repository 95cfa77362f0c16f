#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"
#include "pure_state.hpp"

namespace mwq {

inline constexpr std::uint64_t kDefaultDimCap = std::uint64_t{1} << 20;

/// Recorded alongside every ensemble output so results can be regenerated.
inline constexpr std::string_view kGeneratorName =
    "std::mt19937_64 seeded by splitmix64(seed); std::normal_distribution<double>; "
    "child seed = splitmix64(master ^ splitmix64(index + 1))";

/// One round of the splitmix64 finalizer.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed for sample `index` of an ensemble. Depends only on (master, index), never on scheduling.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept {
  return splitmix64(master ^ splitmix64(index + 1));
}

/// d^n, rejecting d < 2 and anything above `dim_cap`.
inline std::uint64_t checked_hilbert_dim(std::size_t n, std::size_t d, std::uint64_t dim_cap) {
  if (d < 2) throw DomainError("local dimension must be >= 2, got " + std::to_string(d));
  if (n < 1) throw DomainError("particle count must be >= 1");
  std::uint64_t dim = 1;
  for (std::size_t i = 0; i < n; ++i) {
    if (dim > dim_cap / d) {
      throw ResourceError("d^n = " + std::to_string(d) + "^" + std::to_string(n) +
                          " exceeds the dimension cap " + std::to_string(dim_cap));
    }
    dim *= d;
  }
  return dim;
}

/// Haar-random pure state: i.i.d. standard complex Gaussians, then normalized.
/// Bit-identical for equal (n, d, seed).
inline PureState haar_random(std::size_t n, std::size_t d, std::uint64_t seed,
                             std::uint64_t dim_cap = kDefaultDimCap) {
  const std::uint64_t dim = checked_hilbert_dim(n, d, dim_cap);
  std::mt19937_64 rng(splitmix64(seed));
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<complex> amps(dim);
  for (auto &a : amps) {
    const double re = normal(rng);
    const double im = normal(rng);
    a = complex{re, im};
  }
  return PureState::normalized(n, d, std::move(amps));
}

enum class NamedState { ProductZero, Ghz, W, Bell, PlusProduct };

inline NamedState parse_named_state(std::string_view s) {
  if (s == "product-zero") return NamedState::ProductZero;
  if (s == "ghz") return NamedState::Ghz;
  if (s == "w") return NamedState::W;
  if (s == "bell") return NamedState::Bell;
  if (s == "plus-product") return NamedState::PlusProduct;
  throw DomainError("unknown named state '" + std::string(s) + "'");
}

/// Standard benchmark states. GHZ uses levels 0 and 1 at any d; plus-product is
/// the uniform superposition over all d levels on every site.
inline PureState named_state(NamedState kind, std::size_t n, std::size_t d) {
  const std::uint64_t dim = checked_hilbert_dim(n, d, kDefaultDimCap);
  std::vector<complex> amps(dim);
  switch (kind) {
  case NamedState::ProductZero:
    amps[0] = 1.0;
    break;
  case NamedState::Ghz: {
    std::uint64_t ones = 0;
    for (std::size_t i = 0; i < n; ++i) ones = ones * d + 1;
    amps[0] += 1.0 / std::sqrt(2.0);
    amps[ones] += 1.0 / std::sqrt(2.0);
    break;
  }
  case NamedState::W:
    if (d != 2) throw DomainError("W state requires d = 2");
    if (n < 2) throw DomainError("W state requires n >= 2");
    for (std::size_t k = 0; k < n; ++k) amps[std::uint64_t{1} << k] = 1.0 / std::sqrt(double(n));
    break;
  case NamedState::Bell:
    if (d != 2 || n != 2) throw DomainError("Bell state requires n = 2 and d = 2");
    amps[0] = amps[3] = 1.0 / std::sqrt(2.0);
    break;
  case NamedState::PlusProduct:
    for (auto &a : amps) a = 1.0 / std::sqrt(double(dim));
    break;
  }
  return PureState(n, d, std::move(amps));
}

// State file: "n d" on line 1, then "index re im" lines with ascending indices.
// Indices that do not appear have zero amplitude.

inline void write_state(std::ostream &os, const PureState &psi) {
  os << psi.n() << ' ' << psi.d() << '\n';
  os.precision(17);
  for (std::size_t i = 0; i < psi.size(); ++i) {
    os << i << ' ' << psi[i].real() << ' ' << psi[i].imag() << '\n';
  }
}

inline PureState read_state(std::istream &is) {
  std::string line;
  std::size_t line_no = 0;

  auto next_content_line = [&](std::string &out) {
    while (std::getline(is, out)) {
      ++line_no;
      if (out.find_first_not_of(" \t\r") != std::string::npos) return true;
    }
    return false;
  };

  if (!next_content_line(line)) throw ParseError("empty state file", 1);
  std::size_t n = 0, d = 0;
  {
    std::istringstream hs(line);
    std::string extra;
    if (!(hs >> n >> d) || (hs >> extra)) throw ParseError("expected header 'n d'", line_no);
  }
  const std::uint64_t dim = checked_hilbert_dim(n, d, kDefaultDimCap);

  std::vector<complex> amps(dim);
  bool have_prev = false;
  std::uint64_t prev = 0;
  while (next_content_line(line)) {
    std::istringstream ls(line);
    long long index = 0;
    double re = 0.0, im = 0.0;
    std::string extra;
    if (!(ls >> index >> re >> im) || (ls >> extra)) {
      throw ParseError("expected 'index re im'", line_no);
    }
    if (index < 0 || static_cast<std::uint64_t>(index) >= dim) {
      throw ParseError("index " + std::to_string(index) + " out of range [0, " + std::to_string(dim) + ")",
                       line_no);
    }
    const auto idx = static_cast<std::uint64_t>(index);
    if (have_prev && idx <= prev) throw ParseError("indices must be strictly ascending", line_no);
    have_prev = true;
    prev = idx;
    amps[idx] = complex{re, im};
  }
  try {
    return PureState(n, d, std::move(amps));
  } catch (const DomainError &e) {
    throw ParseError(e.what());
  }
}

inline PureState read_state_file(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open state file '" + path + "'");
  return read_state(in);
}

inline void write_state_file(const std::string &path, const PureState &psi) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot open '" + path + "' for writing");
  write_state(out, psi);
}

} // namespace mwq
