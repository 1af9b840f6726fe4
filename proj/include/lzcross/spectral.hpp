#pragma once

// Finitely supported trigonometric polynomials sum_k a_k e^{i<k,x>}, their
// exact sampling on power-of-two grids, dyadic block components and
// hyperbolic-cross truncation.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "lzcross/fft.hpp"
#include "lzcross/indexsets.hpp"
#include "lzcross/norms.hpp"

namespace lzcross {

/// Coefficient map k -> a_k with a fixed dimension m.
class SpectralFunction {
 public:
  using Coefficients = std::map<FrequencyIndex, std::complex<double>>;

  SpectralFunction() = default;
  explicit SpectralFunction(std::size_t m) : dim_(m) {
    if (m == 0) throw std::invalid_argument("SpectralFunction: dimension must be >= 1");
  }
  SpectralFunction(std::size_t m, Coefficients coeffs) : SpectralFunction(m) {
    for (auto& [k, a] : coeffs) set(k, a);
  }

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return coeffs_.size(); }
  bool empty() const { return coeffs_.empty(); }
  const Coefficients& coefficients() const { return coeffs_; }
  auto begin() const { return coeffs_.begin(); }
  auto end() const { return coeffs_.end(); }

  std::complex<double> at(const FrequencyIndex& k) const {
    auto it = coeffs_.find(k);
    return it == coeffs_.end() ? std::complex<double>{} : it->second;
  }

  void set(const FrequencyIndex& k, std::complex<double> a) {
    if (k.size() != dim_) throw std::invalid_argument("SpectralFunction: harmonic " + k.to_string() + " has wrong dimension");
    coeffs_[k] = a;
  }
  void add(const FrequencyIndex& k, std::complex<double> a) {
    if (k.size() != dim_) throw std::invalid_argument("SpectralFunction: harmonic " + k.to_string() + " has wrong dimension");
    coeffs_[k] += a;
  }

  /// max |k_j| per axis over the support (zeros when empty).
  std::vector<std::int64_t> bandwidth() const {
    std::vector<std::int64_t> bw(dim_, 0);
    for (const auto& [k, a] : coeffs_)
      for (std::size_t j = 0; j < dim_; ++j) bw[j] = std::max(bw[j], k[j] < 0 ? -k[j] : k[j]);
    return bw;
  }

  template <class Pred>
  SpectralFunction filtered(Pred&& keep) const {
    SpectralFunction out(dim_);
    for (const auto& [k, a] : coeffs_)
      if (keep(k)) out.coeffs_.emplace_hint(out.coeffs_.end(), k, a);
    return out;
  }

  SpectralFunction scaled(std::complex<double> c) const {
    SpectralFunction out(*this);
    for (auto& [k, a] : out.coeffs_) a *= c;
    return out;
  }

  friend bool operator==(const SpectralFunction&, const SpectralFunction&) = default;

 private:
  std::size_t dim_ = 1;
  Coefficients coeffs_;
};

/// Per-axis grid sizes (powers of two).
struct GridSpec {
  std::vector<std::size_t> shape;

  std::size_t dim() const { return shape.size(); }
  std::size_t volume() const {
    std::size_t v = 1;
    for (auto n : shape) v *= n;
    return v;
  }

  /// Smallest power-of-two grid with N_j >= 2 * bandwidth_j + 2, times
  /// 2^oversample on every axis.
  static GridSpec resolving(const std::vector<std::int64_t>& bandwidth, unsigned oversample = 0) {
    GridSpec g;
    for (auto b : bandwidth) {
      std::size_t n = 2;
      while (n < static_cast<std::size_t>(2 * b + 2)) n *= 2;
      g.shape.push_back(n << oversample);
    }
    return g;
  }
  static GridSpec resolving(const SpectralFunction& f, unsigned oversample = 0) {
    return resolving(f.bandwidth(), oversample);
  }

  /// True when every |k_j| < N_j / 2.
  bool resolves(const std::vector<std::int64_t>& bandwidth) const {
    if (bandwidth.size() != shape.size()) return false;
    for (std::size_t j = 0; j < shape.size(); ++j)
      if (bandwidth[j] >= static_cast<std::int64_t>(shape[j] / 2)) return false;
    return true;
  }
};

namespace detail {

inline std::size_t wrapped_offset(const FrequencyIndex& k, const std::vector<std::size_t>& shape) {
  std::size_t offset = 0;
  for (std::size_t j = 0; j < shape.size(); ++j) {
    const auto n = static_cast<std::int64_t>(shape[j]);
    const std::int64_t bin = ((k[j] % n) + n) % n;
    offset = offset * shape[j] + static_cast<std::size_t>(bin);
  }
  return offset;
}

inline void require_resolved(const SpectralFunction& f, const GridSpec& g, const char* what) {
  if (g.dim() != f.dim()) throw std::invalid_argument(std::string(what) + ": grid dimension mismatch");
  if (!g.resolves(f.bandwidth()))
    throw std::invalid_argument(std::string(what) + ": grid too coarse for bandwidth (need |k_j| < N_j/2)");
}

}  // namespace detail

/// Samples of sum_k a_k e^{2 pi i <k, x>} at x_j = i_j / N_j.
inline GridFunction synthesize(const SpectralFunction& f, const GridSpec& g) {
  detail::require_resolved(f, g, "synthesize");
  GridFunction out(g.shape);
  for (const auto& [k, a] : f) out.samples[detail::wrapped_offset(k, g.shape)] += a;
  if (!f.empty()) fft::transform(out.samples, out.shape, fft::Direction::backward);
  return out;
}

/// Fourier coefficients with |k_j| <= band_j, normalized by the grid volume.
/// Coefficients of magnitude at most `drop_relative` times the largest one
/// are treated as transform noise and omitted.
inline SpectralFunction analyze(const GridFunction& f, const MultiIndex& band, double drop_relative = 1e-13) {
  f.validate();
  if (band.size() != f.dim()) throw std::invalid_argument("analyze: band dimension mismatch");
  for (std::size_t j = 0; j < band.size(); ++j)
    if (band[j] < 0 || band[j] >= static_cast<std::int64_t>(f.shape[j] / 2))
      throw std::invalid_argument("analyze: band too large for grid (need band_j < N_j/2)");
  std::vector<std::complex<double>> data = f.samples;
  fft::transform(data, f.shape, fft::Direction::forward);
  const double scale = 1.0 / static_cast<double>(f.volume());

  std::vector<std::vector<std::int64_t>> axes;
  for (auto b : band) {
    std::vector<std::int64_t> a;
    for (std::int64_t k = -b; k <= b; ++k) a.push_back(k);
    axes.push_back(std::move(a));
  }
  std::vector<std::pair<FrequencyIndex, std::complex<double>>> picked;
  double largest = 0.0;
  lzcross::detail::for_each_product<FrequencyIndex>(axes, [&](const FrequencyIndex& k) {
    const auto a = data[detail::wrapped_offset(k, f.shape)] * scale;
    largest = std::max(largest, std::abs(a));
    picked.emplace_back(k, a);
  });
  SpectralFunction out(f.dim());
  for (const auto& [k, a] : picked)
    if (std::abs(a) > drop_relative * largest) out.set(k, a);
  return out;
}

/// delta_s(f): coefficients restricted to rho(s).
inline SpectralFunction block_component(const SpectralFunction& f, const MultiIndex& s) {
  if (s.size() != f.dim()) throw std::invalid_argument("block_component: dimension mismatch");
  return f.filtered([&](const FrequencyIndex& k) { return block_of(k) == s; });
}

/// All nonzero block components, keyed by block index.
inline std::map<MultiIndex, SpectralFunction> block_decomposition(const SpectralFunction& f) {
  std::map<MultiIndex, SpectralFunction> out;
  for (const auto& [k, a] : f) {
    auto [it, inserted] = out.try_emplace(block_of(k), f.dim());
    it->second.set(k, a);
  }
  return out;
}

/// Fourier projection onto Q_n^gamma.
inline SpectralFunction cross_truncate(const SpectralFunction& f, const Rational& n, const Anisotropy& gamma) {
  gamma.check_dim(f.dim());
  return f.filtered([&](const FrequencyIndex& k) { return in_cross(k, n, gamma); });
}

/// f minus its projection onto Q_n^gamma.
inline SpectralFunction cross_residual(const SpectralFunction& f, const Rational& n, const Anisotropy& gamma) {
  gamma.check_dim(f.dim());
  return f.filtered([&](const FrequencyIndex& k) { return !in_cross(k, n, gamma); });
}

/// sqrt(sum |a_k|^2), the L2 norm by Parseval.
inline double parseval_norm(const SpectralFunction& f) {
  double acc = 0.0;
  for (const auto& [k, a] : f) acc += std::norm(a);
  return std::sqrt(acc);
}

/// Grid-free L2 projection error sqrt(sum_{k not in Q_n} |a_k|^2).
inline double l2_tail(const SpectralFunction& f, const Rational& n, const Anisotropy& gamma) {
  return parseval_norm(cross_residual(f, n, gamma));
}

/// Target-norm error of the projection onto Q_n^gamma, measured on grid `g`.
/// For an L2 target the grid value is checked against the Parseval tail.
inline double truncation_error(const SpectralFunction& f, const Rational& n, const Anisotropy& gamma,
                               const MixedSpaceParams& target, const GridSpec& g) {
  detail::require_resolved(f, g, "truncation_error");
  const SpectralFunction residual = cross_residual(f, n, gamma);
  if (residual.empty()) return 0.0;
  const double error = anisotropic_norm(synthesize(residual, g), target);
  if (target.is_l2()) {
    const double tail = parseval_norm(residual);
    if (std::abs(error - tail) > 1e-8 * tail)
      throw std::logic_error("truncation_error: grid norm " + std::to_string(error) +
                             " disagrees with Parseval tail " + std::to_string(tail));
  }
  return error;
}

/// sum_{k in rho(s)} e^{i<k,x>}.
inline SpectralFunction dirichlet_block(const MultiIndex& s) {
  SpectralFunction out(s.size());
  for (const auto& k : rho_block(s)) out.set(k, 1.0);
  return out;
}

}  // namespace lzcross
