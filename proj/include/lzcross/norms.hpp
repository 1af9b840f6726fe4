#pragma once

// Non-increasing rearrangements and Lorentz-Zygmund norms of sampled
// functions, plus the mixed l_theta norm of block sequences.
//
// A grid function of shape (N_0, ..., N_{m-1}) is stored row-major with
// axis 0 slowest. The rearranged profile is piecewise constant on the cells
// ((i)/N, (i+1)/N] of each axis; the only approximation in a norm is the
// integral of the weight (1 + |log2 t|)^{alpha tau} t^{tau/p - 1} over each
// cell, done after the substitution u = -log2 t (Gauss-Legendre on bounded
// cells, Gauss-Laguerre on the cell touching t = 0).

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "lzcross/indexsets.hpp"
#include "lzcross/quadrature.hpp"

namespace lzcross {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// (p, alpha, tau) of a one-dimensional Lorentz-Zygmund space L_{p,alpha,tau}.
struct ScalarSpaceParams {
  double p = 2.0;
  double alpha = 0.0;
  double tau = 2.0;

  void validate() const {
    if (!(p > 1.0) || !std::isfinite(p)) throw std::invalid_argument("ScalarSpaceParams: need 1 < p < inf");
    if (!(tau >= 1.0) || !std::isfinite(tau)) throw std::invalid_argument("ScalarSpaceParams: need 1 <= tau < inf");
    if (!std::isfinite(alpha)) throw std::invalid_argument("ScalarSpaceParams: alpha must be finite");
  }
  friend bool operator==(const ScalarSpaceParams&, const ScalarSpaceParams&) = default;
};

/// One parameter triple per axis of the anisotropic space.
struct MixedSpaceParams {
  std::vector<ScalarSpaceParams> axes;

  std::size_t size() const { return axes.size(); }
  void validate() const {
    if (axes.empty()) throw std::invalid_argument("MixedSpaceParams: need at least one axis");
    for (const auto& a : axes) a.validate();
  }
  static MixedSpaceParams uniform(std::size_t m, ScalarSpaceParams axis) {
    return MixedSpaceParams{std::vector<ScalarSpaceParams>(m, axis)};
  }
  /// p = tau = 2, alpha = 0 on every axis.
  bool is_l2() const {
    return std::all_of(axes.begin(), axes.end(),
                       [](const auto& a) { return a.p == 2.0 && a.tau == 2.0 && a.alpha == 0.0; });
  }
  friend bool operator==(const MixedSpaceParams&, const MixedSpaceParams&) = default;
};

namespace detail {

inline bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

inline std::size_t checked_volume(std::span<const std::size_t> shape) {
  std::size_t total = 1;
  for (auto n : shape) {
    if (n == 0) throw std::invalid_argument("grid axis of size 0");
    total *= n;
  }
  return total;
}

}  // namespace detail

/// Complex samples of x -> f(2 pi x) at x_j = i_j / N_j, row-major.
struct GridFunction {
  std::vector<std::size_t> shape;
  std::vector<std::complex<double>> samples;

  GridFunction() = default;
  GridFunction(std::vector<std::size_t> shape_, std::vector<std::complex<double>> samples_)
      : shape(std::move(shape_)), samples(std::move(samples_)) {
    validate();
  }
  explicit GridFunction(std::vector<std::size_t> shape_) : shape(std::move(shape_)) {
    samples.assign(detail::checked_volume(shape), {0.0, 0.0});
    validate();
  }

  std::size_t dim() const { return shape.size(); }
  std::size_t volume() const { return samples.size(); }

  void validate() const {
    if (shape.empty()) throw std::invalid_argument("GridFunction: dimension must be >= 1");
    for (auto n : shape)
      if (n < 2 || !detail::is_power_of_two(n))
        throw std::invalid_argument("GridFunction: axis sizes must be powers of two >= 2, got " + std::to_string(n));
    if (samples.size() != detail::checked_volume(shape))
      throw std::invalid_argument("GridFunction: sample count does not match shape");
  }
};

/// Non-negative values on the uniform cell grid of (0,1]^m, row-major.
struct RearrangedProfile {
  std::vector<std::size_t> shape;
  std::vector<double> values;

  std::size_t dim() const { return shape.size(); }
};

/// Per-axis exponents of a mixed l_theta norm; each in (0, inf].
struct SequenceNormSpec {
  std::vector<double> theta;

  void validate() const {
    for (double t : theta)
      if (!(t > 0.0)) throw std::invalid_argument("SequenceNormSpec: exponents must be > 0 or inf");
  }
};

inline RearrangedProfile magnitudes(const GridFunction& f) {
  f.validate();
  RearrangedProfile out{f.shape, std::vector<double>(f.volume())};
  std::transform(f.samples.begin(), f.samples.end(), out.values.begin(), [](auto z) { return std::abs(z); });
  return out;
}

/// Sorts every line along `axis` in non-increasing order; other axes untouched.
inline RearrangedProfile rearrange_axis(RearrangedProfile profile, std::size_t axis) {
  if (axis >= profile.dim())
    throw std::out_of_range("rearrange_axis: axis " + std::to_string(axis) + " out of range for dimension " +
                            std::to_string(profile.dim()));
  const std::size_t len = profile.shape[axis];
  std::size_t inner = 1;
  for (std::size_t j = axis + 1; j < profile.dim(); ++j) inner *= profile.shape[j];
  const std::size_t outer = profile.values.size() / (len * inner);
  std::vector<double> line(len);
  for (std::size_t o = 0; o < outer; ++o) {
    for (std::size_t i = 0; i < inner; ++i) {
      const std::size_t base = o * len * inner + i;
      for (std::size_t k = 0; k < len; ++k) line[k] = std::abs(profile.values[base + k * inner]);
      std::sort(line.begin(), line.end(), std::greater<>());
      for (std::size_t k = 0; k < len; ++k) profile.values[base + k * inner] = line[k];
    }
  }
  return profile;
}

inline RearrangedProfile rearrange_axis(const GridFunction& f, std::size_t axis) {
  return rearrange_axis(magnitudes(f), axis);
}

/// |f| rearranged along axis 0, then axis 1, ..., then axis m-1.
inline RearrangedProfile iterated_rearrangement(const GridFunction& f) {
  RearrangedProfile profile = magnitudes(f);
  for (std::size_t j = 0; j < profile.dim(); ++j) profile = rearrange_axis(std::move(profile), j);
  return profile;
}

/// W[i] = int over ((i)/N, (i+1)/N] of (1 + |log2 t|)^{alpha tau} t^{tau/p - 1} dt.
inline std::vector<double> cell_weights(std::size_t cells, const ScalarSpaceParams& params) {
  params.validate();
  if (cells == 0) throw std::invalid_argument("cell_weights: need at least one cell");
  const double ln2 = std::numbers::ln2;
  const double rate = params.tau / params.p;  // integrand ~ 2^{-u * rate} in u
  const double power = params.alpha * params.tau;
  const double n = static_cast<double>(cells);
  std::vector<double> w(cells);

  // Cell touching zero: u in [log2 N, inf), u = U + v / c with c = rate * ln2.
  {
    const double big_u = std::log2(n);
    const double c = rate * ln2;
    const auto& rule = quadrature::GaussLaguerre<32>::instance();
    const double tail = rule.integrate([&](double v) { return std::pow(1.0 + big_u + v / c, power); });
    w[0] = ln2 / c * std::pow(n, -rate) * tail;
  }
  for (std::size_t i = 1; i < cells; ++i) {
    const double u_lo = std::log2(n / static_cast<double>(i + 1));
    const double u_hi = std::log2(n / static_cast<double>(i));
    w[i] = ln2 * quadrature::gauss_legendre16(
                     [&](double u) { return std::pow(1.0 + u, power) * std::exp2(-u * rate); }, u_lo, u_hi);
  }
  return w;
}

/// ||f||_{p,alpha,tau} of a one-dimensional non-increasing profile.
inline double lz_scalar_norm(std::span<const double> profile, const ScalarSpaceParams& params) {
  const auto w = cell_weights(profile.size(), params);
  double acc = 0.0;
  for (std::size_t i = 0; i < profile.size(); ++i)
    if (profile[i] != 0.0) acc += std::pow(std::abs(profile[i]), params.tau) * w[i];
  return std::pow(acc, 1.0 / params.tau);
}

inline double lz_scalar_norm(const RearrangedProfile& profile, const ScalarSpaceParams& params) {
  if (profile.dim() != 1) throw std::invalid_argument("lz_scalar_norm: profile must be one-dimensional");
  return lz_scalar_norm(std::span<const double>(profile.values), params);
}

/// Iterated weighted integral of an already rearranged profile: axis 0 is
/// integrated first (innermost), axis m-1 last.
inline double anisotropic_norm(const RearrangedProfile& profile, const MixedSpaceParams& params) {
  params.validate();
  if (params.size() != profile.dim())
    throw std::invalid_argument("anisotropic_norm: parameter count does not match grid dimension");
  std::vector<double> current = profile.values;
  std::size_t remaining = current.size();
  for (std::size_t j = 0; j < profile.dim(); ++j) {
    const std::size_t len = profile.shape[j];
    const std::size_t inner = remaining / len;
    const auto w = cell_weights(len, params.axes[j]);
    const double tau = params.axes[j].tau;
    std::vector<double> next(inner, 0.0);
    for (std::size_t k = 0; k < len; ++k) {
      const double wk = w[k];
      const double* row = current.data() + k * inner;
      for (std::size_t i = 0; i < inner; ++i)
        if (row[i] != 0.0) next[i] += std::pow(row[i], tau) * wk;
    }
    for (auto& v : next) v = std::pow(v, 1.0 / tau);
    current = std::move(next);
    remaining = inner;
  }
  return current.front();
}

/// ||f||*_{p,alpha,tau} of a grid function (iterated rearrangement first).
inline double anisotropic_norm(const GridFunction& f, const MixedSpaceParams& params) {
  return anisotropic_norm(iterated_rearrangement(f), params);
}

/// Mixed l_theta norm of a finitely supported sequence: axis 0 innermost.
/// Entries of `support` absent from `values` count as 0. theta_j = inf takes
/// the supremum on that axis; theta_j < 1 gives the usual quasi-norm.
inline double mixed_sequence_norm(const std::map<MultiIndex, double>& values, const SequenceNormSpec& spec,
                                  const std::vector<MultiIndex>& support) {
  spec.validate();
  const std::size_t m = spec.theta.size();
  if (m == 0) throw std::invalid_argument("mixed_sequence_norm: empty exponent list");
  std::map<std::vector<std::int64_t>, double> level;
  for (const auto& s : support) {
    if (s.size() != m) throw std::invalid_argument("mixed_sequence_norm: index dimension mismatch");
    auto it = values.find(s);
    const double v = it == values.end() ? 0.0 : std::abs(it->second);
    level.emplace(s.entries(), v);
  }
  if (level.empty()) return 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    const double theta = spec.theta[j];
    // Group by the trailing coordinates (j+1 .. m-1); keys keep only those.
    std::map<std::vector<std::int64_t>, double> next;
    for (const auto& [key, v] : level) {
      std::vector<std::int64_t> tail(key.begin() + 1, key.end());
      auto [it, inserted] = next.try_emplace(std::move(tail), 0.0);
      if (std::isinf(theta))
        it->second = std::max(it->second, v);
      else if (v != 0.0)
        it->second += std::pow(v, theta);
    }
    if (!std::isinf(theta))
      for (auto& [key, v] : next) v = std::pow(v, 1.0 / theta);
    level = std::move(next);
  }
  return level.begin()->second;
}

/// Mixed l_theta norm over the keys of `values`.
inline double mixed_sequence_norm(const std::map<MultiIndex, double>& values, const SequenceNormSpec& spec) {
  std::vector<MultiIndex> support;
  support.reserve(values.size());
  for (const auto& [s, v] : values) support.push_back(s);
  return mixed_sequence_norm(values, spec, support);
}

}  // namespace lzcross
