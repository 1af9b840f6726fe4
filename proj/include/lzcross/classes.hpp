#pragma once

// Nikol'skii-Besov class functional, the exponents governing the
// approximation order on step hyperbolic crosses, and the extremal
// polynomials that realize the lower bound.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lzcross/indexsets.hpp"
#include "lzcross/norms.hpp"
#include "lzcross/spectral.hpp"

namespace lzcross {

/// Source class parameters: space (p, alpha, tau^(1)), smoothness r, and the
/// block-sequence exponents theta.
struct BesovParams {
  MixedSpaceParams space;
  std::vector<double> r;
  std::vector<double> theta;

  std::size_t dim() const { return space.size(); }
  void validate() const {
    space.validate();
    if (r.size() != dim() || theta.size() != dim())
      throw std::invalid_argument("BesovParams: r and theta must have one entry per axis");
    for (double v : r)
      if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument("BesovParams: r_j must be positive");
    SequenceNormSpec{theta}.validate();
  }
};

/// Source class, target space (q, beta, tau^(2)) and the cross anisotropy gamma'.
struct TheoremParams {
  BesovParams source;
  MixedSpaceParams target;
  Anisotropy gamma_prime;

  std::size_t dim() const { return source.dim(); }
  void validate() const {
    source.validate();
    target.validate();
    if (target.size() != dim() || gamma_prime.size() != dim())
      throw std::invalid_argument("TheoremParams: dimension mismatch between source, target and gamma'");
    for (std::size_t j = 0; j < dim(); ++j) {
      const double p = source.space.axes[j].p, q = target.axes[j].p;
      if (!(p < q)) throw std::invalid_argument("TheoremParams: need p_j < q_j on axis " + std::to_string(j));
      if (!(source.r[j] > 1.0 / p - 1.0 / q))
        throw std::invalid_argument("TheoremParams: need r_j > 1/p_j - 1/q_j on axis " + std::to_string(j));
    }
  }
};

/// Exponents of the approximation order. Axis indices are 0-based.
struct DerivedExponents {
  std::vector<double> axis_rates;  // r_j + 1/q_j - 1/p_j
  Anisotropy gamma;                // axis_rates / rho_star, gamma[j0] == 1
  std::size_t j0 = 0;
  double rho_star = 0.0;
  Rational delta;                  // min_j gamma_j / gamma'_j
  std::vector<std::size_t> A;      // {j : gamma_j / gamma'_j == delta}
  std::size_t j1 = 0;              // min A
  std::size_t j_prime = 0;         // max A
  double mu = 0.0;                 // polylog exponent
};

/// tau_j^(2)-duals of the block-sequence exponents; defined where theta_j > tau_j^(2).
struct DualExponents {
  std::vector<std::optional<double>> beta_tilde;
  std::vector<std::optional<double>> beta_tilde_conjugate;
  std::vector<std::optional<double>> epsilon;
};

namespace detail {

inline double reciprocal(double x) { return std::isinf(x) ? 0.0 : 1.0 / x; }

inline bool has_zero_harmonic(const FrequencyIndex& k) {
  return std::any_of(k.begin(), k.end(), [](auto v) { return v == 0; });
}

}  // namespace detail

inline DerivedExponents derived_exponents(const TheoremParams& tp) {
  tp.validate();
  const std::size_t m = tp.dim();
  DerivedExponents d;
  d.axis_rates.resize(m);
  for (std::size_t j = 0; j < m; ++j)
    d.axis_rates[j] = tp.source.r[j] + 1.0 / tp.target.axes[j].p - 1.0 / tp.source.space.axes[j].p;
  // Smallest minimizing index; near-ties within rounding count as ties.
  d.j0 = 0;
  for (std::size_t j = 1; j < m; ++j)
    if (d.axis_rates[j] < d.axis_rates[d.j0] - 1e-12 * std::abs(d.axis_rates[d.j0])) d.j0 = j;
  d.rho_star = d.axis_rates[d.j0];

  std::vector<Rational> gamma(m);
  for (std::size_t j = 0; j < m; ++j)
    gamma[j] = j == d.j0 ? Rational(1) : Rational::approximate(d.axis_rates[j] / d.rho_star, 1'000'000, 1e-9);
  d.gamma = Anisotropy(gamma);

  std::vector<Rational> ratio(m);
  for (std::size_t j = 0; j < m; ++j) ratio[j] = gamma[j] / tp.gamma_prime[j];
  d.delta = *std::min_element(ratio.begin(), ratio.end());
  for (std::size_t j = 0; j < m; ++j)
    if (ratio[j] == d.delta) d.A.push_back(j);
  d.j1 = d.A.front();
  d.j_prime = d.A.back();

  double mu = 0.0;
  for (auto j : d.A) {
    mu += tp.target.axes[j].alpha - tp.source.space.axes[j].alpha;
    if (j != d.j1)
      mu += std::max(0.0, 1.0 / tp.target.axes[j].tau - detail::reciprocal(tp.source.theta[j]));
  }
  d.mu = mu;
  return d;
}

/// Positivity condition on (beta - alpha, tau^(2), theta) over A. With a
/// single-element A only the j' term applies.
inline bool theorem_condition_holds(const TheoremParams& tp, const DerivedExponents& d) {
  auto lam = [&](std::size_t j) { return tp.target.axes[j].alpha - tp.source.space.axes[j].alpha; };
  auto gap = [&](std::size_t j) {
    return 1.0 / tp.target.axes[j].tau - detail::reciprocal(tp.source.theta[j]);
  };
  const double last = lam(d.j_prime) + gap(d.j_prime);
  if (d.A.size() < 2) return last > 0.0;
  double first = 0.0;
  for (auto j : d.A) {
    if (j != d.j_prime) first += lam(j);
    if (j != d.j1) first += gap(j);
  }
  return std::min(first, last) > 0.0;
}

inline DualExponents dual_exponents(const TheoremParams& tp) {
  const std::size_t m = tp.dim();
  DualExponents out;
  out.beta_tilde.resize(m);
  out.beta_tilde_conjugate.resize(m);
  out.epsilon.resize(m);
  for (std::size_t j = 0; j < m; ++j) {
    const double tau2 = tp.target.axes[j].tau;
    const double theta = tp.source.theta[j];
    if (!(theta > tau2)) continue;
    const double bt = theta / tau2;
    const double conj = std::isinf(bt) ? 1.0 : bt / (bt - 1.0);
    out.beta_tilde[j] = bt;
    out.beta_tilde_conjugate[j] = conj;
    out.epsilon[j] = tau2 * conj;
  }
  return out;
}

/// 2^{-n rho*} n^{mu}.
inline double theoretical_rate(long n, const DerivedExponents& d) {
  if (n < 1) throw std::invalid_argument("theoretical_rate: need n >= 1");
  const double nn = static_cast<double>(n);
  return std::exp2(-nn * d.rho_star) * std::pow(nn, d.mu);
}

/// Throws unless no harmonic has a zero coordinate.
inline void require_zero_mean(const SpectralFunction& f) {
  for (const auto& [k, a] : f)
    if (detail::has_zero_harmonic(k))
      throw std::invalid_argument("besov_functional: harmonic " + k.to_string() +
                                  " has a zero coordinate (function is not mean-free in every variable)");
}

/// ||f|| + || { prod_j 2^{s_j r_j} ||delta_s f|| }_s ||_{l_theta}, every norm
/// taken in the source space on grid `g`.
inline double besov_functional(const SpectralFunction& f, const BesovParams& params, const GridSpec& g) {
  params.validate();
  if (f.dim() != params.dim()) throw std::invalid_argument("besov_functional: dimension mismatch");
  require_zero_mean(f);
  if (f.empty()) return 0.0;
  const double whole = anisotropic_norm(synthesize(f, g), params.space);
  std::map<MultiIndex, double> weighted;
  for (const auto& [s, block] : block_decomposition(f)) {
    double w = 1.0;
    for (std::size_t j = 0; j < s.size(); ++j) w *= std::exp2(static_cast<double>(s[j]) * params.r[j]);
    weighted.emplace(s, w * anisotropic_norm(synthesize(block, g), params.space));
  }
  return whole + mixed_sequence_norm(weighted, SequenceNormSpec{params.theta});
}

/// ||sum_{k in rho((s))} e^{ikx}||_{p,alpha,tau} on the one-dimensional grid 2^{s + oversample}.
inline double dirichlet_axis_norm(std::int64_t s, const ScalarSpaceParams& params, unsigned oversample = 3) {
  const MultiIndex block{s};
  const GridSpec g{{std::size_t{1} << (static_cast<unsigned>(s) + std::max(oversample, 1u))}};
  const auto profile = iterated_rearrangement(synthesize(dirichlet_block(block), g));
  return lz_scalar_norm(profile, params);
}

/// Result of the block-factorized functional evaluation.
struct BesovEstimate {
  double value = 0.0;
  double whole = 0.0;       // ||f|| (or its block-sum upper bound)
  double sequence = 0.0;    // weighted block-sequence norm
  bool whole_is_bound = false;
};

/// Besov functional for functions whose every block carries one constant
/// coefficient c_s on all of rho(s). Then delta_s f = c_s * (tensor product of
/// one-dimensional Dirichlet blocks), whose anisotropic norm is the product
/// of the one-dimensional norms; these are evaluated on grids 2^{s_j + oversample}.
/// ||f|| is computed on the matching grid (2^{oversample} samples per
/// period of the top harmonic) when it has at most `grid_budget` points;
/// otherwise it is replaced by the upper bound sum_s ||delta_s f||.
inline BesovEstimate besov_functional_blockwise(const SpectralFunction& f, const BesovParams& params,
                                                std::size_t grid_budget = std::size_t{1} << 22,
                                                unsigned oversample = 3) {
  params.validate();
  if (f.dim() != params.dim()) throw std::invalid_argument("besov_functional_blockwise: dimension mismatch");
  require_zero_mean(f);
  BesovEstimate est;
  if (f.empty()) return est;
  const std::size_t m = f.dim();

  std::map<std::pair<std::size_t, std::int64_t>, double> axis_norms;
  auto axis_norm = [&](std::size_t j, std::int64_t s) {
    auto [it, inserted] = axis_norms.try_emplace({j, s}, 0.0);
    if (inserted) it->second = dirichlet_axis_norm(s, params.space.axes[j], oversample);
    return it->second;
  };

  std::map<MultiIndex, double> weighted;
  double block_sum = 0.0;
  for (const auto& [s, block] : block_decomposition(f)) {
    std::int64_t expected = 1;
    for (auto sj : s) expected *= rho_axis_size(sj);
    const auto c = block.begin()->second;
    const bool constant = static_cast<std::int64_t>(block.size()) == expected &&
                          std::all_of(block.begin(), block.end(), [&](const auto& kv) { return kv.second == c; });
    if (!constant)
      throw std::invalid_argument("besov_functional_blockwise: block " + s.to_string() +
                                  " does not carry a constant coefficient on all of rho(s)");
    double norm = std::abs(c);
    double w = 1.0;
    for (std::size_t j = 0; j < m; ++j) {
      norm *= axis_norm(j, s[j]);
      w *= std::exp2(static_cast<double>(s[j]) * params.r[j]);
    }
    block_sum += norm;
    weighted.emplace(s, w * norm);
  }
  est.sequence = mixed_sequence_norm(weighted, SequenceNormSpec{params.theta});
  const GridSpec g = GridSpec::resolving(f, std::max(oversample, 1u) - 1);
  if (g.volume() <= grid_budget) {
    est.whole = anisotropic_norm(synthesize(f, g), params.space);
  } else {
    est.whole = block_sum;
    est.whole_is_bound = true;
  }
  est.value = est.whole + est.sequence;
  return est;
}

namespace detail {

// Coefficient prod_j 2^{-s_j (r_j + 1 - 1/p_j)} (s_j + 1)^{-alpha_j}.
inline double extremal_block_coefficient(const MultiIndex& s, const TheoremParams& tp) {
  double c = 1.0;
  for (std::size_t j = 0; j < s.size(); ++j) {
    const auto& axis = tp.source.space.axes[j];
    const double sj = static_cast<double>(s[j]);
    c *= std::exp2(-sj * (tp.source.r[j] + 1.0 - 1.0 / axis.p)) * std::pow(sj + 1.0, -axis.alpha);
  }
  return c;
}

inline void add_block(SpectralFunction& f, const MultiIndex& s, double coefficient) {
  for (const auto& k : rho_block(s)) f.set(k, coefficient);
}

// Layer polynomial: blocks s with sum_{j in varying} s_j gamma_j = n, s_j >= 1
// on the varying axes and s_j = 1 elsewhere; prefactor n^{-sum_{A \ j1} 1/theta_j}.
inline SpectralFunction layer_polynomial(long n, const TheoremParams& tp, const DerivedExponents& d,
                                         const std::vector<std::size_t>& varying) {
  const std::size_t m = tp.dim();
  double prefactor_exp = 0.0;
  for (auto j : d.A)
    if (j != d.j1) prefactor_exp += reciprocal(tp.source.theta[j]);
  const double prefactor = std::pow(static_cast<double>(n), -prefactor_exp);

  SpectralFunction f(m);
  const Anisotropy sub = d.gamma.restricted(varying);
  for (const auto& t : layer_exact(Rational(n), sub)) {
    if (std::any_of(t.begin(), t.end(), [](auto v) { return v < 1; })) continue;
    MultiIndex s(m, 1);
    for (std::size_t i = 0; i < varying.size(); ++i) s[varying[i]] = t[i];
    add_block(f, s, prefactor * extremal_block_coefficient(s, tp));
  }
  if (f.empty())
    throw std::invalid_argument("extremal: empty layer at n = " + std::to_string(n) +
                                " (no block with all varying entries >= 1)");
  return f;
}

}  // namespace detail

/// Layer-supported extremal polynomial f_{1,n}.
inline SpectralFunction extremal_f1(long n, const TheoremParams& tp) {
  if (n < 1) throw std::invalid_argument("extremal_f1: need n >= 1");
  const auto d = derived_exponents(tp);
  return detail::layer_polynomial(n, tp, d, d.A);
}

/// Single-block extremal polynomial f_{2,n}: the lexicographically smallest
/// s with all s_j >= 1 and <s, gamma'> >= n.
inline SpectralFunction extremal_f2(long n, const TheoremParams& tp) {
  tp.validate();
  if (n < 1) throw std::invalid_argument("extremal_f2: need n >= 1");
  const std::size_t m = tp.dim();
  MultiIndex s(m, 1);
  Rational rest(n);
  for (std::size_t j = 0; j + 1 < m; ++j) rest = rest - tp.gamma_prime[j];
  s[m - 1] = std::max<std::int64_t>(1, (rest / tp.gamma_prime[m - 1]).ceil());
  SpectralFunction f(m);
  detail::add_block(f, s, detail::extremal_block_coefficient(s, tp));
  return f;
}

/// Axes {j : tau_j^(2) < theta_j}.
inline std::vector<std::size_t> fine_axes(const TheoremParams& tp) {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < tp.dim(); ++j)
    if (tp.target.axes[j].tau < tp.source.theta[j]) out.push_back(j);
  return out;
}

/// Restricted-layer extremal polynomial f_{3,n}: the layer varies only on
/// (A intersect B) union {j1}, B = fine_axes(tp).
inline SpectralFunction extremal_f3(long n, const TheoremParams& tp) {
  if (n < 1) throw std::invalid_argument("extremal_f3: need n >= 1");
  const auto d = derived_exponents(tp);
  const auto fine = fine_axes(tp);
  std::vector<std::size_t> varying;
  for (auto j : d.A)
    if (j == d.j1 || std::find(fine.begin(), fine.end(), j) != fine.end()) varying.push_back(j);
  return detail::layer_polynomial(n, tp, d, varying);
}

}  // namespace lzcross
