#pragma once

// Dyadic blocks, step hyperbolic crosses and the layer sets used by the
// lemma sums. All membership tests run on integers: anisotropy weights are
// scaled by their common denominator so <s, gamma> is compared exactly.

#include <algorithm>
#include <bit>
#include <compare>
#include <cstdint>
#include <initializer_list>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lzcross/rational.hpp"

namespace lzcross {

/// Fixed-length integer tuple; `Tag` keeps block indices and harmonics apart.
template <class Tag>
class IndexTuple {
 public:
  using value_type = std::int64_t;

  IndexTuple() = default;
  explicit IndexTuple(std::size_t m, value_type fill = 0) : entries_(m, fill) {}
  IndexTuple(std::initializer_list<value_type> init) : entries_(init) {}
  explicit IndexTuple(std::vector<value_type> entries) : entries_(std::move(entries)) {}

  std::size_t size() const { return entries_.size(); }
  value_type operator[](std::size_t j) const { return entries_[j]; }
  value_type& operator[](std::size_t j) { return entries_[j]; }
  const std::vector<value_type>& entries() const { return entries_; }
  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

  friend bool operator==(const IndexTuple&, const IndexTuple&) = default;
  friend auto operator<=>(const IndexTuple& a, const IndexTuple& b) { return a.entries_ <=> b.entries_; }

  std::string to_string() const {
    std::string out = "(";
    for (std::size_t j = 0; j < entries_.size(); ++j) {
      if (j) out += ",";
      out += std::to_string(entries_[j]);
    }
    return out + ")";
  }

 private:
  std::vector<value_type> entries_;
};

struct MultiIndexTag {};
struct FrequencyIndexTag {};

/// Block index s in Z_+^m.
using MultiIndex = IndexTuple<MultiIndexTag>;
/// Harmonic k in Z^m.
using FrequencyIndex = IndexTuple<FrequencyIndexTag>;

/// Positive rational anisotropy weights with a precomputed common denominator.
class Anisotropy {
 public:
  Anisotropy() = default;
  explicit Anisotropy(std::vector<Rational> weights) : weights_(std::move(weights)) {
    if (weights_.empty()) throw std::invalid_argument("Anisotropy: dimension must be >= 1");
    common_den_ = 1;
    for (const auto& g : weights_) {
      if (g.num() < 1) throw std::invalid_argument("Anisotropy: weights must be positive, got " + g.to_string());
      common_den_ = std::lcm(common_den_, g.den());
    }
    scaled_.reserve(weights_.size());
    for (const auto& g : weights_) scaled_.push_back(g.num() * (common_den_ / g.den()));
  }
  Anisotropy(std::initializer_list<Rational> init) : Anisotropy(std::vector<Rational>(init)) {}

  static Anisotropy uniform(std::size_t m) { return Anisotropy(std::vector<Rational>(m, Rational(1))); }

  std::size_t size() const { return weights_.size(); }
  const Rational& operator[](std::size_t j) const { return weights_[j]; }
  const std::vector<Rational>& weights() const { return weights_; }
  std::int64_t common_denominator() const { return common_den_; }
  /// gamma_j * D, an exact positive integer.
  std::int64_t scaled(std::size_t j) const { return scaled_[j]; }

  /// D * <s, gamma>, exact.
  std::int64_t scaled_dot(const MultiIndex& s) const {
    check_dim(s.size());
    __int128 acc = 0;
    for (std::size_t j = 0; j < s.size(); ++j) acc += static_cast<__int128>(s[j]) * scaled_[j];
    if (acc > INT64_MAX) throw std::overflow_error("Anisotropy: <s,gamma> overflow");
    return static_cast<std::int64_t>(acc);
  }
  Rational dot(const MultiIndex& s) const { return Rational(scaled_dot(s), common_den_); }

  /// Sub-anisotropy over the given axes (in the given order).
  Anisotropy restricted(const std::vector<std::size_t>& axes) const {
    std::vector<Rational> w;
    for (auto j : axes) w.push_back(weights_.at(j));
    return Anisotropy(std::move(w));
  }

  void check_dim(std::size_t m) const {
    if (m != weights_.size())
      throw std::invalid_argument("dimension mismatch: index has " + std::to_string(m) + " entries, anisotropy " +
                                  std::to_string(weights_.size()));
  }

  friend bool operator==(const Anisotropy& a, const Anisotropy& b) { return a.weights_ == b.weights_; }

 private:
  std::vector<Rational> weights_;
  std::vector<std::int64_t> scaled_;
  std::int64_t common_den_ = 1;
};

enum class LayerRelation { below, exact, at_or_above };

/// Describes {s : <s,gamma> (< | = | >=) level}.
struct LayerSpec {
  Rational level;
  Anisotropy anisotropy;
  LayerRelation relation = LayerRelation::below;

  bool contains(const MultiIndex& s) const {
    // <s,gamma> vs level, compared as D*<s,gamma>*level.den vs level.num*D.
    const __int128 lhs = static_cast<__int128>(anisotropy.scaled_dot(s)) * level.den();
    const __int128 rhs = static_cast<__int128>(level.num()) * anisotropy.common_denominator();
    switch (relation) {
      case LayerRelation::below: return lhs < rhs;
      case LayerRelation::exact: return lhs == rhs;
      case LayerRelation::at_or_above: return lhs >= rhs;
    }
    return false;
  }
};

namespace detail {

inline std::int64_t pow2(std::int64_t e) {
  if (e < 0 || e > 62) throw std::overflow_error("2^" + std::to_string(e) + " out of range");
  return std::int64_t{1} << e;
}

// Odometer over the Cartesian product of sorted per-axis lists; emits in
// lexicographic order.
template <class Tuple, class Fn>
void for_each_product(const std::vector<std::vector<std::int64_t>>& axes, Fn&& fn) {
  for (const auto& a : axes)
    if (a.empty()) return;
  const std::size_t m = axes.size();
  std::vector<std::size_t> pos(m, 0);
  Tuple t(m);
  for (std::size_t j = 0; j < m; ++j) t[j] = axes[j][0];
  while (true) {
    fn(static_cast<const Tuple&>(t));
    std::size_t j = m;
    while (j > 0) {
      --j;
      if (++pos[j] < axes[j].size()) {
        t[j] = axes[j][pos[j]];
        break;
      }
      pos[j] = 0;
      t[j] = axes[j][0];
      if (j == 0) return;
    }
    if (m == 0) return;
  }
}

}  // namespace detail

/// Axis index set of a dyadic block: {0} at s = 0, otherwise the integers
/// with 2^{s-1} <= |k| < 2^s, ascending.
inline std::vector<std::int64_t> rho_axis(std::int64_t s) {
  if (s < 0) throw std::invalid_argument("rho_axis: negative block index");
  if (s == 0) return {0};
  const std::int64_t lo = detail::pow2(s - 1), hi = detail::pow2(s);
  std::vector<std::int64_t> out;
  out.reserve(static_cast<std::size_t>(2 * (hi - lo)));
  for (std::int64_t k = -(hi - 1); k <= -lo; ++k) out.push_back(k);
  for (std::int64_t k = lo; k < hi; ++k) out.push_back(k);
  return out;
}

/// Number of harmonics in rho_axis(s).
inline std::int64_t rho_axis_size(std::int64_t s) { return s == 0 ? 1 : detail::pow2(s); }

/// Dyadic block rho(s) in lexicographic order.
inline std::vector<FrequencyIndex> rho_block(const MultiIndex& s) {
  std::vector<std::vector<std::int64_t>> axes;
  axes.reserve(s.size());
  for (auto sj : s) axes.push_back(rho_axis(sj));
  std::vector<FrequencyIndex> out;
  detail::for_each_product<FrequencyIndex>(axes, [&](const FrequencyIndex& k) { out.push_back(k); });
  return out;
}

/// The unique block s with k in rho(s): s_j is the bit width of |k_j|.
inline MultiIndex block_of(const FrequencyIndex& k) {
  MultiIndex s(k.size());
  for (std::size_t j = 0; j < k.size(); ++j) {
    const auto a = static_cast<std::uint64_t>(k[j] < 0 ? -k[j] : k[j]);
    s[j] = static_cast<std::int64_t>(std::bit_width(a));
  }
  return s;
}

/// All s in Z_+^m with <s,gamma> < n, lexicographic.
inline std::vector<MultiIndex> cross_layers(const Rational& n, const Anisotropy& gamma) {
  std::vector<MultiIndex> out;
  if (n <= Rational(0)) return out;
  const std::size_t m = gamma.size();
  // D*<s,gamma> < n*D  <=>  D*<s,gamma>*n.den < n.num*D
  const __int128 bound = static_cast<__int128>(n.num()) * gamma.common_denominator();
  MultiIndex s(m);
  auto rec = [&](auto&& self, std::size_t j, __int128 partial) -> void {
    if (j == m) {
      out.push_back(s);
      return;
    }
    for (std::int64_t v = 0;; ++v) {
      const __int128 next = partial + static_cast<__int128>(v) * gamma.scaled(j) * n.den();
      if (next >= bound) break;
      s[j] = v;
      self(self, j + 1, next);
    }
    s[j] = 0;
  };
  rec(rec, 0, 0);
  return out;
}

/// Step hyperbolic cross Q_n^gamma: union of rho(s) over <s,gamma> < n,
/// lexicographic and duplicate-free.
inline std::vector<FrequencyIndex> hyperbolic_cross(const Rational& n, const Anisotropy& gamma) {
  std::vector<FrequencyIndex> out;
  for (const auto& s : cross_layers(n, gamma)) {
    auto block = rho_block(s);
    out.insert(out.end(), block.begin(), block.end());
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// |Q_n^gamma| without materializing the harmonics.
inline std::int64_t cross_cardinality(const Rational& n, const Anisotropy& gamma) {
  std::int64_t total = 0;
  for (const auto& s : cross_layers(n, gamma)) {
    std::int64_t size = 1;
    for (auto sj : s) size *= rho_axis_size(sj);
    total += size;
  }
  return total;
}

/// Harmonic k lies in Q_n^gamma.
inline bool in_cross(const FrequencyIndex& k, const Rational& n, const Anisotropy& gamma) {
  return LayerSpec{n, gamma, LayerRelation::below}.contains(block_of(k));
}

/// Exact layer {s : <s,gamma> = n}, lexicographic; empty when n*D is not an integer.
inline std::vector<MultiIndex> layer_exact(const Rational& n, const Anisotropy& gamma) {
  std::vector<MultiIndex> out;
  if (n < Rational(0)) return out;
  const Rational target = n * Rational(gamma.common_denominator());
  if (!target.is_integer()) return out;
  const std::int64_t goal = target.num();
  const std::size_t m = gamma.size();
  MultiIndex s(m);
  auto rec = [&](auto&& self, std::size_t j, std::int64_t remaining) -> void {
    if (j + 1 == m) {
      if (remaining % gamma.scaled(j) == 0) {
        s[j] = remaining / gamma.scaled(j);
        out.push_back(s);
        s[j] = 0;
      }
      return;
    }
    for (std::int64_t v = 0; v * gamma.scaled(j) <= remaining; ++v) {
      s[j] = v;
      self(self, j + 1, remaining - v * gamma.scaled(j));
    }
    s[j] = 0;
  };
  rec(rec, 0, goal);
  return out;
}

/// Y^m(gamma, n) restricted to the box [0, box_j]. The box must reach every
/// axis generator of the layer: box_j >= ceil(n / gamma_j).
inline std::vector<MultiIndex> layer_above_truncated(const Rational& n, const Anisotropy& gamma, const MultiIndex& box) {
  gamma.check_dim(box.size());
  for (std::size_t j = 0; j < box.size(); ++j) {
    const std::int64_t need = n > Rational(0) ? (n / gamma[j]).ceil() : 0;
    if (box[j] < need)
      throw std::invalid_argument("layer_above_truncated: box entry " + std::to_string(j) + " = " +
                                  std::to_string(box[j]) + " below ceil(n/gamma_j) = " + std::to_string(need));
  }
  std::vector<MultiIndex> out;
  const LayerSpec spec{n, gamma, LayerRelation::at_or_above};
  std::vector<std::vector<std::int64_t>> axes;
  for (auto b : box) {
    std::vector<std::int64_t> a(static_cast<std::size_t>(b + 1));
    std::iota(a.begin(), a.end(), 0);
    axes.push_back(std::move(a));
  }
  detail::for_each_product<MultiIndex>(axes, [&](const MultiIndex& s) {
    if (spec.contains(s)) out.push_back(s);
  });
  return out;
}

}  // namespace lzcross
