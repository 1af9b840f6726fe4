#pragma once

// Exact evaluation of the auxiliary lemma sums, their reference orders,
// ratio-window scans and log-scale rate fitting.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>

#include "lzcross/indexsets.hpp"
#include "lzcross/norms.hpp"

namespace lzcross {

/// Neumaier compensated summation.
class NeumaierSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// ---------------------------------------------------------------------------
// Lemma 1

/// sum_{0 <= s < l} (s+1)^{-alpha} (l-s)^{-beta}.
inline double lemma1_sum(long l, double alpha, double beta) {
  if (l < 1) throw std::invalid_argument("lemma1_sum: need l >= 1");
  NeumaierSum acc;
  for (long s = 0; s < l; ++s)
    acc.add(std::pow(static_cast<double>(s + 1), -alpha) * std::pow(static_cast<double>(l - s), -beta));
  return acc.value();
}

/// sum_{0 < s < l} s^{-1} (l-s)^{-beta}; zero for l = 1.
inline double lemma1_case3_sum(long l, double beta) {
  if (l < 1) throw std::invalid_argument("lemma1_case3_sum: need l >= 1");
  NeumaierSum acc;
  for (long s = 1; s < l; ++s)
    acc.add(1.0 / static_cast<double>(s) * std::pow(static_cast<double>(l - s), -beta));
  return acc.value();
}

/// True when (alpha, beta) lie in the regime of the given case.
inline bool lemma1_regime_holds(double alpha, double beta, int which) {
  switch (which) {
    case 1: return 1.0 - alpha > 0.0 && 1.0 - beta > 0.0;
    case 2: return alpha == 1.0 && beta == 1.0;
    case 3: return alpha == 1.0 && beta > 0.0 && beta < 1.0;
    default: throw std::invalid_argument("lemma1: case must be 1, 2 or 3");
  }
}

/// (l+1)^{1-(alpha+beta)}, l^{-1} ln(1+l) or l^{-beta} ln(1+l), without the regime check.
inline double lemma1_reference_unchecked(long l, double alpha, double beta, int which) {
  if (l < 1) throw std::invalid_argument("lemma1_reference: need l >= 1");
  const double x = static_cast<double>(l);
  switch (which) {
    case 1: return std::pow(x + 1.0, 1.0 - (alpha + beta));
    case 2: return std::log1p(x) / x;
    case 3: return std::pow(x, -beta) * std::log1p(x);
    default: throw std::invalid_argument("lemma1: case must be 1, 2 or 3");
  }
}

inline double lemma1_reference(long l, double alpha, double beta, int which) {
  if (!lemma1_regime_holds(alpha, beta, which))
    throw std::domain_error("lemma1_reference: (alpha, beta) = (" + std::to_string(alpha) + ", " +
                            std::to_string(beta) + ") outside the regime of case " + std::to_string(which));
  return lemma1_reference_unchecked(l, alpha, beta, which);
}

// ---------------------------------------------------------------------------
// Lemma 2

enum class Lemma2Sign { decay, growth };

inline double lemma2_sum(long n, double beta, double theta, double lambda1, double lambda2, Lemma2Sign sign) {
  if (n < 0) throw std::invalid_argument("lemma2_sum: need n >= 0");
  const double dir = sign == Lemma2Sign::decay ? -1.0 : 1.0;
  NeumaierSum acc;
  for (long s = 0; s <= n; ++s) {
    const double sd = static_cast<double>(s);
    acc.add(std::exp2(dir * sd * beta * theta) * std::pow(sd + 1.0, lambda2 * theta) *
            std::pow(static_cast<double>(n - s) + 1.0, lambda1 * theta));
  }
  return acc.value();
}

inline double lemma2_reference(long n, double beta, double theta, double lambda1, double lambda2, Lemma2Sign sign) {
  if (n < 0) throw std::invalid_argument("lemma2_reference: need n >= 0");
  const double x = static_cast<double>(n) + 1.0;
  if (sign == Lemma2Sign::decay) return std::pow(x, lambda1 * theta);
  return std::exp2(static_cast<double>(n) * beta * theta) * std::pow(x, lambda2 * theta);
}

// ---------------------------------------------------------------------------
// Lemma 3

/// delta = min gamma_j / gamma'_j, A = argmin set, j1 = min A, j' = max A.
struct Lemma3Exponents {
  Rational delta;
  std::vector<std::size_t> A;
  std::size_t j1 = 0;
  std::size_t j_prime = 0;
};

inline Lemma3Exponents lemma3_exponents(const Anisotropy& gamma, const Anisotropy& gamma_prime) {
  gamma.check_dim(gamma_prime.size());
  Lemma3Exponents e;
  std::vector<Rational> ratio;
  for (std::size_t j = 0; j < gamma.size(); ++j) ratio.push_back(gamma[j] / gamma_prime[j]);
  e.delta = *std::min_element(ratio.begin(), ratio.end());
  for (std::size_t j = 0; j < ratio.size(); ++j)
    if (ratio[j] == e.delta) e.A.push_back(j);
  e.j1 = e.A.front();
  e.j_prime = e.A.back();
  return e;
}

namespace detail {
inline double inv(double theta) { return std::isinf(theta) ? 0.0 : 1.0 / theta; }

inline void check_lemma_vectors(std::size_t m, const std::vector<double>& lambda, const std::vector<double>& theta,
                                const char* what) {
  if (lambda.size() != m || theta.size() != m)
    throw std::invalid_argument(std::string(what) + ": lambda and exponent lists must have one entry per axis");
  SequenceNormSpec{theta}.validate();
}
}  // namespace detail

/// Positivity condition on (lambda, theta) over A. A single-element A
/// imposes no restriction.
inline bool lemma3_condition_holds(const Lemma3Exponents& e, const std::vector<double>& lambda,
                                   const std::vector<double>& theta) {
  if (e.A.size() < 2) return true;
  double first = 0.0;
  for (auto j : e.A) {
    if (j != e.j_prime) first += lambda[j];
    if (j != e.j1) first += detail::inv(theta[j]);
  }
  const double last = lambda[e.j_prime] + detail::inv(theta[e.j_prime]);
  return std::min(first, last) > 0.0;
}

/// 2^{-n alpha delta} n^{sum_A lambda_j + sum_{A \ j1} 1/theta_j}, without the hypothesis check.
inline double lemma3_reference_unchecked(long n, const Lemma3Exponents& e, const std::vector<double>& lambda,
                                         const std::vector<double>& theta, double alpha) {
  if (n < 1) throw std::invalid_argument("lemma3_reference: need n >= 1");
  double power = 0.0;
  for (auto j : e.A) {
    power += lambda.at(j);
    if (j != e.j1) power += detail::inv(theta.at(j));
  }
  const double x = static_cast<double>(n);
  return std::exp2(-x * alpha * e.delta.to_double()) * std::pow(x, power);
}

inline double lemma3_reference(long n, const Lemma3Exponents& e, const std::vector<double>& lambda,
                               const std::vector<double>& theta, double alpha) {
  if (!lemma3_condition_holds(e, lambda, theta))
    throw std::domain_error("lemma3_reference: positivity condition on (lambda, theta) over A is violated");
  return lemma3_reference_unchecked(n, e, lambda, theta, alpha);
}

namespace detail {

// l_theta norm over s >= from of 2^{-c s} (s+1)^lambda, c > 0.
inline double axis_tail_norm(double c, double lambda, double theta, std::int64_t from) {
  const double peak = std::max(0.0, lambda / (c * std::log(2.0)) - 1.0);
  NeumaierSum acc;
  double sup = 0.0;
  for (std::int64_t s = from;; ++s) {
    const double sd = static_cast<double>(s);
    const double term = std::exp2(-c * sd) * std::pow(sd + 1.0, lambda);
    sup = std::max(sup, term);
    if (!std::isinf(theta)) acc.add(std::pow(term, theta));
    if (sd > peak) {
      const bool small = std::isinf(theta) ? term == 0.0 || term < 1e-20 * sup
                                           : std::pow(term, theta) < 1e-20 * acc.value();
      if (small) break;
    }
    if (s - from > 10'000'000) throw std::runtime_error("lemma3: axis tail does not converge");
  }
  return std::isinf(theta) ? sup : std::pow(acc.value(), 1.0 / theta);
}

inline double lemma3_box_value(long n, const Anisotropy& gamma, const Anisotropy& gamma_prime,
                               const std::vector<double>& lambda, const std::vector<double>& theta, double alpha,
                               const MultiIndex& box) {
  std::map<MultiIndex, double> values;
  for (const auto& s : layer_above_truncated(Rational(n), gamma_prime, box)) {
    double v = std::exp2(-alpha * gamma.dot(s).to_double());
    for (std::size_t j = 0; j < s.size(); ++j) v *= std::pow(static_cast<double>(s[j]) + 1.0, lambda[j]);
    values.emplace(s, v);
  }
  return mixed_sequence_norm(values, SequenceNormSpec{theta});
}

}  // namespace detail

/// Truncation box for lemma3_lhs: the neglected part of Y^m is bounded by
/// sum_j tail_j prod_{i != j} full_i, each term kept below 1e-12 * value / m.
struct Lemma3Box {
  MultiIndex box;
  double tail_bound = 0.0;
};

inline Lemma3Box lemma3_box(long n, const Anisotropy& gamma, const Anisotropy& gamma_prime,
                            const std::vector<double>& lambda, const std::vector<double>& theta, double alpha) {
  const std::size_t m = gamma.size();
  gamma.check_dim(gamma_prime.size());
  detail::check_lemma_vectors(m, lambda, theta, "lemma3_lhs");
  if (!(alpha > 0.0)) throw std::invalid_argument("lemma3_lhs: need alpha > 0");
  for (std::size_t j = 0; j < m; ++j)
    if (!(gamma_prime[j] <= gamma[j])) throw std::invalid_argument("lemma3_lhs: need gamma'_j <= gamma_j");
  if (n < 0) throw std::invalid_argument("lemma3_lhs: need n >= 0");

  std::vector<double> c(m), full(m);
  for (std::size_t j = 0; j < m; ++j) {
    c[j] = alpha * gamma[j].to_double();
    full[j] = detail::axis_tail_norm(c[j], lambda[j], theta[j], 0);
  }
  MultiIndex box(m);
  for (std::size_t j = 0; j < m; ++j) box[j] = (Rational(n) / gamma_prime[j]).ceil() + 1;
  const double initial = detail::lemma3_box_value(n, gamma, gamma_prime, lambda, theta, alpha, box);
  if (!(initial > 0.0)) throw std::runtime_error("lemma3_lhs: zero value on the initial box");

  Lemma3Box out{box, 0.0};
  for (std::size_t j = 0; j < m; ++j) {
    double others = 1.0;
    for (std::size_t i = 0; i < m; ++i)
      if (i != j) others *= full[i];
    const double goal = 1e-12 * initial / static_cast<double>(m);
    for (;;) {
      const double tail = detail::axis_tail_norm(c[j], lambda[j], theta[j], out.box[j] + 1) * others;
      if (tail < goal) {
        out.tail_bound += tail;
        break;
      }
      if (++out.box[j] > 100'000)
        throw std::runtime_error("lemma3_lhs: tail bound unachievable within box limit on axis " + std::to_string(j));
    }
  }
  double volume = 1.0;
  for (auto b : out.box) volume *= static_cast<double>(b + 1);
  if (volume > 2e7) throw std::runtime_error("lemma3_lhs: truncation box exceeds 2e7 indices");
  return out;
}

/// Mixed l_theta norm of {2^{-alpha <s, gamma>} prod (s_j+1)^{lambda_j}} over Y^m(n, gamma').
inline double lemma3_lhs(long n, const Anisotropy& gamma, const Anisotropy& gamma_prime,
                         const std::vector<double>& lambda, const std::vector<double>& theta, double alpha) {
  const auto b = lemma3_box(n, gamma, gamma_prime, lambda, theta, alpha);
  return detail::lemma3_box_value(n, gamma, gamma_prime, lambda, theta, alpha, b.box);
}

// ---------------------------------------------------------------------------
// Lemma 4

/// Mixed l_eps norm of {2^{-alpha <s, gamma>} prod (s_j+1)^{lambda_j}} over kappa^m(n, gamma).
inline double lemma4_lhs(const Rational& n, const Anisotropy& gamma, const std::vector<double>& lambda,
                         const std::vector<double>& epsilon, double alpha) {
  detail::check_lemma_vectors(gamma.size(), lambda, epsilon, "lemma4_lhs");
  if (!(alpha > 0.0)) throw std::invalid_argument("lemma4_lhs: need alpha > 0");
  std::map<MultiIndex, double> values;
  for (const auto& s : layer_exact(n, gamma)) {
    double v = std::exp2(-alpha * n.to_double());
    for (std::size_t j = 0; j < s.size(); ++j) v *= std::pow(static_cast<double>(s[j]) + 1.0, lambda[j]);
    values.emplace(s, v);
  }
  if (values.empty()) return 0.0;
  return mixed_sequence_norm(values, SequenceNormSpec{epsilon});
}

/// 2^{-n alpha} n^{sum lambda_j + sum_{j >= 1} 1/eps_j} (axes 0-based).
inline double lemma4_reference(long n, const std::vector<double>& lambda, const std::vector<double>& epsilon,
                               double alpha) {
  if (n < 1) throw std::invalid_argument("lemma4_reference: need n >= 1");
  detail::check_lemma_vectors(lambda.size(), lambda, epsilon, "lemma4_reference");
  double power = 0.0;
  for (std::size_t j = 0; j < lambda.size(); ++j) {
    power += lambda[j];
    if (j > 0) power += detail::inv(epsilon[j]);
  }
  const double x = static_cast<double>(n);
  return std::exp2(-x * alpha) * std::pow(x, power);
}

// ---------------------------------------------------------------------------
// Ratio scans

/// two_sided checks lhs ~ rhs, upper checks lhs << rhs, lower checks lhs >> rhs.
enum class RatioMode { two_sided, upper, lower };

inline const char* to_string(RatioMode mode) {
  switch (mode) {
    case RatioMode::two_sided: return "two-sided";
    case RatioMode::upper: return "upper";
    default: return "lower";
  }
}

struct RatioPoint {
  long n = 0;
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
};

struct RatioReport {
  RatioMode mode = RatioMode::two_sided;
  std::map<std::string, std::string> parameters;
  std::vector<RatioPoint> points;
  double min_ratio = 0.0;
  double max_ratio = 0.0;
  double spread = 1.0;

  /// two_sided: spread < threshold; upper: max_ratio < threshold; lower: min_ratio > threshold.
  bool within(double threshold) const {
    switch (mode) {
      case RatioMode::two_sided: return spread < threshold;
      case RatioMode::upper: return max_ratio < threshold;
      default: return min_ratio > threshold;
    }
  }
};

/// Evaluates lhs(n) and rhs(n) for every n (in parallel over `threads`
/// workers) and reports the ratios in the order of `ns`.
inline RatioReport ratio_scan(const std::function<double(long)>& lhs, const std::function<double(long)>& rhs,
                              const std::vector<long>& ns, RatioMode mode = RatioMode::two_sided,
                              unsigned threads = 1) {
  if (ns.size() < 4) throw std::invalid_argument("ratio_scan: need at least 4 points");
  RatioReport report;
  report.mode = mode;
  report.points.resize(ns.size());
  std::vector<std::exception_ptr> errors(ns.size());
  auto work = [&](std::size_t first, std::size_t step) {
    for (std::size_t i = first; i < ns.size(); i += step) {
      try {
        auto& pt = report.points[i];
        pt.n = ns[i];
        pt.lhs = lhs(ns[i]);
        pt.rhs = rhs(ns[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t workers = std::clamp<std::size_t>(threads, 1, ns.size());
  if (workers == 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w, workers);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  report.min_ratio = std::numeric_limits<double>::infinity();
  report.max_ratio = 0.0;
  for (auto& pt : report.points) {
    if (!(pt.lhs > 0.0) || !(pt.rhs > 0.0) || !std::isfinite(pt.lhs) || !std::isfinite(pt.rhs))
      throw std::domain_error("ratio_scan: nonpositive or non-finite value at n = " + std::to_string(pt.n));
    pt.ratio = pt.lhs / pt.rhs;
    report.min_ratio = std::min(report.min_ratio, pt.ratio);
    report.max_ratio = std::max(report.max_ratio, pt.ratio);
  }
  report.spread = report.max_ratio / report.min_ratio;
  return report;
}

/// n in [a, b]: doubling from a (dyadic) or every integer (linear).
inline std::vector<long> dyadic_range(long a, long b) {
  if (a < 1 || b < a) throw std::invalid_argument("dyadic_range: need 1 <= a <= b");
  std::vector<long> out;
  for (long n = a; n <= b; n *= 2) out.push_back(n);
  return out;
}

inline std::vector<long> linear_range(long a, long b) {
  if (b < a) throw std::invalid_argument("linear_range: need a <= b");
  std::vector<long> out;
  for (long n = a; n <= b; ++n) out.push_back(n);
  return out;
}

// ---------------------------------------------------------------------------
// Rate fitting

/// log2 E = -rho n + mu log2 n + intercept.
struct RateFit {
  double rho = 0.0;
  double mu = 0.0;
  double intercept = 0.0;
  double max_residual = 0.0;  // on the log2 scale
  std::size_t points = 0;
  bool slope_fixed = false;
};

inline RateFit rate_fit(const std::vector<std::pair<long, double>>& points, std::optional<double> fix_slope = {}) {
  if (points.size() < 4) throw std::invalid_argument("rate_fit: need at least 4 points");
  const auto rows = static_cast<Eigen::Index>(points.size());
  const Eigen::Index cols = fix_slope ? 2 : 3;
  Eigen::MatrixXd X(rows, cols);
  Eigen::VectorXd y(rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto [n, e] = points[static_cast<std::size_t>(i)];
    if (!(e > 0.0) || !std::isfinite(e)) throw std::domain_error("rate_fit: errors must be positive and finite");
    if (n < 1) throw std::invalid_argument("rate_fit: need n >= 1");
    const double nd = static_cast<double>(n);
    y(i) = std::log2(e) + (fix_slope ? *fix_slope * nd : 0.0);
    Eigen::Index c = 0;
    if (!fix_slope) X(i, c++) = -nd;
    X(i, c++) = std::log2(nd);
    X(i, c) = 1.0;
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  qr.setThreshold(1e-10);
  if (qr.rank() < cols) throw std::domain_error("rate_fit: degenerate design matrix");
  const Eigen::VectorXd beta = qr.solve(y);
  RateFit fit;
  fit.points = points.size();
  fit.slope_fixed = fix_slope.has_value();
  Eigen::Index c = 0;
  fit.rho = fix_slope ? *fix_slope : beta(c++);
  fit.mu = beta(c++);
  fit.intercept = beta(c);
  const Eigen::VectorXd resid = X * beta - y;
  fit.max_residual = resid.cwiseAbs().maxCoeff();
  return fit;
}

}  // namespace lzcross
