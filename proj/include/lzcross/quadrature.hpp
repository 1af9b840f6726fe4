#pragma once

#include <array>
#include <cmath>
#include <stdexcept>

#include <boost/math/quadrature/gauss.hpp>

namespace lzcross::quadrature {

/// Fixed 16-point Gauss-Legendre rule on [a, b].
template <class F>
double gauss_legendre16(F&& f, double a, double b) {
  return boost::math::quadrature::gauss<double, 16>::integrate(std::forward<F>(f), a, b);
}

/// Nodes and weights of the N-point Gauss-Laguerre rule for
/// int_0^inf g(w) e^{-w} dw, found by Newton iteration on the three-term
/// recurrence.
template <int N>
struct GaussLaguerre {
  std::array<double, N> nodes{};
  std::array<double, N> weights{};

  GaussLaguerre() {
    double z = 0.0;
    for (int i = 0; i < N; ++i) {
      if (i == 0) {
        z = 3.0 / (1.0 + 2.4 * N);
      } else if (i == 1) {
        z += 15.0 / (1.0 + 2.5 * N);
      } else {
        const double ai = i - 1;
        z += ((1.0 + 2.55 * ai) / (1.9 * ai)) * (z - nodes[i - 2]);
      }
      double pp = 0.0;
      double p2 = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p1 = 1.0;
        p2 = 0.0;
        for (int j = 0; j < N; ++j) {
          const double p3 = p2;
          p2 = p1;
          p1 = ((2 * j + 1 - z) * p2 - j * p3) / (j + 1);
        }
        pp = (N * p1 - N * p2) / z;
        const double z1 = z;
        z = z1 - p1 / pp;
        if (std::abs(z - z1) <= 1e-15 * std::abs(z)) break;
      }
      nodes[i] = z;
      weights[i] = -1.0 / (pp * N * p2);
    }
  }

  template <class F>
  double integrate(F&& g) const {
    double acc = 0.0;
    for (int i = 0; i < N; ++i) acc += weights[i] * g(nodes[i]);
    return acc;
  }

  static const GaussLaguerre& instance() {
    static const GaussLaguerre rule;
    return rule;
  }
};

}  // namespace lzcross::quadrature
