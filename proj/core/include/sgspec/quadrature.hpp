#pragma once

#include <array>
#include <functional>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace sgspec {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  double l1 = 0.0;  // ∫|f|
};

// Adaptive Gauss–Kronrod over [a, b], restarted at every breakpoint inside.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                    const std::vector<double>& breakpoints = {},
                                    double abs_tol = 1e-10);

// Fixed 15-point Kronrod rule; works for any integrand type with + and * double.
template <class F>
auto kronrod15(F&& f, double a, double b) {
  using boost::math::quadrature::gauss_kronrod;
  const auto& x = gauss_kronrod<double, 15>::abscissa();
  const auto& w = gauss_kronrod<double, 15>::weights();
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  auto sum = f(mid) * w[0];
  for (std::size_t i = 1; i < x.size(); ++i) {
    sum = sum + (f(mid - half * x[i]) + f(mid + half * x[i])) * w[i];
  }
  return sum * half;
}

}  // namespace sgspec
