#pragma once

// Reference computations that share no code with the library.

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;
using Mat = std::array<std::array<cplx, 2>, 2>;

// Romberg extrapolation on the trapezoid rule.
inline double romberg(const std::function<double(double)>& f, double a, double b, int levels = 20) {
  std::vector<std::vector<double>> r(levels, std::vector<double>(levels, 0.0));
  double h = b - a;
  r[0][0] = 0.5 * h * (f(a) + f(b));
  for (int i = 1; i < levels; ++i) {
    h *= 0.5;
    double sum = 0.0;
    const long n = 1L << (i - 1);
    for (long k = 1; k <= n; ++k) sum += f(a + static_cast<double>(2 * k - 1) * h);
    r[i][0] = 0.5 * r[i - 1][0] + h * sum;
    double p = 4.0;
    for (int j = 1; j <= i; ++j, p *= 4.0) r[i][j] = r[i][j - 1] + (r[i][j - 1] - r[i - 1][j - 1]) / (p - 1.0);
    if (i > 5 && std::abs(r[i][i] - r[i - 1][i - 1]) < 1e-14 * std::max(1.0, std::abs(r[i][i]))) return r[i][i];
  }
  return r[levels - 1][levels - 1];
}

// Romberg over [a, b] split into unit pieces, for wide integrands.
inline double romberg_pieces(const std::function<double(double)>& f, double a, double b, double piece = 1.0) {
  double total = 0.0;
  for (double x = a; x < b; x += piece) total += romberg(f, x, std::min(b, x + piece));
  return total;
}

inline Mat mul(const Mat& a, const Mat& b) {
  Mat c{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
  return c;
}

// exp(h M) for a trace-free 2×2 matrix: M² = λ² I, so
// exp(hM) = cosh(λh) I + sinh(λh)/λ M.
inline Mat expm_tracefree(const Mat& m, double h) {
  const cplx lam2 = m[0][0] * m[0][0] + m[0][1] * m[1][0];
  const cplx lam = std::sqrt(lam2);
  const cplx ch = std::cosh(lam * h);
  const cplx sh = std::abs(lam) < 1e-300 ? cplx(h) : std::sinh(lam * h) / lam;
  return {{{ch + sh * m[0][0], sh * m[0][1]}, {sh * m[1][0], ch + sh * m[1][1]}}};
}

// The coefficient matrix for constant u.
inline Mat coefficient(cplx z, double u) {
  const cplx i(0.0, 1.0);
  const cplx a = 0.25 * (z - 1.0 / z), b = 0.25 * (z + 1.0 / z);
  const double c = std::cos(0.5 * u), s = std::sin(0.5 * u);
  return {{{-i * a * c, i * b * s}, {i * b * s, i * a * c}}};
}

}  // namespace oracle
