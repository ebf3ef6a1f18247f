#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "sgspec/error.hpp"

namespace sgspec::ode {

template <class T, std::size_t N>
using Vec = std::array<T, N>;

template <class T, std::size_t N>
Vec<T, N> axpy(const Vec<T, N>& y, double h, const Vec<T, N>& k) {
  Vec<T, N> out;
  for (std::size_t i = 0; i < N; ++i) out[i] = y[i] + h * k[i];
  return out;
}

// One accepted Dormand–Prince step with its 4th-order continuous extension.
template <class T, std::size_t N>
struct DenseSegment {
  double x0 = 0.0;
  double h = 0.0;
  std::array<Vec<T, N>, 5> r{};

  double x1() const { return x0 + h; }
  double lo() const { return std::min(x0, x0 + h); }
  double hi() const { return std::max(x0, x0 + h); }

  Vec<T, N> value(double x) const {
    const double t = (x - x0) / h;
    const double s = 1.0 - t;
    Vec<T, N> out;
    for (std::size_t i = 0; i < N; ++i) {
      out[i] = r[0][i] + t * (r[1][i] + s * (r[2][i] + t * (r[3][i] + s * r[4][i])));
    }
    return out;
  }

  Vec<T, N> derivative(double x) const {
    const double t = (x - x0) / h;
    const double s = 1.0 - t;
    Vec<T, N> out;
    for (std::size_t i = 0; i < N; ++i) {
      const T p = r[2][i] + t * (r[3][i] + s * r[4][i]);
      const T dp = r[3][i] + (s - t) * r[4][i];
      out[i] = (r[1][i] + (s - t) * p + t * s * dp) / h;
    }
    return out;
  }
};

struct StepControl {
  double tol = 1e-11;
  double h_init = 0.05;
  double h_max = 0.0;  // 0 means the whole interval
  std::size_t max_steps = 4'000'000;
};

struct Stats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t evaluations = 0;
};

namespace detail {

template <class T>
double magnitude(const T& v) {
  using std::abs;
  return abs(v);
}

}  // namespace detail

// Integrates y' = f(x, y) from x0 to x1 (either direction), landing exactly on
// each stop strictly between them. The local error is held below tol per unit
// length. After every accepted step on_step(segment, y) may rescale y; it
// returns true when it did so and the FSAL stage must be recomputed.
template <class T, std::size_t N, class Rhs, class OnStep>
Stats dopri5(Rhs&& f, double x0, double x1, Vec<T, N>& y, const StepControl& ctl,
             OnStep&& on_step, const std::vector<double>& stops = {}) {
  constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                   a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                   a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                   a75 = -2187.0 / 6784, a76 = 11.0 / 84;
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                   e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
  constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                   d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                   d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;

  Stats stats;
  const double dir = x1 >= x0 ? 1.0 : -1.0;
  std::vector<double> cuts;
  for (double s : stops) {
    if ((s - x0) * dir > 0.0 && (x1 - s) * dir > 0.0) cuts.push_back(s);
  }
  std::sort(cuts.begin(), cuts.end(), [dir](double a, double b) { return a * dir < b * dir; });
  cuts.push_back(x1);
  // Slivers below the step floor would only trip the underflow guard.
  auto close = [](double a, double b) { return std::abs(b - a) < 1e-13 * std::max(1.0, std::abs(a)); };
  {
    std::vector<double> kept;
    double prev = x0;
    for (std::size_t i = 0; i < cuts.size(); ++i) {
      const bool end = i + 1 == cuts.size();
      if (!end && (close(prev, cuts[i]) || close(cuts[i], x1))) continue;
      kept.push_back(cuts[i]);
      prev = cuts[i];
    }
    cuts.swap(kept);
  }

  double x = x0;
  double h = dir * std::abs(ctl.h_init);
  for (double target : cuts) {
    if (x == target) continue;
    // Stage points on a cut are nudged inside the segment so jumps are seen from one side.
    const double inner = std::nextafter(target, x);
    auto at = [&](double xs) { return (xs - inner) * dir > 0.0 ? inner : xs; };
    Vec<T, N> k1 = f(std::nextafter(x, target), y);
    ++stats.evaluations;
    bool last = false;
    while (!last) {
      double hmax = ctl.h_max > 0.0 ? ctl.h_max : std::abs(target - x);
      if (std::abs(h) > hmax) h = dir * hmax;
      if ((x + h - target) * dir >= 0.0 || std::abs(target - x - h) < 1e-12 * std::abs(h)) {
        h = target - x;
        last = true;
      }
      if (std::abs(h) < 1e-14 * std::max(1.0, std::abs(x))) {
        throw Error(ErrorCode::StepFailure,
                    "step size underflow at x = " + std::to_string(x));
      }
      if (stats.accepted + stats.rejected > ctl.max_steps) {
        throw Error(ErrorCode::StepFailure, "step budget exhausted at x = " + std::to_string(x));
      }

      Vec<T, N> yt, k2, k3, k4, k5, k6, k7, y1;
      for (std::size_t i = 0; i < N; ++i) yt[i] = y[i] + h * (a21 * k1[i]);
      k2 = f(at(x + c2 * h), yt);
      for (std::size_t i = 0; i < N; ++i) yt[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
      k3 = f(at(x + c3 * h), yt);
      for (std::size_t i = 0; i < N; ++i)
        yt[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
      k4 = f(at(x + c4 * h), yt);
      for (std::size_t i = 0; i < N; ++i)
        yt[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
      k5 = f(at(x + c5 * h), yt);
      for (std::size_t i = 0; i < N; ++i)
        yt[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
      k6 = f(at(x + h), yt);
      for (std::size_t i = 0; i < N; ++i)
        y1[i] = y[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
      const double xn = last ? target : x + h;
      k7 = f(at(xn), y1);
      stats.evaluations += 6;

      double err = 0.0;
      for (std::size_t i = 0; i < N; ++i) {
        const T e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                         e7 * k7[i]);
        const double sk = ctl.tol * (1.0 + std::max(detail::magnitude(y[i]),
                                                    detail::magnitude(y1[i])));
        const double q = detail::magnitude(e) / sk;
        err += q * q;
      }
      err = std::sqrt(err / static_cast<double>(N));
      // Error per unit length.
      const double ratio = err / std::abs(h);
      if (!std::isfinite(ratio)) {
        h *= 0.25;
        last = false;
        ++stats.rejected;
        continue;
      }
      const double fac = std::clamp(0.9 * std::pow(std::max(ratio, 1e-30), -0.25), 0.2, 5.0);
      if (ratio > 1.0) {
        h *= fac;
        last = false;
        ++stats.rejected;
        continue;
      }

      DenseSegment<T, N> seg;
      seg.x0 = x;
      seg.h = h;
      for (std::size_t i = 0; i < N; ++i) {
        seg.r[0][i] = y[i];
        seg.r[1][i] = y1[i] - y[i];
        seg.r[2][i] = h * k1[i] - seg.r[1][i];
        seg.r[3][i] = seg.r[1][i] - h * k7[i] - seg.r[2][i];
        seg.r[4][i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] +
                           d7 * k7[i]);
      }
      ++stats.accepted;
      x = xn;
      y = y1;
      k1 = k7;
      if (on_step(seg, y)) {
        k1 = f(x, y);
        ++stats.evaluations;
      }
      h *= fac;
    }
  }
  return stats;
}

}  // namespace sgspec::ode
