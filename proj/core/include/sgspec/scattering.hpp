#pragma once

#include <array>
#include <complex>
#include <optional>
#include <vector>

#include "sgspec/ode.hpp"
#include "sgspec/potentials.hpp"
#include "sgspec/quadrature.hpp"

namespace sgspec {

using cplx = std::complex<double>;
using Vec2 = std::array<cplx, 2>;
using Mat2 = std::array<std::array<cplx, 2>, 2>;

class SpectralParameter {
 public:
  explicit SpectralParameter(cplx z);
  static SpectralParameter polar(double r, double theta);

  cplx z() const { return z_; }
  double r() const { return r_; }
  double theta() const { return theta_; }  // in [0, 2π)
  // Coefficients of cos(u/2)τ₁ and sin(u/2)τ₂.
  cplx a() const { return 0.25 * (z_ - 1.0 / z_); }
  cplx b() const { return 0.25 * (z_ + 1.0 / z_); }

 private:
  cplx z_;
  double r_;
  double theta_;
};

// v' = a cos(u/2) τ₁ v + b sin(u/2) τ₂ v.
Vec2 rhs(double x, const SpectralParameter& z, const Vec2& v, const PotentialProfile& p);
Mat2 coefficient_matrix(double x, const SpectralParameter& z, const PotentialProfile& p);

enum class JostSide { Left, Right };

struct JostOptions {
  double tol = 1e-11;
  std::optional<double> x_stop;  // default: the profile's matching point
};

// Jost solution stored as y = e^{iσ a C(x)} Ψ / e^{ℓ}, where C(x) = ∫_0^x cos(u/2),
// σ = ±1 selects the asymptotically dominant component and ℓ is a running
// real log-scale. The dense state carries C(x) as its third component.
class JostTrajectory {
 public:
  using Segment = ode::DenseSegment<cplx, 3>;

  JostSide side() const { return side_; }
  const SpectralParameter& parameter() const { return z_; }
  int sigma() const { return sigma_; }
  double x_begin() const { return x_begin_; }
  double x_end() const { return x_end_; }
  const std::vector<Segment>& segments() const { return segments_; }
  const std::vector<double>& log_scales() const { return log_scales_; }
  double end_log_scale() const { return end_log_; }
  const ode::Stats& stats() const { return stats_; }

  // Step endpoints in increasing x.
  std::vector<double> grid() const;

  // e^{−offset} Ψ(x); offset keeps values representable.
  Vec2 raw(double x, double log_offset = 0.0) const;
  Vec2 raw_derivative(double x, double log_offset = 0.0) const;
  // Ω-factored components (e^{iaC} ψ₁, e^{−iaC} ψ₂).
  Vec2 factored(double x) const;
  double omega(double x) const;
  // log |Ψ(x)|, the natural offset for raw().
  double log_norm(double x) const;

  // Index of the segment containing x.
  std::size_t locate(double x) const;

 private:
  friend JostTrajectory integrate_jost(JostSide, const SpectralParameter&, const PotentialProfile&,
                                       const JostOptions&);
  JostSide side_ = JostSide::Left;
  SpectralParameter z_{cplx(0.0, 1.0)};
  int sigma_ = 1;
  double x_begin_ = 0.0;
  double x_end_ = 0.0;
  std::vector<Segment> segments_;
  std::vector<double> log_scales_;
  double end_log_ = 0.0;
  ode::Stats stats_;
};

JostTrajectory integrate_jost(JostSide side, const SpectralParameter& z, const PotentialProfile& p,
                              const JostOptions& opts = {});

// W = mantissa · exp(exponent). The reduced value multiplies by exp(i a K) with
// K = phase_integral(), which removes the exponential growth of W at large and
// small |z| without moving its zeros.
struct WronskianValue {
  cplx mantissa;
  cplx exponent;
  cplx reduced_exponent;

  cplx value() const { return mantissa * std::exp(exponent); }
  cplx reduced() const { return mantissa * std::exp(reduced_exponent); }
};

struct WronskianOptions {
  double tol = 1e-11;
  std::optional<double> x_match;
};

WronskianValue wronskian(const SpectralParameter& z, const PotentialProfile& p,
                         const WronskianOptions& opts = {});

// The reduced Wronskian as a plain complex number.
cplx reduced_wronskian(const SpectralParameter& z, const PotentialProfile& p,
                       const WronskianOptions& opts = {});

// exp(i a K): the factor turning W into the reduced Wronskian.
cplx reduction_factor(const SpectralParameter& z, const PotentialProfile& p);

// W(x) of two trajectories along the overlap, relative to max(1, |W|).
double wronskian_constancy(const JostTrajectory& left, const JostTrajectory& right,
                           std::size_t samples = 200);

enum class DerivativeMethod { ClosedForm, FiniteDifference };

struct WronskianDerivative {
  cplx value;          // d/dz of the reduced Wronskian
  cplx value_unreduced;
  DerivativeMethod method;
};

// Finite differences on a four-point complex stencil around z.
WronskianDerivative wronskian_derivative_fd(const SpectralParameter& z, const PotentialProfile& p,
                                            double tol = 1e-11, double step = 1e-3);

struct TransferMatrix {
  Mat2 entries;
  Interval interval;
  cplx det() const { return entries[0][0] * entries[1][1] - entries[0][1] * entries[1][0]; }
};

TransferMatrix transfer_matrix(const SpectralParameter& z, const PotentialProfile& p, double a,
                               double b, double tol = 1e-12);

Mat2 matmul(const Mat2& a, const Mat2& b);

// The eigenfunction at an eigenvalue: left Jost on [lo, x_m], right Jost
// (rescaled to match) on [x_m, hi], normalized to unit L² norm.
class BoundState {
 public:
  BoundState(const SpectralParameter& z, const PotentialProfile& p, double tol = 1e-11,
             double consistency_tol = 1e-6);

  const SpectralParameter& parameter() const { return z_; }
  const PotentialProfile& profile() const { return p_; }
  double matching_point() const { return x_m_; }
  double mismatch() const { return mismatch_; }

  Vec2 value(double x) const;
  Vec2 derivative(double x) const;  // A(x) v(x)

  // ∫ f(x, v(x)) dx over the domain, Kronrod-15 on every integrator step.
  template <class F>
  auto integrate(F&& f) const {
    return accumulate([&](double x) { return f(x, value(x)); });
  }

  // d/dz of the reduced Wronskian via the integral formula.
  cplx wronskian_derivative() const;
  // |Im φ₁| and |Re φ₂| relative to max|v| on a sample grid, meaningful on |z| = 1.
  double phase_alignment_defect(std::size_t samples = 400) const;

  const JostTrajectory& left() const { return left_; }
  const JostTrajectory& right() const { return right_; }

 private:
  Vec2 unnormalized(double x) const;

  template <class G>
  auto accumulate(G&& g) const {
    using R = decltype(g(0.0));
    R total{};
    for (const auto* part : {&left_, &right_}) {
      for (const auto& seg : part->segments()) {
        if (seg.h != 0.0) total = total + kronrod15(g, seg.lo(), seg.hi());
      }
    }
    return total;
  }

  template <class F>
  auto integrate_unnormalized(F&& f) const {
    return accumulate([&](double x) { return f(x, unnormalized(x)); });
  }

  SpectralParameter z_;
  PotentialProfile p_;
  double x_m_;
  JostTrajectory left_;
  JostTrajectory right_;
  double offset_left_ = 0.0;
  double offset_right_ = 0.0;
  cplx rho_;   // right-side factor matching the left solution at x_m
  cplx norm_;  // unit L² norm and phase
  double mismatch_ = 0.0;
};

}  // namespace sgspec
