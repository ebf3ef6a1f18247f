#include "sgspec/scattering.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "sgspec/error.hpp"

namespace sgspec {

namespace {

constexpr cplx I1{0.0, 1.0};
constexpr double kRescaleHigh = 65536.0;
constexpr double kRescaleLow = 1.0 / 65536.0;

double norm2(const Vec2& v) { return std::sqrt(std::norm(v[0]) + std::norm(v[1])); }

}  // namespace

SpectralParameter::SpectralParameter(cplx z) : z_(z), r_(std::abs(z)) {
  if (r_ == 0.0) throw Error(ErrorCode::InvalidArgument, "z = 0 is excluded");
  theta_ = std::arg(z);
  if (theta_ < 0.0) theta_ += 2.0 * std::numbers::pi;
}

SpectralParameter SpectralParameter::polar(double r, double theta) {
  SpectralParameter p(std::polar(r, theta));
  p.r_ = r;
  p.theta_ = std::fmod(theta, 2.0 * std::numbers::pi);
  if (p.theta_ < 0.0) p.theta_ += 2.0 * std::numbers::pi;
  return p;
}

Vec2 rhs(double x, const SpectralParameter& z, const Vec2& v, const PotentialProfile& p) {
  const auto h = p.half_angle(x);
  const cplx ac = z.a() * h.c;
  const cplx bs = z.b() * h.s;
  return {-I1 * ac * v[0] + I1 * bs * v[1], I1 * bs * v[0] + I1 * ac * v[1]};
}

Mat2 coefficient_matrix(double x, const SpectralParameter& z, const PotentialProfile& p) {
  const auto h = p.half_angle(x);
  const cplx ac = z.a() * h.c;
  const cplx bs = z.b() * h.s;
  return {{{-I1 * ac, I1 * bs}, {I1 * bs, I1 * ac}}};
}

std::vector<double> JostTrajectory::grid() const {
  std::vector<double> g;
  g.reserve(segments_.size() + 1);
  for (const auto& s : segments_) g.push_back(s.x0);
  if (!segments_.empty()) g.push_back(segments_.back().x1());
  std::sort(g.begin(), g.end());
  return g;
}

std::size_t JostTrajectory::locate(double x) const {
  if (segments_.empty()) throw Error(ErrorCode::InvalidArgument, "empty trajectory");
  const std::size_t n = segments_.size();
  if (side_ == JostSide::Left) {
    // Ascending: first segment whose right end reaches x.
    auto it = std::partition_point(segments_.begin(), segments_.end(),
                                   [x](const Segment& s) { return s.x1() < x; });
    return std::min<std::size_t>(static_cast<std::size_t>(it - segments_.begin()), n - 1);
  }
  // Descending: first segment whose left end reaches down to x.
  auto it = std::partition_point(segments_.begin(), segments_.end(),
                                 [x](const Segment& s) { return s.x1() > x; });
  return std::min<std::size_t>(static_cast<std::size_t>(it - segments_.begin()), n - 1);
}

Vec2 JostTrajectory::raw(double x, double log_offset) const {
  const std::size_t k = locate(x);
  const auto y = segments_[k].value(x);
  const cplx e = std::exp(log_scales_[k] - log_offset - I1 * double(sigma_) * z_.a() * y[2].real());
  return {e * y[0], e * y[1]};
}

Vec2 JostTrajectory::raw_derivative(double x, double log_offset) const {
  const std::size_t k = locate(x);
  const auto y = segments_[k].value(x);
  const auto dy = segments_[k].derivative(x);
  const cplx sa = I1 * double(sigma_) * z_.a();
  const cplx e = std::exp(log_scales_[k] - log_offset - sa * y[2].real());
  const cplx dc = sa * dy[2].real();
  return {e * (dy[0] - dc * y[0]), e * (dy[1] - dc * y[1])};
}

Vec2 JostTrajectory::factored(double x) const {
  const auto v = raw(x);
  const cplx ph = std::exp(I1 * z_.a() * omega(x));
  return {ph * v[0], v[1] / ph};
}

double JostTrajectory::log_norm(double x) const {
  const std::size_t k = locate(x);
  const auto y = segments_[k].value(x);
  const double grow = double(sigma_) * z_.a().imag() * y[2].real();
  return log_scales_[k] + grow + std::log(std::sqrt(std::norm(y[0]) + std::norm(y[1])));
}

double JostTrajectory::omega(double x) const {
  const std::size_t k = locate(x);
  return segments_[k].value(x)[2].real();
}

JostTrajectory integrate_jost(JostSide side, const SpectralParameter& z, const PotentialProfile& p,
                              const JostOptions& opts) {
  if (z.r() < 0.05) {
    throw Error(ErrorCode::NearZeroZ, "|z| < 0.05: use the z -> 1/z symmetry instead");
  }
  const auto dom = p.domain();
  JostTrajectory t;
  t.side_ = side;
  t.z_ = z;
  const double x_stop = std::clamp(opts.x_stop.value_or(p.matching_point()), dom.lo, dom.hi);
  ode::Vec<cplx, 3> y{};
  if (side == JostSide::Left) {
    t.x_begin_ = dom.lo;
    const bool first = p.k_minus() % 2 == 0;
    t.sigma_ = first ? 1 : -1;
    y = {first ? 1.0 : 0.0, first ? 0.0 : 1.0, p.omega_at_lo()};
  } else {
    t.x_begin_ = dom.hi;
    const bool first = p.k_plus() % 2 != 0;
    t.sigma_ = first ? 1 : -1;
    y = {first ? 1.0 : 0.0, first ? 0.0 : 1.0, p.omega_at_hi()};
  }
  t.x_end_ = x_stop;

  const cplx ia = I1 * z.a();
  const cplx ib = I1 * z.b();
  const bool first = t.sigma_ == 1;
  auto f = [&](double x, const ode::Vec<cplx, 3>& v) {
    const auto h = p.half_angle(x);
    const cplx bs = ib * h.s;
    const cplx ac2 = 2.0 * ia * h.c;
    if (first) return ode::Vec<cplx, 3>{bs * v[1], bs * v[0] + ac2 * v[1], h.c};
    return ode::Vec<cplx, 3>{-ac2 * v[0] + bs * v[1], bs * v[0], h.c};
  };
  double ell = 0.0;
  auto on_step = [&](const JostTrajectory::Segment& seg, ode::Vec<cplx, 3>& v) {
    t.segments_.push_back(seg);
    t.log_scales_.push_back(ell);
    const double n = std::sqrt(std::norm(v[0]) + std::norm(v[1]));
    if (n > kRescaleHigh || n < kRescaleLow) {
      if (n == 0.0 || !std::isfinite(n)) {
        throw Error(ErrorCode::StepFailure, "Jost solution lost all magnitude");
      }
      v[0] /= n;
      v[1] /= n;
      ell += std::log(n);
      return true;
    }
    return false;
  };
  ode::StepControl ctl;
  ctl.tol = opts.tol;
  if (x_stop != t.x_begin_) {
    t.stats_ = ode::dopri5<cplx, 3>(f, t.x_begin_, x_stop, y, ctl, on_step, p.breakpoints());
  } else {
    // Zero-length trajectory: a single degenerate segment holding the initial state.
    JostTrajectory::Segment seg;
    seg.x0 = x_stop;
    seg.h = 0.0;
    seg.r[0] = y;
    t.segments_.push_back(seg);
    t.log_scales_.push_back(0.0);
  }
  t.end_log_ = ell;
  return t;
}

namespace {

struct EndState {
  ode::Vec<cplx, 3> y;
  double ell;
};

EndState end_state(const JostTrajectory& t) {
  const auto& seg = t.segments().back();
  if (seg.h == 0.0) return {seg.r[0], t.log_scales().back()};
  return {seg.value(seg.x1()), t.log_scales().back()};
}

}  // namespace

cplx reduction_factor(const SpectralParameter& z, const PotentialProfile& p) {
  return std::exp(I1 * z.a() * p.phase_integral());
}

WronskianValue wronskian(const SpectralParameter& z, const PotentialProfile& p,
                         const WronskianOptions& opts) {
  JostOptions jo;
  jo.tol = opts.tol;
  jo.x_stop = opts.x_match.value_or(p.matching_point());
  const auto left = integrate_jost(JostSide::Left, z, p, jo);
  const auto right = integrate_jost(JostSide::Right, z, p, jo);
  const auto l = end_state(left);
  const auto r = end_state(right);
  WronskianValue w;
  w.mantissa = l.y[0] * r.y[1] - l.y[1] * r.y[0];
  const cplx ia = I1 * z.a();
  w.exponent = l.ell + r.ell - ia * (double(left.sigma()) * l.y[2].real() +
                                    double(right.sigma()) * r.y[2].real());
  w.reduced_exponent = w.exponent + ia * p.phase_integral();
  return w;
}

cplx reduced_wronskian(const SpectralParameter& z, const PotentialProfile& p,
                       const WronskianOptions& opts) {
  return wronskian(z, p, opts).reduced();
}

double wronskian_constancy(const JostTrajectory& left, const JostTrajectory& right,
                           std::size_t samples) {
  const double lo = std::max(std::min(left.x_begin(), left.x_end()),
                             std::min(right.x_begin(), right.x_end()));
  const double hi = std::min(std::max(left.x_begin(), left.x_end()),
                             std::max(right.x_begin(), right.x_end()));
  if (!(hi >= lo)) throw Error(ErrorCode::InvalidArgument, "trajectories do not overlap");
  const double mid = 0.5 * (lo + hi);
  // Common offsets taken at the midpoint keep every sample representable.
  const double offl = std::log(std::max(norm2(left.raw(mid)), 1e-300));
  const double offr = std::log(std::max(norm2(right.raw(mid)), 1e-300));
  auto w_at = [&](double x) {
    const auto a = left.raw(x, offl);
    const auto b = right.raw(x, offr);
    return a[0] * b[1] - a[1] * b[0];
  };
  const cplx w0 = w_at(mid);
  double dev = 0.0;
  for (std::size_t i = 0; i < samples; ++i) {
    const double x = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(samples - 1);
    dev = std::max(dev, std::abs(w_at(x) - w0));
  }
  return dev / std::max(1.0, std::abs(w0));
}

WronskianDerivative wronskian_derivative_fd(const SpectralParameter& z, const PotentialProfile& p,
                                            double tol, double step) {
  const double h = step * z.r();
  WronskianOptions wo;
  wo.tol = tol;
  cplx acc = 0.0;
  cplx dir = 1.0;
  for (int k = 0; k < 4; ++k) {
    acc += reduced_wronskian(SpectralParameter(z.z() + h * dir), p, wo) / dir;
    dir *= I1;
  }
  WronskianDerivative d;
  d.value = acc / (4.0 * h);
  // W = W_red e^{−iaK}: W' = (W_red' − i a' K W_red) e^{−iaK}.
  const cplx wr = reduced_wronskian(z, p, wo);
  const cplx da = 0.25 * (1.0 + 1.0 / (z.z() * z.z()));
  d.value_unreduced = (d.value - I1 * da * p.phase_integral() * wr) / reduction_factor(z, p);
  d.method = DerivativeMethod::FiniteDifference;
  return d;
}

Mat2 matmul(const Mat2& a, const Mat2& b) {
  Mat2 c{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
  return c;
}

TransferMatrix transfer_matrix(const SpectralParameter& z, const PotentialProfile& p, double a,
                               double b, double tol) {
  TransferMatrix m;
  m.interval = {a, b};
  m.entries = {{{1.0, 0.0}, {0.0, 1.0}}};
  if (a == b) return m;
  if (!(a < b)) throw Error(ErrorCode::InvalidArgument, "transfer_matrix needs a < b");
  // Columns stacked: (Y00, Y10, Y01, Y11).
  ode::Vec<cplx, 4> y{1.0, 0.0, 0.0, 1.0};
  auto f = [&](double x, const ode::Vec<cplx, 4>& v) {
    const auto h = p.half_angle(x);
    const cplx ac = I1 * z.a() * h.c;
    const cplx bs = I1 * z.b() * h.s;
    return ode::Vec<cplx, 4>{-ac * v[0] + bs * v[1], bs * v[0] + ac * v[1],
                             -ac * v[2] + bs * v[3], bs * v[2] + ac * v[3]};
  };
  double ell = 0.0;
  auto on_step = [&](const ode::DenseSegment<cplx, 4>&, ode::Vec<cplx, 4>& v) {
    double n = 0.0;
    for (const auto& e : v) n = std::max(n, std::abs(e));
    if (n > 1e100) {
      for (auto& e : v) e /= n;
      ell += std::log(n);
      return true;
    }
    return false;
  };
  ode::StepControl ctl;
  ctl.tol = tol;
  ode::dopri5<cplx, 4>(f, a, b, y, ctl, on_step, p.breakpoints());
  const double s = std::exp(ell);
  m.entries = {{{s * y[0], s * y[2]}, {s * y[1], s * y[3]}}};
  return m;
}

BoundState::BoundState(const SpectralParameter& z, const PotentialProfile& p, double tol,
                       double consistency_tol)
    : z_(z), p_(p), x_m_(p.matching_point()) {
  JostOptions jo;
  jo.tol = tol;
  jo.x_stop = x_m_;
  left_ = integrate_jost(JostSide::Left, z, p_, jo);
  right_ = integrate_jost(JostSide::Right, z, p_, jo);
  offset_left_ = left_.log_norm(x_m_);
  offset_right_ = right_.log_norm(x_m_);
  const auto l = left_.raw(x_m_, offset_left_);
  const auto r = right_.raw(x_m_, offset_right_);
  rho_ = (std::conj(r[0]) * l[0] + std::conj(r[1]) * l[1]) /
         (std::norm(r[0]) + std::norm(r[1]));
  mismatch_ = norm2({l[0] - rho_ * r[0], l[1] - rho_ * r[1]}) / norm2(l);
  if (!(mismatch_ <= consistency_tol)) {
    throw Error(ErrorCode::InconsistentJost,
                "Jost solutions are not proportional at the matching point (mismatch " +
                    std::to_string(mismatch_) + ")");
  }
  const double mass = integrate_unnormalized([](double, const Vec2& v) { return std::norm(v[0]) + std::norm(v[1]); });
  // Phase: φ₁(x_m) real positive, or iφ₂(x_m) when φ₁ vanishes there.
  const auto vm = unnormalized(x_m_);
  cplx ref = std::abs(vm[0]) >= 1e-3 * std::abs(vm[1]) ? vm[0] : I1 * vm[1];
  norm_ = std::conj(ref) / std::abs(ref) / std::sqrt(mass);
}

Vec2 BoundState::unnormalized(double x) const {
  if (x <= x_m_) return left_.raw(x, offset_left_);
  const auto r = right_.raw(x, offset_right_);
  return {rho_ * r[0], rho_ * r[1]};
}

Vec2 BoundState::value(double x) const {
  const auto v = unnormalized(x);
  return {norm_ * v[0], norm_ * v[1]};
}

Vec2 BoundState::derivative(double x) const { return rhs(x, z_, value(x), p_); }

cplx BoundState::wronskian_derivative() const {
  const cplx z = z_.z();
  const cplx zi2 = 1.0 / (z * z);
  const cplx g1 = -0.5 * I1 * (1.0 + zi2);
  const cplx g2 = -0.25 * I1 * (1.0 - zi2);
  // The unnormalized eigenfunction is e^{-offset} times the continuation of Ψ.
  const cplx integral = integrate_unnormalized([&](double x, const Vec2& v) {
    const auto h = p_.half_angle(x);
    return g1 * h.c * v[0] * v[1] + g2 * h.s * (v[0] * v[0] - v[1] * v[1]);
  });
  const cplx expo = offset_left_ + offset_right_ + I1 * z_.a() * p_.phase_integral();
  return std::exp(expo) * integral / rho_;
}

double BoundState::phase_alignment_defect(std::size_t samples) const {
  double worst = 0.0, scale = 0.0;
  const auto d = p_.domain();
  for (std::size_t i = 0; i < samples; ++i) {
    const double x = d.lo + d.length() * static_cast<double>(i) / static_cast<double>(samples - 1);
    const auto v = value(x);
    worst = std::max({worst, std::abs(v[0].imag()), std::abs(v[1].real())});
    scale = std::max(scale, norm2(v));
  }
  return scale > 0.0 ? worst / scale : 0.0;
}

}  // namespace sgspec
