#include "sgspec/krein.hpp"

#include <algorithm>
#include <cmath>

#include "sgspec/error.hpp"

namespace sgspec {

namespace {

constexpr cplx I1{0.0, 1.0};

// ⟨a, M b⟩ for the three τ matrices and the identity.
cplx form_tau1(const Vec2& a, const Vec2& b) {
  return -I1 * std::conj(a[0]) * b[0] + I1 * std::conj(a[1]) * b[1];
}
cplx form_tau2(const Vec2& a, const Vec2& b) {
  return I1 * (std::conj(a[0]) * b[1] + std::conj(a[1]) * b[0]);
}
cplx form_tau3(const Vec2& a, const Vec2& b) {
  return std::conj(a[0]) * b[1] - std::conj(a[1]) * b[0];
}
cplx form_id(const Vec2& a, const Vec2& b) {
  return std::conj(a[0]) * b[0] + std::conj(a[1]) * b[1];
}

}  // namespace

SignatureReport signature_report(const BoundState& state) {
  const auto& z = state.parameter();
  const auto& p = state.profile();
  const double r = z.r();
  const double st = std::sin(z.theta()), ct = std::cos(z.theta());
  struct Four {
    cplx v[4];
    Four operator+(const Four& o) const {
      return {{v[0] + o.v[0], v[1] + o.v[1], v[2] + o.v[2], v[3] + o.v[3]}};
    }
    Four operator*(double w) const { return {{v[0] * w, v[1] * w, v[2] * w, v[3] * w}}; }
  };
  const Four in = state.integrate([&](double x, const Vec2& v) {
    const auto h = p.half_angle(x);
    return Four{{h.s * form_id(v, v), h.c * form_tau3(v, v), h.c * form_tau2(v, v),
                 h.s * form_tau1(v, v)}};
  });
  SignatureReport rep;
  for (int k = 0; k < 4; ++k) rep.bracket_integrals[static_cast<std::size_t>(k)] = in.v[k];
  const cplx bracket = st * in.v[0] - I1 * ct * in.v[1];
  rep.circle_bracket = bracket.real();
  rep.kappa_circle = 2.0 * I1 * r * bracket;
  rep.kappa_imag = 0.5 * I1 * (r - 1.0 / r) * in.v[2] - 0.5 * I1 * (r + 1.0 / r) * in.v[3];
  rep.definite = std::abs(rep.circle_bracket) > 1e-8;
  return rep;
}

namespace {

BoundState certified_state(const SpectralParameter& z, const PotentialProfile& p,
                           double threshold, double tol) {
  WronskianOptions wo;
  wo.tol = tol;
  const double w = std::abs(reduced_wronskian(z, p, wo));
  if (!(w <= threshold)) {
    throw Error(ErrorCode::NotAnEigenvalue,
                "|W| = " + std::to_string(w) + " exceeds the eigenvalue threshold");
  }
  return BoundState(z, p, tol);
}

}  // namespace

cplx circle_signature(const SpectralParameter& z, const PotentialProfile& p, double threshold,
                      double tol) {
  return signature_report(certified_state(z, p, threshold, tol)).kappa_circle;
}

cplx imag_axis_signature(const SpectralParameter& z, const PotentialProfile& p, double threshold,
                         double tol) {
  return signature_report(certified_state(z, p, threshold, tol)).kappa_imag;
}

FluxResiduals flux_residuals(const JostTrajectory& t, const PotentialProfile& p) {
  const cplx z = t.parameter().z();
  const cplx w = z - 1.0 / z;
  const cplx v = z + 1.0 / z;
  const double scale = std::max({1.0, std::abs(z), 1.0 / std::abs(z)});
  FluxResiduals out;
  for (const auto& seg : t.segments()) {
    if (seg.h == 0.0) continue;
    const double x = seg.x0 + 0.5 * seg.h;
    const double off = t.log_norm(x);
    const Vec2 f = t.raw(x, off);
    const Vec2 df = t.raw_derivative(x, off);
    const auto h = p.half_angle(x);
    const cplx n = form_id(f, f), t1 = form_tau1(f, f), t2 = form_tau2(f, f), t3 = form_tau3(f, f);
    auto dform = [&](auto form) { return form(df, f) + form(f, df); };
    const cplx lhs[4] = {dform(form_tau2), dform(form_tau3), dform(form_id), dform(form_tau1)};
    const cplx rhs[4] = {
        -0.5 * w.real() * h.c * t3 - 0.5 * I1 * v.imag() * h.s * n,
        0.5 * w.real() * h.c * t2 - 0.5 * v.real() * h.s * t1,
        0.5 * I1 * w.imag() * h.c * t1 + 0.5 * I1 * v.imag() * h.s * t2,
        -0.5 * I1 * w.imag() * h.c * n + 0.5 * v.real() * h.s * t3,
    };
    const double amp = n.real() * scale;
    for (std::size_t k = 0; k < 4; ++k) {
      out.residual[k] = std::max(out.residual[k], std::abs(lhs[k] - rhs[k]) / amp);
    }
    ++out.samples;
  }
  return out;
}

std::vector<OrbitMember> symmetry_orbit(cplx z) {
  if (z == 0.0) throw Error(ErrorCode::InvalidArgument, "z = 0 has no orbit");
  const cplx zc = std::conj(z);
  const std::vector<OrbitMember> all = {
      {z, "identity"},
      {1.0 / z, "tau2"},
      {-z, "tau3"},
      {zc, "tau3 conj"},
      {-1.0 / z, "tau2 tau3"},
      {1.0 / zc, "tau2 tau3 conj"},
      {-zc, "conj"},
      {-1.0 / zc, "tau2 conj"},
  };
  std::vector<OrbitMember> out;
  const double eps = 1e-12 * std::max(std::abs(z), 1.0 / std::abs(z));
  for (const auto& m : all) {
    const bool dup = std::any_of(out.begin(), out.end(),
                                 [&](const OrbitMember& o) { return std::abs(o.z - m.z) <= eps; });
    if (!dup) out.push_back(m);
  }
  return out;
}

std::vector<cplx> upper_half_orbit(cplx z) {
  std::vector<cplx> out;
  for (const auto& m : symmetry_orbit(z)) {
    if (m.z.imag() >= 0.0) out.push_back(m.z);
  }
  return out;
}

double zero_momentum_residual(const BoundState& state) {
  const cplx r = state.integrate([&](double x, const Vec2& v) {
    const Vec2 d = state.derivative(x);
    return std::conj(v[0]) * d[0] - std::conj(v[1]) * d[1];
  });
  return std::abs(r);
}

}  // namespace sgspec
