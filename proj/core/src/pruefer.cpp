#include "sgspec/pruefer.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/tools/roots.hpp>

#include "sgspec/error.hpp"
#include "sgspec/ode.hpp"
#include "sgspec/parallel.hpp"
#include "sgspec/scattering.hpp"

namespace sgspec {

namespace {

constexpr double pi = std::numbers::pi;

using State = ode::Vec<double, 2>;

struct AngleRhs {
  const PotentialProfile& p;
  double st, ct;
  State operator()(double x, const State& y) const {
    const auto h = p.half_angle(x);
    return {-0.5 * (ct * h.s + st * h.c * std::sin(2.0 * y[0])),
            0.5 * st * h.c * std::cos(2.0 * y[0])};
  }
};

State sweep(const PotentialProfile& p, double theta, double x0, double x1, State y,
            const PrueferOptions& opts) {
  if (x0 == x1) return y;
  AngleRhs f{p, std::sin(theta), std::cos(theta)};
  ode::StepControl ctl;
  ctl.tol = opts.tol;
  ode::dopri5<double, 2>(f, x0, x1, y, ctl, [](const auto&, State&) { return false; },
                         p.breakpoints());
  return y;
}

// η_R on the right end: π/2 for an even right asymptote (eigenfunction ∝ (0, 1)),
// 0 for an odd one (∝ (1, 0)).
double right_boundary_angle(const PotentialProfile& q) {
  return q.k_plus() % 2 == 0 ? 0.5 * pi : 0.0;
}

}  // namespace

PotentialProfile anchored(const PotentialProfile& p) { return p.shifted(p.k_minus()); }

PrueferFlow pruefer_flow_detail(double theta, const PotentialProfile& p, const PrueferOptions& opts) {
  const auto q = anchored(p);
  const auto d = q.domain();
  const double xm = q.matching_point();
  PrueferFlow out;
  out.theta = theta;
  out.right_boundary = right_boundary_angle(q);
  const State l = sweep(q, theta, d.lo, xm, {0.0, 0.0}, opts);
  const State r = sweep(q, theta, d.hi, xm, {out.right_boundary, 0.0}, opts);
  out.left = {l[0], l[1]};
  out.right = {r[0], r[1]};
  out.endpoint = l[0] - r[0] + out.right_boundary;
  return out;
}

double pruefer_flow(double theta, const PotentialProfile& p, const PrueferOptions& opts) {
  return pruefer_flow_detail(theta, p, opts).endpoint;
}

std::vector<std::pair<double, PrueferState>> pruefer_trajectory(double theta,
                                                                const PotentialProfile& p,
                                                                const PrueferOptions& opts) {
  const auto q = anchored(p);
  const auto d = q.domain();
  AngleRhs f{q, std::sin(theta), std::cos(theta)};
  ode::StepControl ctl;
  ctl.tol = opts.tol;
  State y{0.0, 0.0};
  std::vector<std::pair<double, PrueferState>> out{{d.lo, {0.0, 0.0}}};
  ode::dopri5<double, 2>(
      f, d.lo, d.hi, y, ctl,
      [&](const ode::DenseSegment<double, 2>& seg, State& s) {
        out.push_back({seg.x1(), {s[0], s[1]}});
        return false;
      },
      q.breakpoints());
  return out;
}

std::vector<std::pair<double, double>> pruefer_curve(const PotentialProfile& p, std::size_t samples,
                                                     const PrueferOptions& opts) {
  const auto q = anchored(p);
  return parallel_map<std::pair<double, double>>(samples, [&](std::size_t i) {
    const double th = 0.5 * pi * static_cast<double>(i) / static_cast<double>(samples - 1);
    return std::pair{th, pruefer_flow(th, q, opts)};
  });
}

std::vector<double> circle_scan(const PotentialProfile& p, const CircleScanOptions& opts) {
  if (opts.grid_size < 16) throw Error(ErrorCode::InvalidArgument, "circle scan grid must be >= 16");
  const auto q = anchored(p);
  const bool odd = q.charge() % 2 != 0;
  const double base = right_boundary_angle(q);

  std::size_t n = opts.grid_size;
  std::vector<double> thetas, values;
  for (int attempt = 0;; ++attempt) {
    // Odd charge: θ = π/2 itself is the always-present eigenvalue, kept out of bracketing.
    const std::size_t count = odd ? n : n + 1;
    thetas.resize(count);
    for (std::size_t j = 0; j < count; ++j) {
      thetas[j] = 0.5 * pi * static_cast<double>(j) / static_cast<double>(n);
    }
    values = parallel_map<double>(count, [&](std::size_t j) {
      return pruefer_flow(thetas[j], q, opts.flow);
    });
    double jump = 0.0;
    for (std::size_t j = 0; j + 1 < count; ++j) {
      jump = std::max(jump, std::abs(values[j + 1] - values[j]));
    }
    if (jump <= 0.5 * pi) break;
    if (attempt >= opts.max_doublings) {
      throw Error(ErrorCode::GridTooCoarse,
                  "endpoint angle jumps by " + std::to_string(jump) + " between scan samples");
    }
    n *= 2;
  }

  std::vector<double> angles;
  for (std::size_t j = 0; j + 1 < thetas.size(); ++j) {
    const double lo = std::min(values[j], values[j + 1]);
    const double hi = std::max(values[j], values[j + 1]);
    const auto m_lo = static_cast<long>(std::ceil((lo - base) / pi));
    const auto m_hi = static_cast<long>(std::floor((hi - base) / pi));
    for (long m = m_lo; m <= m_hi; ++m) {
      const double level = base + pi * static_cast<double>(m);
      const double ga = values[j] - level;
      const double gb = values[j + 1] - level;
      // Sign convention (≤ 0 versus > 0) counts each crossing exactly once.
      if ((ga <= 0.0) == (gb <= 0.0)) continue;
      if (j == 0 && ga == 0.0) continue;  // θ = 0 is not in the open quadrant
      auto g = [&](double th) { return pruefer_flow(th, q, opts.flow) - level; };
      std::uintmax_t iters = 100;
      auto tol = [&](double a, double b) { return std::abs(b - a) < opts.angle_tol; };
      const auto root = boost::math::tools::toms748_solve(g, thetas[j], thetas[j + 1], ga, gb,
                                                          tol, iters);
      angles.push_back(0.5 * (root.first + root.second));
    }
  }
  std::sort(angles.begin(), angles.end());
  if (odd) angles.push_back(0.5 * pi);
  return angles;
}

int count_lower_bound(double I, int charge) {
  const double a = std::abs(I);
  if (charge == 0) {
    // Largest N with |I| > (2N − 1)π.
    const double t = 0.5 * (a / pi + 1.0);
    return std::max(0, static_cast<int>(std::ceil(t)) - 1);
  }
  if (charge == 1 || charge == -1) {
    // 2N + 1 with N largest such that |I| > 2Nπ.
    const int n = std::max(0, static_cast<int>(std::ceil(a / (2.0 * pi))) - 1);
    return 2 * n + 1;
  }
  return 0;
}

CountReport count_report(const PotentialProfile& p, const CircleScanOptions& opts) {
  CountReport rep;
  const auto l1 = l1_sine_half(p, opts.l1_tol);
  rep.I = l1.signed_value;
  rep.I_abs = l1.abs_value;
  rep.I_error = l1.error_bound;
  rep.charge = p.charge();
  rep.applicability = classify(p);
  const double a = std::abs(rep.I);
  rep.lower_bound_N = count_lower_bound(rep.I, rep.charge);

  if (rep.charge == 0) {
    const int n = rep.lower_bound_N;
    rep.near_threshold = std::abs(a - (2 * n - 1) * pi) < 1e-6 || std::abs(a - (2 * n + 1) * pi) < 1e-6;
    rep.counting_region = "open first quadrant";
  } else if (rep.charge == 1 || rep.charge == -1) {
    const int n = (rep.lower_bound_N - 1) / 2;
    rep.near_threshold = std::abs(a - 2 * n * pi) < 1e-6 || std::abs(a - 2 * (n + 1) * pi) < 1e-6;
    rep.counting_region = "open upper half plane";
  } else {
    rep.counting_region = "none";
  }

  const auto quadrant = circle_scan(p, opts);
  const bool odd = rep.charge % 2 != 0;
  if (odd) {
    std::vector<double> all(quadrant.begin(), quadrant.end());
    for (double th : quadrant) {
      if (th < 0.5 * pi) all.push_back(pi - th);
    }
    std::sort(all.begin(), all.end());
    rep.circle_angles = all;
  } else {
    rep.circle_angles = quadrant;
  }

  switch (rep.applicability.tag) {
    case HypothesisTag::KinkMonotoneQ1:
    case HypothesisTag::KinkMonotoneQminus1:
      rep.exact_count = rep.lower_bound_N;
      rep.theorem =
          "monotone kink: exactly 2N+1 eigenvalues in the upper half plane, all on the unit "
          "circle and simple, N largest with |I| > 2N pi";
      break;
    case HypothesisTag::KlausShawBreather:
      rep.exact_count = rep.lower_bound_N;
      rep.theorem =
          "single-hump breather with 0 < u0 < pi: exactly N eigenvalues in the open first "
          "quadrant, all on the unit circle and simple, N largest with |I| > (2N-1) pi";
      break;
    case HypothesisTag::General:
      if (rep.charge == 0 || odd) {
        rep.theorem = "general profile: |I| gives a lower bound on circle eigenvalues only";
      } else {
        rep.theorem = "|Q| >= 2: counting theorems do not apply";
      }
      break;
  }
  if (rep.exact_count) {
    rep.scan_consistent = static_cast<int>(rep.circle_angles.size()) == *rep.exact_count;
  } else {
    const int found = odd ? static_cast<int>(rep.circle_angles.size())
                          : static_cast<int>(quadrant.size());
    rep.scan_consistent = found >= rep.lower_bound_N;
  }
  return rep;
}

CountReport count_exact(const PotentialProfile& p, const CircleScanOptions& opts) {
  if (classify(p).tag == HypothesisTag::General) {
    throw Error(ErrorCode::HypothesisNotMet,
                "exact counting needs a monotone kink or a single-hump breather");
  }
  return count_report(p, opts);
}

MonotonicityCertificate angle_monotonicity_certificate(const PotentialProfile& p, double theta,
                                                       double tol) {
  const auto q = anchored(p);
  const BoundState bs(SpectralParameter::polar(1.0, theta), q, tol);
  const double st = std::sin(theta), ct = std::cos(theta);
  const cplx i1(0.0, 1.0);
  const cplx b = bs.integrate([&](double x, const Vec2& v) {
    const auto h = q.half_angle(x);
    const cplx tau3 = std::conj(v[0]) * v[1] - std::conj(v[1]) * v[0];
    return st * h.s * (std::norm(v[0]) + std::norm(v[1])) - i1 * ct * h.c * tau3;
  });
  const auto vm = bs.value(bs.matching_point());
  MonotonicityCertificate c;
  c.bracket = b.real();
  c.rho_match_sq = std::norm(vm[0]) + std::norm(vm[1]);
  const double sign = l1_sine_half(q).signed_value >= 0.0 ? 1.0 : -1.0;
  c.integral_formula = sign * c.bracket / (2.0 * c.rho_match_sq);
  if (!(c.integral_formula > 0.0)) {
    throw Error(ErrorCode::NonPositiveDerivative,
                "dL/dtheta = " + std::to_string(c.integral_formula) + " at theta = " +
                    std::to_string(theta));
  }
  return c;
}

}  // namespace sgspec
