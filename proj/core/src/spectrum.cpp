#include "sgspec/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

#include "sgspec/error.hpp"
#include "sgspec/parallel.hpp"

namespace sgspec {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double r_floor = 0.05;
constexpr double axis_margin = 0.01;

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

std::string fmt(cplx z) { return "(" + fmt(z.real()) + ", " + fmt(z.imag()) + ")"; }

// Half-plane reflection folded into the first quadrant.
double folded_angle(cplx z) {
  const double t = std::arg(z);
  return t > 0.5 * pi ? pi - t : t;
}

cplx reduced_w(cplx z, const PotentialProfile& p, double tol) {
  WronskianOptions wo;
  wo.tol = tol;
  return reduced_wronskian(SpectralParameter(z), p, wo);
}

}  // namespace

// ---------------------------------------------------------------- regions

SearchRegion SearchRegion::annulus_sector(double r_min, double r_max, double theta_min,
                                          double theta_max) {
  SearchRegion r;
  r.kind = Kind::AnnulusSector;
  r.r0 = r_min;
  r.r1 = r_max;
  r.t0 = theta_min;
  r.t1 = theta_max;
  return r;
}

SearchRegion SearchRegion::rectangle(double re_min, double re_max, double im_min, double im_max) {
  SearchRegion r;
  r.kind = Kind::Rectangle;
  r.r0 = re_min;
  r.r1 = re_max;
  r.t0 = im_min;
  r.t1 = im_max;
  return r;
}

bool SearchRegion::contains(cplx z) const {
  if (kind == Kind::AnnulusSector) {
    const double r = std::abs(z), t = std::arg(z);
    return r >= r0 && r <= r1 && t >= t0 && t <= t1;
  }
  return z.real() >= r0 && z.real() <= r1 && z.imag() >= t0 && z.imag() <= t1;
}

void SearchRegion::validate() const {
  auto fail = [](const std::string& m) { throw Error(ErrorCode::InvalidArgument, m); };
  if (!(r1 > r0) || !(t1 > t0)) fail("search region bounds must be increasing");
  if (kind == Kind::AnnulusSector) {
    if (r0 < r_floor) fail("search region must keep |z| >= 0.05");
    if (t0 < axis_margin || t1 > pi - axis_margin) fail("search region must keep 0.01 <= arg z <= pi - 0.01");
  } else {
    if (t0 < axis_margin) fail("search rectangle must keep Im z >= 0.01");
    // Closest point of the rectangle to the origin.
    const double cx = std::clamp(0.0, r0, r1);
    if (std::hypot(cx, t0) < r_floor) fail("search rectangle must keep |z| >= 0.05");
  }
  for (const auto& d : excluded) {
    if (!(d.radius > 0.0)) fail("excluded disks need a positive radius");
  }
}

std::string SearchRegion::describe() const {
  std::ostringstream os;
  os.precision(6);
  if (kind == Kind::AnnulusSector) {
    os << "annulus-sector " << r0 << " <= |z| <= " << r1 << ", " << t0 << " <= arg z <= " << t1;
  } else {
    os << "rectangle " << r0 << " <= Re z <= " << r1 << ", " << t0 << " <= Im z <= " << t1;
  }
  if (!excluded.empty()) os << " minus " << excluded.size() << " disk(s)";
  return os.str();
}

// ---------------------------------------------------------------- contours

Contour circle_contour(cplx center, double radius) {
  Contour c;
  c.label = "circle";
  c.pieces.push_back([=](double t) { return center + radius * std::polar(1.0, 2.0 * pi * t); });
  return c;
}

Contour annular_sector_contour(double r0, double r1, double t0, double t1) {
  Contour c;
  c.label = "annular sector";
  c.pieces.push_back([=](double t) { return std::polar(r0 * std::pow(r1 / r0, t), t0); });
  c.pieces.push_back([=](double t) { return std::polar(r1, t0 + (t1 - t0) * t); });
  c.pieces.push_back([=](double t) { return std::polar(r1 * std::pow(r0 / r1, t), t1); });
  c.pieces.push_back([=](double t) { return std::polar(r0, t1 + (t0 - t1) * t); });
  return c;
}

Contour rectangle_contour(double re0, double re1, double im0, double im1) {
  Contour c;
  c.label = "rectangle";
  const cplx a(re0, im0), b(re1, im0), d(re1, im1), e(re0, im1);
  for (auto [p, q] : {std::pair{a, b}, std::pair{b, d}, std::pair{d, e}, std::pair{e, a}}) {
    c.pieces.push_back([=](double t) { return p + (q - p) * t; });
  }
  return c;
}

WindingResult winding_number(const Contour& contour, const PotentialProfile& p,
                             const WindingOptions& opts) {
  if (contour.pieces.empty()) throw Error(ErrorCode::InvalidArgument, "empty contour");
  WindingResult out;
  out.min_abs = std::numeric_limits<double>::infinity();
  double total = 0.0;
  std::vector<std::vector<std::pair<double, cplx>>> pieces;
  const std::size_t n0 = std::max<std::size_t>(opts.initial_samples, 4);
  for (const auto& piece : contour.pieces) {
    std::vector<double> ts(n0 + 1);
    for (std::size_t k = 0; k <= n0; ++k) ts[k] = static_cast<double>(k) / static_cast<double>(n0);
    auto ws = parallel_map<cplx>(ts.size(), [&](std::size_t k) { return reduced_w(piece(ts[k]), p, opts.tol); });
    std::vector<std::pair<double, cplx>> s;
    for (std::size_t k = 0; k < ts.size(); ++k) s.emplace_back(ts[k], ws[k]);
    pieces.push_back(std::move(s));
  }
  auto scan_abs = [&] {
    out.max_abs = 0.0;
    for (const auto& s : pieces)
      for (const auto& [t, w] : s) out.max_abs = std::max(out.max_abs, std::abs(w));
  };
  for (std::size_t pi_idx = 0; pi_idx < pieces.size(); ++pi_idx) {
    auto& s = pieces[pi_idx];
    const auto& piece = contour.pieces[pi_idx];
    for (;;) {
      scan_abs();
      std::vector<double> mids;
      for (std::size_t k = 0; k + 1 < s.size(); ++k) {
        const cplx w0 = s[k].second, w1 = s[k + 1].second;
        if (std::min(std::abs(w0), std::abs(w1)) < opts.zero_floor * out.max_abs) {
          throw Error(ErrorCode::ZeroOnContour, contour.label + " passes through a zero near " +
                                                    fmt(piece(s[k].first)));
        }
        const double ratio = std::abs(w1) / std::abs(w0);
        if (std::abs(std::arg(w1 / w0)) > opts.max_phase_step || ratio > 4.0 || ratio < 0.25) {
          if (s[k + 1].first - s[k].first < opts.min_parameter_step) {
            throw Error(ErrorCode::ZeroOnContour, contour.label + " cannot be resolved near " +
                                                      fmt(piece(s[k].first)));
          }
          mids.push_back(0.5 * (s[k].first + s[k + 1].first));
        }
      }
      if (mids.empty()) break;
      auto ws = parallel_map<cplx>(mids.size(), [&](std::size_t k) { return reduced_w(piece(mids[k]), p, opts.tol); });
      for (std::size_t k = 0; k < mids.size(); ++k) s.emplace_back(mids[k], ws[k]);
      std::sort(s.begin(), s.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    }
  }
  for (std::size_t k = 0; k < pieces.size(); ++k) {
    const auto& s = pieces[k];
    for (std::size_t j = 0; j + 1 < s.size(); ++j) total += std::arg(s[j + 1].second / s[j].second);
    // Pieces join end to start; bridge any tiny mismatch at the joints.
    const cplx next = pieces[(k + 1) % pieces.size()].front().second;
    total += std::arg(next / s.back().second);
    out.samples += s.size();
    for (const auto& [t, w] : s) out.min_abs = std::min(out.min_abs, std::abs(w));
  }
  out.phase_change = total;
  out.winding = static_cast<int>(std::lround(total / (2.0 * pi)));
  return out;
}

// ---------------------------------------------------------------- exclusions

bool ExclusionRegion::contains(cplx z) const {
  const double r = std::abs(z), t = std::arg(z);
  switch (kind) {
    case Kind::OriginDisk:
      return z.imag() > 0.0 && r < parameter * std::sin(t);
    case Kind::ImagBound:
      return z.imag() > parameter;
    case Kind::SectorComplement:
      return t >= parameter && t <= pi - parameter;
    case Kind::CorollaryDisk:
      return r < parameter;
  }
  return false;
}

Contour ExclusionRegion::contour(int attempt) const {
  const double e = 1e-3 * attempt;
  Contour c;
  c.label = name;
  switch (kind) {
    case Kind::OriginDisk: {
      // {r_min < r < D sin θ}: the disk arc over the top, back along |z| = r_min.
      const double d = parameter * (1.0 - e);
      const double rmin = r_floor * (1.001 + e);
      const double tp = std::asin(std::min(1.0, rmin / d));
      c.pieces.push_back([=](double t) {
        const double th = tp + (pi - 2.0 * tp) * t;
        return std::polar(d * std::sin(th), th);
      });
      c.pieces.push_back([=](double t) { return std::polar(rmin, pi - tp - (pi - 2.0 * tp) * t); });
      break;
    }
    case Kind::ImagBound: {
      const double h = parameter * (1.0 + e);
      const double big = 20.0 * (0.999 - e);
      const double w = std::sqrt(big * big - h * h);
      const double ta = std::asin(h / big);
      c.pieces.push_back([=](double t) { return cplx(-w + 2.0 * w * t, h); });
      c.pieces.push_back([=](double t) { return std::polar(big, ta + (pi - 2.0 * ta) * t); });
      break;
    }
    case Kind::SectorComplement: {
      const double t0 = parameter + e;
      return annular_sector_contour(r_floor * (1.001 + e), 20.0 * (0.999 - e), t0, pi - t0);
    }
    case Kind::CorollaryDisk:
      throw Error(ErrorCode::InvalidArgument, "the corollary disk is checked pointwise only");
  }
  return c;
}

ExclusionSet exclusion_regions(const PotentialProfile& p) {
  const auto cls = classify(p);
  if (!cls.is_breather()) {
    throw Error(ErrorCode::HypothesisNotMet, "exclusion regions need a single-hump breather");
  }
  const auto n = derivative_norms(p);
  ExclusionSet set;
  auto& b = set.bounds;
  b.ux_l1 = n.ux_l1;
  b.ux_sup = n.ux_sup;
  b.sine_l1 = n.sine_half_l1;
  b.u0 = cls.u0;

  // Rotating (ψ₁, ψ₂) by u/4 leaves the diagonal exponent Θ' = i/(4z) − i z cos(u)/4
  // and off-diagonal couplings f± = i z sin(u)/4 ± u_x/4. For the left Jost
  // solution, v₁ = 1 + T v₁ with the double Volterra kernel
  //   (T v)(x) = ∫_{−∞}^x f₊(t) ∫_{−∞}^t f₋(y) e^{2(Θ(y)−Θ(t))} v(y) dy dt.
  // For |z| = r < 1, Re Θ' ≥ Im z (1/r² − 1)/4, so
  //   ‖T‖ ≤ 2 ‖f₊‖₁ ‖f₋‖∞ r² / (Im z (1 − r²)) ≤ C r² / Im z   on r ≤ ρ₀,
  // with ‖f₊‖₁ ≤ (‖u_x‖₁ + 2ρ₀‖sin(u/2)‖₁)/4, ‖f₋‖∞ ≤ (‖u_x‖∞ + ρ₀)/4 and
  // C = 2‖f₊‖₁‖f₋‖∞/(1 − ρ₀²). ‖T‖ < 1/2 keeps |v₁ − 1| < 1, so v₁(+∞) ≠ 0 and
  // z is no eigenvalue. That holds on r < sin θ / (2C), intersected with r < ρ₀.
  auto constant = [&](double rho) {
    const double fp = 0.25 * (b.ux_l1 + 2.0 * rho * b.sine_l1);
    const double fm = 0.25 * (b.ux_sup + rho);
    return 2.0 * fp * fm / (1.0 - rho * rho);
  };
  // min(ρ₀, 1/(2C(ρ₀))) peaks where the two meet.
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 100; ++it) {
    const double m = 0.5 * (lo + hi);
    if (m < 0.5 / constant(m)) lo = m; else hi = m;
  }
  b.rho0 = lo;
  b.C = constant(lo);
  b.diameter = std::min(lo, 0.5 / b.C);
  // Off-circle eigenvalues sit in (π − u0)/2 < θ < u0/2, where sin θ > cos(u0/2).
  b.corollary_radius = std::min(1.0, b.diameter * std::cos(0.5 * b.u0));

  ExclusionRegion disk;
  disk.kind = ExclusionRegion::Kind::OriginDisk;
  disk.name = "near-origin disk";
  disk.parameter = b.diameter;
  disk.empty = b.diameter <= r_floor * 1.01;
  set.regions.push_back(disk);

  ExclusionRegion top;
  top.kind = ExclusionRegion::Kind::ImagBound;
  top.name = "Im z upper bound";
  top.parameter = 1.0 / b.diameter;
  top.empty = top.parameter >= 20.0 * 0.99;
  set.regions.push_back(top);

  ExclusionRegion sector;
  sector.kind = ExclusionRegion::Kind::SectorComplement;
  sector.name = "sector complement";
  sector.parameter = 0.5 * b.u0;
  set.regions.push_back(sector);

  ExclusionRegion corollary;
  corollary.kind = ExclusionRegion::Kind::CorollaryDisk;
  corollary.name = "corollary disk";
  corollary.parameter = b.corollary_radius;
  set.regions.push_back(corollary);
  return set;
}

WindingResult exclusion_winding(const ExclusionRegion& region, const PotentialProfile& p,
                                const WindingOptions& opts, int max_attempts) {
  for (int attempt = 0;; ++attempt) {
    try {
      return winding_number(region.contour(attempt), p, opts);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::ZeroOnContour || attempt + 1 >= max_attempts) throw;
    }
  }
}

// ---------------------------------------------------------------- search

namespace {

struct Sample {
  double s;
  cplx w;
};
using Edge = std::vector<Sample>;

struct Cell {
  double u0, u1, v0, v1;
  int depth = 0;
  Edge bottom, right, top, left;  // each ascending in its free coordinate
  int winding = 0;
};

double edge_phase(const Edge& e) {
  double t = 0.0;
  for (std::size_t k = 0; k + 1 < e.size(); ++k) t += std::arg(e[k + 1].w / e[k].w);
  return t;
}

int cell_winding(const Cell& c) {
  const double total = edge_phase(c.bottom) + edge_phase(c.right) - edge_phase(c.top) -
                       edge_phase(c.left);
  return static_cast<int>(std::lround(total / (2.0 * pi)));
}

Edge slice(const Edge& e, double a, double b) {
  Edge out;
  for (const auto& s : e) {
    if (s.s >= a && s.s <= b) out.push_back(s);
  }
  return out;
}

class Searcher {
 public:
  Searcher(const PotentialProfile& p, bool log_polar, const SearchOptions& opts)
      : p_(p), log_polar_(log_polar), opts_(opts) {}

  cplx map(double u, double v) const {
    return log_polar_ ? std::exp(cplx(u, v)) : cplx(u, v);
  }
  std::pair<double, double> unmap(cplx z) const {
    return log_polar_ ? std::pair{std::log(std::abs(z)), std::arg(z)} : std::pair{z.real(), z.imag()};
  }

  std::size_t evaluations() const { return evaluations_; }
  double scale() const { return scale_; }
  void set_scale(double s) { scale_ = s; }

  cplx at(double u, double v) {
    auto it = cache_.find({u, v});
    if (it != cache_.end()) return it->second;
    const cplx w = eval(map(u, v));
    cache_.emplace(std::pair{u, v}, w);
    return w;
  }

  void prefetch(const std::vector<std::pair<double, double>>& pts) {
    std::vector<std::pair<double, double>> todo;
    for (const auto& q : pts) {
      if (!cache_.count(q)) todo.push_back(q);
    }
    std::sort(todo.begin(), todo.end());
    todo.erase(std::unique(todo.begin(), todo.end()), todo.end());
    const auto ws = parallel_map<cplx>(todo.size(), [&](std::size_t k) {
      return reduced_w(map(todo[k].first, todo[k].second), p_, opts_.tol);
    });
    evaluations_ += todo.size();
    for (std::size_t k = 0; k < todo.size(); ++k) cache_.emplace(todo[k], ws[k]);
  }

  cplx eval(cplx z) {
    ++evaluations_;
    return reduced_w(z, p_, opts_.tol);
  }

  // Samples a line with fixed coordinate and free coordinate in [a, b], seeded
  // with the given values, refined until the phase steps are small.
  Edge sample_line(bool horizontal, double fixed, double a, double b, std::vector<double> seeds,
                   std::size_t n0) {
    for (std::size_t k = 0; k <= n0; ++k) {
      seeds.push_back(k == n0 ? b : a + (b - a) * static_cast<double>(k) / static_cast<double>(n0));
    }
    std::sort(seeds.begin(), seeds.end());
    seeds.erase(std::unique(seeds.begin(), seeds.end()), seeds.end());
    Edge e;
    fill(e, horizontal, fixed, seeds);
    refine(e, horizontal, fixed);
    return e;
  }

  // Adds the point s to an edge and re-refines.
  void insert(Edge& e, bool horizontal, double fixed, double s) {
    fill(e, horizontal, fixed, {s});
    refine(e, horizontal, fixed);
  }

  void refine(Edge& e, bool horizontal, double fixed, double max_step = 0.0) {
    if (max_step <= 0.0) max_step = opts_.max_phase_step;
    const double span = std::max(1.0, std::abs(e.back().s - e.front().s));
    for (;;) {
      std::vector<double> mids;
      for (std::size_t k = 0; k + 1 < e.size(); ++k) {
        const cplx w0 = e[k].w, w1 = e[k + 1].w;
        const double m0 = std::abs(w0), m1 = std::abs(w1);
        const double floor = 1e-10 * scale_;
        if (std::min(m0, m1) < floor) {
          const double s = m0 < m1 ? e[k].s : e[k + 1].s;
          throw Error(ErrorCode::ZeroOnContour, "W vanishes on a cell edge near " +
                                                    fmt(horizontal ? map(s, fixed) : map(fixed, s)));
        }
        const double ratio = m1 / m0;
        if (std::abs(std::arg(w1 / w0)) > max_step || ratio > 4.0 || ratio < 0.25) {
          if (e[k + 1].s - e[k].s < 1e-11 * span) {
            throw Error(ErrorCode::ZeroOnContour,
                        "edge cannot be resolved near " +
                            fmt(horizontal ? map(e[k].s, fixed) : map(fixed, e[k].s)));
          }
          mids.push_back(0.5 * (e[k].s + e[k + 1].s));
        }
      }
      if (mids.empty()) return;
      fill(e, horizontal, fixed, mids);
    }
  }

  // Secant iteration from the cell centre; returns the root when it converges
  // inside the cell.
  std::optional<cplx> polish(const Cell& c) {
    const double um = 0.5 * (c.u0 + c.u1), vm = 0.5 * (c.v0 + c.v1);
    cplx z0 = map(um, vm);
    const double size = std::abs(map(c.u1, c.v1) - map(c.u0, c.v0));
    cplx z1 = z0 + cplx(1e-3, 0.7e-3) * size;
    cplx w0 = eval(z0), w1 = eval(z1);
    const double tol = opts_.root_tol * std::max(1.0, std::abs(z1));
    for (int it = 0; it < 60; ++it) {
      if (w1 == 0.0) break;
      const cplx dw = w1 - w0;
      if (dw == 0.0) return std::nullopt;
      const cplx step = w1 * (z1 - z0) / dw;
      if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) return std::nullopt;
      z0 = z1;
      w0 = w1;
      z1 -= step;
      if (std::abs(z1 - map(um, vm)) > 2.0 * size || z1.imag() <= 0.0 || std::abs(z1) < 0.5 * r_floor) {
        return std::nullopt;
      }
      w1 = eval(z1);
      if (std::abs(step) < tol) {
        const auto [u, v] = unmap(z1);
        const double eu = 1e-12 * (c.u1 - c.u0), ev = 1e-12 * (c.v1 - c.v0);
        if (u < c.u0 - eu || u > c.u1 + eu || v < c.v0 - ev || v > c.v1 + ev) return std::nullopt;
        return z1;
      }
    }
    return std::nullopt;
  }

 private:
  void fill(Edge& e, bool horizontal, double fixed, const std::vector<double>& ss) {
    std::vector<std::pair<double, double>> pts;
    for (double s : ss) pts.push_back(horizontal ? std::pair{s, fixed} : std::pair{fixed, s});
    prefetch(pts);
    for (double s : ss) {
      const bool present = std::any_of(e.begin(), e.end(), [&](const Sample& x) { return x.s == s; });
      if (!present) e.push_back({s, horizontal ? at(s, fixed) : at(fixed, s)});
    }
    std::sort(e.begin(), e.end(), [](const Sample& a, const Sample& b) { return a.s < b.s; });
  }

  const PotentialProfile& p_;
  bool log_polar_;
  SearchOptions opts_;
  std::map<std::pair<double, double>, cplx> cache_;
  std::size_t evaluations_ = 0;
  double scale_ = 0.0;
};

constexpr std::array<std::pair<double, double>, 6> split_fractions{{
    {0.5 + 0.0371, 0.5 - 0.0293},
    {0.5 - 0.0529, 0.5 + 0.0617},
    {0.5 + 0.0817, 0.5 + 0.0441},
    {0.5 - 0.1093, 0.5 - 0.0871},
    {0.5 + 0.1301, 0.5 - 0.1187},
    {0.5 - 0.1519, 0.5 + 0.1433},
}};

std::array<Cell, 4> split_cell(Searcher& s, Cell parent, double fu, double fv) {
  const double um = parent.u0 + fu * (parent.u1 - parent.u0);
  const double vm = parent.v0 + fv * (parent.v1 - parent.v0);
  s.insert(parent.bottom, true, parent.v0, um);
  s.insert(parent.top, true, parent.v1, um);
  s.insert(parent.left, false, parent.u0, vm);
  s.insert(parent.right, false, parent.u1, vm);
  const Edge horiz = s.sample_line(true, vm, parent.u0, parent.u1, {um}, 8);
  const Edge vert = s.sample_line(false, um, parent.v0, parent.v1, {vm}, 8);

  std::array<Cell, 4> kids;
  auto make = [&](double a0, double a1, double b0, double b1, Edge bo, Edge ri, Edge to, Edge le) {
    Cell c{a0, a1, b0, b1, parent.depth + 1, std::move(bo), std::move(ri), std::move(to), std::move(le), 0};
    c.winding = cell_winding(c);
    return c;
  };
  kids[0] = make(parent.u0, um, parent.v0, vm, slice(parent.bottom, parent.u0, um),
                 slice(vert, parent.v0, vm), slice(horiz, parent.u0, um),
                 slice(parent.left, parent.v0, vm));
  kids[1] = make(um, parent.u1, parent.v0, vm, slice(parent.bottom, um, parent.u1),
                 slice(parent.right, parent.v0, vm), slice(horiz, um, parent.u1),
                 slice(vert, parent.v0, vm));
  kids[2] = make(parent.u0, um, vm, parent.v1, slice(horiz, parent.u0, um),
                 slice(vert, vm, parent.v1), slice(parent.top, parent.u0, um),
                 slice(parent.left, vm, parent.v1));
  kids[3] = make(um, parent.u1, vm, parent.v1, slice(horiz, um, parent.u1),
                 slice(parent.right, vm, parent.v1), slice(parent.top, um, parent.u1),
                 slice(vert, vm, parent.v1));
  return kids;
}

std::string describe_cell(const Searcher& s, const Cell& c) {
  return "cell " + fmt(s.map(c.u0, c.v0)) + " .. " + fmt(s.map(c.u1, c.v1)) + " at depth " +
         std::to_string(c.depth) + " with winding " + std::to_string(c.winding);
}

struct RawSearch {
  std::vector<cplx> roots;
  int total_winding = 0;
  double scale = 0.0;
  std::size_t evaluations = 0;
  int max_depth = 0;
  std::size_t cells = 0;
  std::vector<std::string> anomalies;
};

RawSearch search_box(const PotentialProfile& p, bool log_polar, double u0, double u1, double v0,
                     double v1, const SearchOptions& opts) {
  Searcher s(p, log_polar, opts);
  RawSearch out;
  // Root boundary: scale first from a coarse pass, then refined.
  Cell root{u0, u1, v0, v1, 0, {}, {}, {}, {}, 0};
  {
    std::vector<std::pair<double, double>> pts;
    const int n = 32;
    for (int k = 0; k <= n; ++k) {
      const double fu = u0 + (u1 - u0) * k / n, fv = v0 + (v1 - v0) * k / n;
      pts.push_back({fu, v0});
      pts.push_back({fu, v1});
      pts.push_back({u0, fv});
      pts.push_back({u1, fv});
    }
    s.prefetch(pts);
    double m = 0.0;
    for (const auto& q : pts) m = std::max(m, std::abs(s.at(q.first, q.second)));
    s.set_scale(m);
  }
  root.bottom = s.sample_line(true, v0, u0, u1, {}, 32);
  root.right = s.sample_line(false, u1, v0, v1, {}, 32);
  root.top = s.sample_line(true, v1, u0, u1, {}, 32);
  root.left = s.sample_line(false, u0, v0, v1, {}, 32);
  double m = 0.0;
  for (const Edge* e : {&root.bottom, &root.right, &root.top, &root.left})
    for (const auto& x : *e) m = std::max(m, std::abs(x.w));
  s.set_scale(m);
  out.scale = m;
  root.winding = cell_winding(root);
  out.total_winding = root.winding;

  std::vector<Cell> stack{root};
  while (!stack.empty()) {
    Cell c = std::move(stack.back());
    stack.pop_back();
    ++out.cells;
    out.max_depth = std::max(out.max_depth, c.depth);
    if (c.winding == 0) continue;
    if (c.winding < 0) {
      out.anomalies.push_back("negative winding in " + describe_cell(s, c));
      continue;
    }
    if (c.winding == 1) {
      if (auto z = s.polish(c)) {
        const bool dup = std::any_of(out.roots.begin(), out.roots.end(),
                                     [&](cplx r) { return std::abs(r - *z) < 1e-8 * std::max(1.0, std::abs(r)); });
        if (dup) {
          out.anomalies.push_back("duplicate root " + fmt(*z) + " from " + describe_cell(s, c));
        } else {
          out.roots.push_back(*z);
        }
        continue;
      }
    }
    if (c.depth >= opts.max_depth) {
      throw Error(ErrorCode::SubdivisionLimit, "winding not isolated: " + describe_cell(s, c));
    }
    std::optional<std::array<Cell, 4>> kids;
    for (int attempt = 0; attempt < opts.max_retries && !kids; ++attempt) {
      const auto [fu, fv] = split_fractions[static_cast<std::size_t>(attempt + c.depth) % split_fractions.size()];
      try {
        kids = split_cell(s, c, fu, fv);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::ZeroOnContour || attempt + 1 >= opts.max_retries) throw;
      }
    }
    int sum = 0;
    for (const auto& k : *kids) sum += k.winding;
    if (sum != c.winding) {
      out.anomalies.push_back("winding additivity: children sum to " + std::to_string(sum) + " in " +
                              describe_cell(s, c));
    }
    for (auto it = kids->rbegin(); it != kids->rend(); ++it) stack.push_back(std::move(*it));
  }
  out.evaluations = s.evaluations();
  if (static_cast<int>(out.roots.size()) != out.total_winding) {
    out.anomalies.push_back("boundary winding " + std::to_string(out.total_winding) + " but " +
                            std::to_string(out.roots.size()) + " roots isolated");
  }
  return out;
}

bool same_point(cplx a, cplx b) { return std::abs(a - b) < 1e-7 * std::max(1.0, std::abs(a)); }

}  // namespace

SpectralPoint certify_point(cplx z, const PotentialProfile& p, double scale, const SearchOptions& opts) {
  SpectralPoint pt;
  pt.z = z;
  const SpectralParameter sp(z);
  pt.residual = std::abs(reduced_w(z, p, opts.tol));
  pt.relative_residual = scale > 0.0 ? pt.residual / scale : pt.residual;
  pt.on_circle = std::abs(std::abs(z) - 1.0) < 1e-6;
  const auto fd = wronskian_derivative_fd(sp, p, opts.tol);
  pt.wdot_check = fd.value;
  pt.wdot = fd.value;
  pt.wdot_method = DerivativeMethod::FiniteDifference;
  if (opts.signatures || pt.on_circle) {
    try {
      const BoundState bs(sp, p, opts.tol);
      if (pt.on_circle) {
        pt.wdot = bs.wronskian_derivative();
        pt.wdot_method = DerivativeMethod::ClosedForm;
      }
      if (opts.signatures) pt.signature = signature_report(bs);
    } catch (const Error&) {
      // Left without a signature; the verification reports it.
    }
  }
  pt.simple = std::abs(pt.wdot) > opts.simple_threshold * std::max(scale, 1e-300);
  return pt;
}

SearchResult locate_eigenvalues(const SearchRegion& region, const PotentialProfile& p,
                                const SearchOptions& opts) {
  region.validate();
  SearchResult res;
  const bool polar = region.kind == SearchRegion::Kind::AnnulusSector;
  // Orbit symmetry lets the search cover only Re z ≥ 0, |z| ≤ 1 (plus overlaps
  // so that circle and imaginary-axis eigenvalues stay off the boundary).
  const bool symmetric = opts.use_symmetry && polar &&
                         std::abs(std::log(region.r0 * region.r1)) < 1e-12 &&
                         std::abs(region.t0 + region.t1 - pi) < 1e-12;
  double u0, u1, v0, v1;
  if (polar) {
    u0 = std::log(region.r0);
    u1 = std::log(region.r1);
    v0 = region.t0;
    v1 = region.t1;
    if (symmetric) {
      u1 = std::min(u1, 0.0917);
      v1 = std::min(v1, 0.5 * pi + 0.0713);
    }
  } else {
    u0 = region.r0;
    u1 = region.r1;
    v0 = region.t0;
    v1 = region.t1;
  }

  RawSearch raw;
  for (int attempt = 0;; ++attempt) {
    // Outer boundary perturbations in case a zero sits on it.
    const double e = 1e-4 * attempt;
    try {
      if (polar) {
        raw = search_box(p, true, u0 + e, u1 - (symmetric ? -e : e), v0 + e,
                         v1 - (symmetric ? -e : e), opts);
      } else {
        const double du = (u1 - u0) * e, dv = (v1 - v0) * e;
        raw = search_box(p, false, u0 + du, u1 - du, v0 + dv, v1 - dv, opts);
      }
      break;
    } catch (const Error& err) {
      if (err.code() != ErrorCode::ZeroOnContour || attempt + 1 >= opts.max_retries) throw;
      res.anomalies.push_back(std::string("root contour retried: ") + err.what());
    }
  }
  res.total_winding = raw.total_winding;
  res.scale = raw.scale;
  res.threshold = opts.threshold * raw.scale;
  res.evaluations = raw.evaluations;
  res.max_depth_reached = raw.max_depth;
  res.cells = raw.cells;
  res.anomalies.insert(res.anomalies.end(), raw.anomalies.begin(), raw.anomalies.end());
  res.searched = symmetric ? "Re z >= 0, |z| <= 1 part of " + region.describe() + ", closed under the orbit"
                           : region.describe();

  std::vector<std::pair<cplx, bool>> found;  // root, from symmetry
  auto add = [&](cplx z, bool derived) {
    if (!region.contains(z)) return;
    for (const auto& f : found) {
      if (same_point(f.first, z)) return;
    }
    found.emplace_back(z, derived);
  };
  for (cplx z : raw.roots) add(z, false);
  if (symmetric) {
    for (cplx z : raw.roots) {
      for (cplx w : upper_half_orbit(z)) add(w, true);
    }
  }

  auto pts = parallel_map<SpectralPoint>(found.size(), [&](std::size_t k) {
    auto pt = certify_point(found[k].first, p, res.scale, opts);
    pt.from_symmetry = found[k].second;
    return pt;
  });
  for (auto& pt : pts) {
    const bool excluded = std::any_of(region.excluded.begin(), region.excluded.end(),
                                      [&](const Disk& d) { return d.contains(pt.z); });
    if (excluded) {
      res.anomalies.push_back("root " + fmt(pt.z) + " lies in an excluded disk");
      continue;
    }
    const double limit = (pt.from_symmetry ? 10.0 : 1.0) * opts.threshold;
    if (!(pt.relative_residual < limit)) {
      res.anomalies.push_back("root " + fmt(pt.z) + " fails acceptance, |W|/scale = " +
                              fmt(pt.relative_residual));
    }
    res.points.push_back(std::move(pt));
  }
  std::sort(res.points.begin(), res.points.end(), [](const SpectralPoint& a, const SpectralPoint& b) {
    if (a.z.real() != b.z.real()) return a.z.real() < b.z.real();
    return a.z.imag() < b.z.imag();
  });
  return res;
}

// ---------------------------------------------------------------- verification

bool VerificationReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const Check& c) { return !c.applicable || c.passed; });
}

bool is_odd_profile(const PotentialProfile& p, double tol) {
  const auto d = p.domain();
  if (std::abs(d.lo + d.hi) > 1e-9 * std::max(1.0, d.length())) return false;
  double amp = 0.0, worst = 0.0;
  for (double x : sample_grid(p, 2001)) {
    amp = std::max(amp, std::abs(p.u(x)));
    worst = std::max(worst, std::abs(p.u(x) + p.u(-x)));
  }
  return amp > 0.0 && worst <= tol * amp;
}

VerificationReport verify_spectrum(const SearchResult& result, const PotentialProfile& p,
                                   const VerifyOptions& opts) {
  return verify_spectrum(result, p, count_report(p, opts.scan), opts);
}

VerificationReport verify_spectrum(const SearchResult& result, const PotentialProfile& p,
                                   const CountReport& count, const VerifyOptions& opts) {
  VerificationReport rep;
  const auto& pts = result.points;
  const auto cls = count.applicability;
  const bool hyp = cls.tag != HypothesisTag::General;
  const bool odd_charge = count.charge % 2 != 0;
  auto add = [&](std::string name, bool applicable, bool passed, std::string detail) {
    rep.checks.push_back({std::move(name), applicable, applicable && passed, std::move(detail)});
  };

  // Counting.
  {
    int located = 0;
    for (const auto& pt : pts) {
      if (count.charge == 0 ? pt.z.real() > 0.0 : true) ++located;
    }
    if (count.charge != 0 && !odd_charge) {
      add("count", false, true, "no counting theorem for |Q| >= 2");
    } else if (count.exact_count) {
      add("count", true, located == *count.exact_count,
          std::to_string(located) + " located in the " + count.counting_region + ", theorem gives " +
              std::to_string(*count.exact_count));
    } else {
      int circle = 0;
      for (const auto& pt : pts) {
        if (pt.on_circle && (count.charge == 0 ? pt.z.real() > 0.0 : true)) ++circle;
      }
      add("count (lower bound only)", true, circle >= count.lower_bound_N,
          std::to_string(circle) + " circle eigenvalues located, at least " +
              std::to_string(count.lower_bound_N) + " required");
    }
  }

  // Residuals and simplicity.
  {
    double worst = 0.0;
    bool ok = true;
    for (const auto& pt : pts) {
      const double limit = (pt.from_symmetry ? 10.0 : 1.0) * opts.search.threshold;
      ok = ok && pt.relative_residual < limit;
      worst = std::max(worst, pt.relative_residual);
    }
    add("residuals", !pts.empty(), ok, "max |W|/scale = " + fmt(worst));
    bool simple = std::all_of(pts.begin(), pts.end(), [](const SpectralPoint& s) { return s.simple; });
    double smallest = std::numeric_limits<double>::infinity();
    for (const auto& pt : pts) smallest = std::min(smallest, std::abs(pt.wdot));
    add("simplicity", !pts.empty(), simple, "min |dW/dz| = " + fmt(smallest));
  }

  // Circle confinement and agreement with the Prüfer scan.
  {
    const bool all_on = std::all_of(pts.begin(), pts.end(), [](const SpectralPoint& s) { return s.on_circle; });
    add("on-circle confinement", hyp, all_on, hyp ? cls.is_kink() ? "monotone kink" : "single-hump breather" : "");

    std::vector<double> located;
    for (const auto& pt : pts) {
      if (!pt.on_circle) continue;
      const double t = std::arg(pt.z);
      if (odd_charge) located.push_back(t);
      else if (t < 0.5 * pi) located.push_back(t);
    }
    std::sort(located.begin(), located.end());
    const auto& scan = count.circle_angles;
    bool match = located.size() == scan.size();
    double worst = 0.0;
    for (std::size_t k = 0; match && k < scan.size(); ++k) {
      worst = std::max(worst, std::abs(located[k] - scan[k]));
    }
    match = match && worst < 1e-7;
    add("circle scan agreement", count.charge == 0 || odd_charge, match,
        std::to_string(located.size()) + " located vs " + std::to_string(scan.size()) +
            " scanned angles, max difference " + fmt(worst));
  }

  // Sector and exclusion regions.
  if (cls.is_breather()) {
    bool in_sector = true;
    double worst = 0.0;
    for (const auto& pt : pts) {
      const double t = folded_angle(pt.z);
      worst = std::max(worst, t);
      in_sector = in_sector && t < 0.5 * cls.u0;
    }
    add("sector membership", true, in_sector, "max folded arg = " + fmt(worst) + ", u0/2 = " + fmt(0.5 * cls.u0));

    const auto ex = exclusion_regions(p);
    bool clear = true;
    std::string hit;
    for (const auto& r : ex.regions) {
      for (const auto& pt : pts) {
        if (r.contains(pt.z)) {
          clear = false;
          hit += r.name + " contains " + fmt(pt.z) + "; ";
        }
      }
    }
    add("exclusion-region avoidance", true, clear,
        clear ? "disk diameter " + fmt(ex.bounds.diameter) + ", corollary radius " + fmt(ex.bounds.corollary_radius)
              : hit);
    if (opts.exclusion_windings) {
      WindingOptions wo;
      wo.tol = opts.search.tol;
      for (const auto& r : ex.regions) {
        if (!r.has_contour()) continue;
        try {
          const auto w = exclusion_winding(r, p, wo);
          add("winding on " + r.name, true, w.winding == 0, "winding " + std::to_string(w.winding));
        } catch (const Error& e) {
          add("winding on " + r.name, true, false, e.what());
        }
      }
    }
  } else {
    add("sector membership", false, true, "");
    add("exclusion-region avoidance", false, true, "");
  }

  // Orbit closure: each orbit image in the region is present and vanishes.
  {
    bool closed = true;
    double worst = 0.0;
    std::string missing;
    for (const auto& pt : pts) {
      for (cplx w : upper_half_orbit(pt.z)) {
        if (!opts.region.contains(w)) continue;
        const bool present = std::any_of(pts.begin(), pts.end(), [&](const SpectralPoint& q) { return same_point(q.z, w); });
        const double r = std::abs(reduced_w(w, p, opts.search.tol)) / std::max(result.scale, 1e-300);
        worst = std::max(worst, r);
        if (!present || !(r < 10.0 * opts.search.threshold)) {
          closed = false;
          missing += fmt(w) + " ";
        }
      }
    }
    add("symmetry-orbit closure", !pts.empty(), closed,
        closed ? "max orbit |W|/scale = " + fmt(worst) : "missing or nonzero: " + missing);
  }

  // Zero momentum and Krein positivity at circle eigenvalues.
  {
    const bool zm_applies = cls.is_kink() || (cls.is_breather() && cls.u0 <= 0.5 * pi + 1e-12);
    double worst_zm = 0.0, min_bracket = std::numeric_limits<double>::infinity();
    bool zm_ok = true, krein_ok = true;
    std::size_t circle = 0;
    for (const auto& pt : pts) {
      if (!pt.on_circle) continue;
      ++circle;
      try {
        const BoundState bs(SpectralParameter(pt.z), p, opts.search.tol);
        if (zm_applies) {
          const double r = zero_momentum_residual(bs);
          worst_zm = std::max(worst_zm, r);
          zm_ok = zm_ok && r < 1e-7;
        }
        const auto sig = pt.signature ? *pt.signature : signature_report(bs);
        min_bracket = std::min(min_bracket, sig.circle_bracket);
        krein_ok = krein_ok && sig.circle_bracket > 1e-8;
      } catch (const Error& e) {
        zm_ok = krein_ok = false;
      }
    }
    add("zero momentum", zm_applies && circle > 0, zm_ok, "max residual " + fmt(worst_zm));
    add("Krein positivity", hyp && circle > 0, krein_ok, "min bracket " + fmt(min_bracket));
  }

  if (cls.is_kink()) {
    const bool has_i = std::any_of(pts.begin(), pts.end(), [](const SpectralPoint& s) {
      return std::abs(s.z - cplx(0.0, 1.0)) < 1e-6;
    });
    add("z = i present", true, has_i, has_i ? "found" : "missing");
  }

  if (count.charge == 0 && is_odd_profile(p)) {
    const bool none = count.circle_angles.empty() &&
                      std::none_of(pts.begin(), pts.end(), [](const SpectralPoint& s) { return s.on_circle; });
    add("no circle eigenvalues (odd profile)", true, none,
        std::to_string(count.circle_angles.size()) + " scanned angles");
  }
  return rep;
}

}  // namespace sgspec
