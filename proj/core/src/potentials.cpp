#include "sgspec/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <sstream>

#include "sgspec/error.hpp"
#include "sgspec/quadrature.hpp"

namespace sgspec {

namespace {

constexpr double pi = std::numbers::pi;

double sech(double x) {
  const double ax = std::abs(x);
  if (ax > 700.0) return 0.0;
  const double e = std::exp(-ax);
  return 2.0 * e / (1.0 + e * e);
}

// sin/cos of an angle π/2·(1 + t) with t = tanh(y), without cancellation at |t| → 1.
HalfAngle half_angle_of_tanh_ramp(double y) {
  if (y <= 0.0) {
    const double onept = 2.0 / (1.0 + std::exp(-2.0 * y));  // 1 + tanh(y)
    const double ang = 0.5 * pi * onept;
    return {std::cos(ang), std::sin(ang)};
  }
  const double onemt = 2.0 / (1.0 + std::exp(2.0 * y));  // 1 − tanh(y)
  const double eps = 0.5 * pi * onemt;
  return {-std::cos(eps), std::sin(eps)};
}

class ZeroShape final : public ProfileShape {
 public:
  double u(double) const override { return 0.0; }
  double u_x(double) const override { return 0.0; }
  HalfAngle half_angle(double) const override { return {1.0, 0.0}; }
};

// u = π − 2 gd(x): sin(u/2) = sech x, cos(u/2) = tanh x.
class BuckinghamMillerShape final : public ProfileShape {
 public:
  double u(double x) const override { return pi - 4.0 * std::atan(std::tanh(0.5 * x)); }
  double u_x(double x) const override { return -2.0 * sech(x); }
  HalfAngle half_angle(double x) const override { return {std::tanh(x), sech(x)}; }
};

class AtanExpKink final : public ProfileShape {
 public:
  explicit AtanExpKink(double scale) : scale_(scale) {}
  double u(double x) const override { return 4.0 * std::atan(std::exp(x / scale_)); }
  double u_x(double x) const override { return 2.0 / scale_ * sech(x / scale_); }
  HalfAngle half_angle(double x) const override {
    return {-std::tanh(x / scale_), sech(x / scale_)};
  }

 private:
  double scale_;
};

class TanhRampKink final : public ProfileShape {
 public:
  explicit TanhRampKink(double scale) : scale_(scale) {}
  double u(double x) const override { return pi * (1.0 + std::tanh(x / scale_)); }
  double u_x(double x) const override {
    const double s = sech(x / scale_);
    return pi / scale_ * s * s;
  }
  HalfAngle half_angle(double x) const override { return half_angle_of_tanh_ramp(x / scale_); }

 private:
  double scale_;
};

class SechHump final : public ProfileShape {
 public:
  SechHump(double peak, double width) : peak_(peak), width_(width) {}
  double u(double x) const override { return peak_ * sech(x / width_); }
  double u_x(double x) const override {
    const double y = x / width_;
    return -peak_ / width_ * sech(y) * std::tanh(y);
  }

 private:
  double peak_;
  double width_;
};

class CompactBump final : public ProfileShape {
 public:
  CompactBump(double peak, double d) : peak_(peak), d_(d) {}
  double u(double x) const override {
    if (std::abs(x) >= d_) return 0.0;
    const double c = std::cos(0.5 * pi * x / d_);
    return peak_ * c * c;
  }
  double u_x(double x) const override {
    if (std::abs(x) >= d_) return 0.0;
    return -peak_ * 0.5 * pi / d_ * std::sin(pi * x / d_);
  }

 private:
  double peak_;
  double d_;
};

// Plateau on |x| ≤ h − r, smoothstep ramps down to zero at |x| = h.
class SmoothedBox final : public ProfileShape {
 public:
  SmoothedBox(double height, double h, double r) : height_(height), h_(h), r_(r) {}
  double u(double x) const override {
    const double ax = std::abs(x);
    if (ax >= h_) return 0.0;
    if (ax <= h_ - r_) return height_;
    const double t = (h_ - ax) / r_;
    return height_ * t * t * (3.0 - 2.0 * t);
  }
  double u_x(double x) const override {
    const double ax = std::abs(x);
    if (ax >= h_ || ax <= h_ - r_) return 0.0;
    const double t = (h_ - ax) / r_;
    const double dudt = height_ * 6.0 * t * (1.0 - t);
    return x > 0 ? -dudt / r_ : dudt / r_;
  }

 private:
  double height_;
  double h_;
  double r_;
};

class OddSech final : public ProfileShape {
 public:
  explicit OddSech(double a) : a_(a) {}
  double u(double x) const override { return a_ * std::tanh(x) * sech(x); }
  double u_x(double x) const override {
    const double s = sech(x);
    const double t = std::tanh(x);
    return a_ * s * (s * s - t * t);
  }

 private:
  double a_;
};

class PiecewiseConstant final : public ProfileShape {
 public:
  PiecewiseConstant(std::vector<double> breaks, std::vector<double> values)
      : breaks_(std::move(breaks)), values_(std::move(values)) {}
  double u(double x) const override {
    auto it = std::upper_bound(breaks_.begin(), breaks_.end(), x);
    if (it == breaks_.begin()) return values_.front();
    auto k = static_cast<std::size_t>(it - breaks_.begin()) - 1;
    return values_[std::min(k, values_.size() - 1)];
  }
  double u_x(double) const override { return 0.0; }

 private:
  std::vector<double> breaks_;
  std::vector<double> values_;
};

class MonotoneCubic final : public ProfileShape {
 public:
  MonotoneCubic(std::vector<double> xs, std::vector<double> us)
      : xs_(std::move(xs)), us_(std::move(us)), d_(xs_.size(), 0.0) {
    const std::size_t n = xs_.size();
    std::vector<double> h(n - 1), delta(n - 1);
    for (std::size_t k = 0; k + 1 < n; ++k) {
      h[k] = xs_[k + 1] - xs_[k];
      delta[k] = (us_[k + 1] - us_[k]) / h[k];
    }
    // End slopes stay zero so the constant extension is C¹.
    for (std::size_t k = 1; k + 1 < n; ++k) {
      if (delta[k - 1] * delta[k] <= 0.0) continue;
      const double w1 = 2.0 * h[k] + h[k - 1];
      const double w2 = h[k] + 2.0 * h[k - 1];
      d_[k] = (w1 + w2) / (w1 / delta[k - 1] + w2 / delta[k]);
    }
  }

  double u(double x) const override {
    if (x <= xs_.front()) return us_.front();
    if (x >= xs_.back()) return us_.back();
    auto [k, t, h] = locate(x);
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * us_[k] + (t3 - 2 * t2 + t) * h * d_[k] +
           (-2 * t3 + 3 * t2) * us_[k + 1] + (t3 - t2) * h * d_[k + 1];
  }

  double u_x(double x) const override {
    if (x <= xs_.front() || x >= xs_.back()) return 0.0;
    auto [k, t, h] = locate(x);
    const double t2 = t * t;
    return ((6 * t2 - 6 * t) * us_[k] + (-6 * t2 + 6 * t) * us_[k + 1]) / h +
           (3 * t2 - 4 * t + 1) * d_[k] + (3 * t2 - 2 * t) * d_[k + 1];
  }

 private:
  struct Loc {
    std::size_t k;
    double t;
    double h;
  };
  Loc locate(double x) const {
    auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
    std::size_t k = static_cast<std::size_t>(it - xs_.begin()) - 1;
    k = std::min(k, xs_.size() - 2);
    const double h = xs_[k + 1] - xs_[k];
    return {k, (x - xs_[k]) / h, h};
  }

  std::vector<double> xs_;
  std::vector<double> us_;
  std::vector<double> d_;
};

class ReflectedShape final : public ProfileShape {
 public:
  explicit ReflectedShape(std::shared_ptr<const ProfileShape> inner) : inner_(std::move(inner)) {}
  double u(double x) const override { return inner_->u(-x); }
  double u_x(double x) const override { return -inner_->u_x(-x); }
  HalfAngle half_angle(double x) const override { return inner_->half_angle(-x); }

 private:
  std::shared_ptr<const ProfileShape> inner_;
};

class TranslatedShape final : public ProfileShape {
 public:
  TranslatedShape(std::shared_ptr<const ProfileShape> inner, double a)
      : inner_(std::move(inner)), a_(a) {}
  double u(double x) const override { return inner_->u(x - a_); }
  double u_x(double x) const override { return inner_->u_x(x - a_); }
  HalfAngle half_angle(double x) const override { return inner_->half_angle(x - a_); }

 private:
  std::shared_ptr<const ProfileShape> inner_;
  double a_;
};

class ShiftedShape final : public ProfileShape {
 public:
  ShiftedShape(std::shared_ptr<const ProfileShape> inner, int periods)
      : inner_(std::move(inner)), periods_(periods) {}
  double u(double x) const override { return inner_->u(x) - 2.0 * pi * periods_; }
  double u_x(double x) const override { return inner_->u_x(x); }
  HalfAngle half_angle(double x) const override {
    auto h = inner_->half_angle(x);
    if (periods_ % 2 != 0) return {-h.c, -h.s};
    return h;
  }

 private:
  std::shared_ptr<const ProfileShape> inner_;
  int periods_;
};

double tail_value(const ProfileShape& shape, double x) {
  const auto h = shape.half_angle(x);
  return std::max(std::abs(h.s), 1.0 - std::abs(h.c));
}

// True when x can serve as a truncation end: the endpoint value is below the
// threshold and the exponential-rate estimate of the remaining tail integral is too.
bool tail_ok(const ProfileShape& shape, double x, double dir, double thr) {
  if (!(tail_value(shape, x) < thr)) return false;
  const double v1 = std::abs(shape.half_angle(x).s);
  if (v1 == 0.0) return true;
  constexpr double probe = 1.0;
  const double v2 = std::abs(shape.half_angle(x + dir * probe).s);
  if (!(v2 < v1)) return false;
  const double rate = std::log(v1 / std::max(v2, std::numeric_limits<double>::min())) / probe;
  return v1 / rate < thr;
}

double find_end(const ProfileShape& shape, double x0, double dir, const ProfileOptions& opt) {
  double good_step = 1.0;
  double bad_step = 0.0;
  while (!(tail_ok(shape, x0 + dir * good_step, dir, opt.tail_threshold) &&
           tail_ok(shape, x0 + dir * 2.0 * good_step, dir, opt.tail_threshold))) {
    bad_step = good_step;
    good_step *= 2.0;
    if (good_step > opt.max_extent) {
      throw Error(ErrorCode::TailNotIntegrable,
                  "tail of sin(u/2) does not decay below threshold within |x| <= " +
                      std::to_string(opt.max_extent));
    }
  }
  for (int it = 0; it < 60 && good_step - bad_step > 1e-3; ++it) {
    const double mid = 0.5 * (good_step + bad_step);
    if (tail_ok(shape, x0 + dir * mid, dir, opt.tail_threshold)) {
      good_step = mid;
    } else {
      bad_step = mid;
    }
  }
  return x0 + dir * good_step;
}

}  // namespace

HalfAngle ProfileShape::half_angle(double x) const {
  const double v = 0.5 * u(x);
  return {std::cos(v), std::sin(v)};
}

std::string to_string(HypothesisTag tag) {
  switch (tag) {
    case HypothesisTag::KinkMonotoneQ1: return "KinkMonotoneQ1";
    case HypothesisTag::KinkMonotoneQminus1: return "KinkMonotoneQminus1";
    case HypothesisTag::KlausShawBreather: return "KlausShawBreather";
    case HypothesisTag::General: return "General";
  }
  return "General";
}

PotentialProfile::PotentialProfile(std::shared_ptr<const ProfileShape> shape,
                                   ProfileDescriptor descriptor, ProfileKind kind,
                                   std::optional<Interval> support_hint,
                                   std::vector<double> breakpoints,
                                   std::optional<Interval> domain,
                                   const ProfileOptions& options)
    : shape_(std::move(shape)),
      descriptor_(std::move(descriptor)),
      kind_(kind),
      support_(support_hint),
      breakpoints_(std::move(breakpoints)) {
  std::sort(breakpoints_.begin(), breakpoints_.end());
  if (domain) {
    domain_ = *domain;
  } else if (support_) {
    domain_ = *support_;
  } else {
    double x0 = 0.0;
    if (!breakpoints_.empty()) x0 = 0.5 * (breakpoints_.front() + breakpoints_.back());
    domain_ = {find_end(*shape_, x0, -1.0, options), find_end(*shape_, x0, 1.0, options)};
  }
  if (!(domain_.hi > domain_.lo)) {
    throw Error(ErrorCode::InvalidArgument, "profile domain is empty");
  }

  k_minus_ = static_cast<int>(std::lround(shape_->u(domain_.lo) / (2.0 * pi)));
  k_plus_ = static_cast<int>(std::lround(shape_->u(domain_.hi) / (2.0 * pi)));

  // Matching point: extremum of the hump for Q = 0, mid-level crossing for kinks.
  const std::size_t n = 4001;
  const double dx = domain_.length() / static_cast<double>(n - 1);
  if (charge() == 0) {
    const double base = 2.0 * pi * k_minus_;
    double best = -1.0;
    x_match_ = std::clamp(0.0, domain_.lo, domain_.hi);
    for (std::size_t i = 0; i < n; ++i) {
      const double x = domain_.lo + dx * static_cast<double>(i);
      const double v = std::abs(shape_->u(x) - base);
      if (v > best * (1.0 + 1e-12) + 1e-300) {
        best = v;
        x_match_ = x;
      }
    }
    if (best <= 0.0) x_match_ = std::clamp(0.0, domain_.lo, domain_.hi);
  } else {
    const double level = pi * (k_minus_ + k_plus_);
    auto g = [&](double x) { return shape_->u(x) - level; };
    double a = domain_.lo, ga = g(a);
    x_match_ = 0.5 * (domain_.lo + domain_.hi);
    for (std::size_t i = 1; i < n; ++i) {
      double b = domain_.lo + dx * static_cast<double>(i);
      const double gb = g(b);
      if ((ga <= 0.0) != (gb <= 0.0)) {
        for (int it = 0; it < 80; ++it) {
          const double m = 0.5 * (a + b);
          if ((g(m) <= 0.0) == (ga <= 0.0)) a = m; else b = m;
        }
        x_match_ = 0.5 * (a + b);
        break;
      }
      a = b;
      ga = gb;
    }
  }

  auto cosine = [this](double x) { return shape_->half_angle(x).c; };
  omega_lo_ = integrate_adaptive(cosine, 0.0, domain_.lo, breakpoints_, 1e-12).value;
  omega_hi_ = integrate_adaptive(cosine, 0.0, domain_.hi, breakpoints_, 1e-12).value;
  const double cm = (k_minus_ % 2 == 0) ? 1.0 : -1.0;
  const double cp = (k_plus_ % 2 == 0) ? 1.0 : -1.0;
  // 1 − c± c evaluated through sin² to keep relative accuracy in the tails.
  auto defect = [this](double x, double sign) {
    const auto h = shape_->half_angle(x);
    const double cc = sign * h.c;
    return cc > 0.0 ? h.s * h.s / (1.0 + cc) : 1.0 - cc;
  };
  phase_k_ = integrate_adaptive([&](double x) { return defect(x, cm); }, domain_.lo, 0.0,
                                breakpoints_, 1e-12).value +
             integrate_adaptive([&](double x) { return defect(x, cp); }, 0.0, domain_.hi,
                                breakpoints_, 1e-12).value;
}

PotentialProfile PotentialProfile::reflected() const {
  auto d = descriptor_;
  d.params.emplace_back("reflect", 1.0);
  std::vector<double> bp;
  for (auto it = breakpoints_.rbegin(); it != breakpoints_.rend(); ++it) bp.push_back(-*it);
  std::optional<Interval> sup;
  if (support_) sup = Interval{-support_->hi, -support_->lo};
  return PotentialProfile(std::make_shared<ReflectedShape>(shape_), std::move(d), kind_, sup,
                          std::move(bp), Interval{-domain_.hi, -domain_.lo});
}

PotentialProfile PotentialProfile::translated(double a) const {
  auto d = descriptor_;
  d.params.emplace_back("translate", a);
  std::vector<double> bp = breakpoints_;
  for (double& x : bp) x += a;
  std::optional<Interval> sup;
  if (support_) sup = Interval{support_->lo + a, support_->hi + a};
  return PotentialProfile(std::make_shared<TranslatedShape>(shape_, a), std::move(d), kind_, sup,
                          std::move(bp), Interval{domain_.lo + a, domain_.hi + a});
}

PotentialProfile PotentialProfile::shifted(int periods) const {
  if (periods == 0) return *this;
  auto d = descriptor_;
  d.params.emplace_back("periods", periods);
  return PotentialProfile(std::make_shared<ShiftedShape>(shape_, periods), std::move(d), kind_,
                          support_, breakpoints_, domain_);
}

PotentialProfile make_zero_potential() {
  return PotentialProfile(std::make_shared<ZeroShape>(), {"zero", {}},
                          ProfileKind::AnalyticClosedForm, Interval{-1.0, 1.0});
}

PotentialProfile make_buckingham_miller() {
  return PotentialProfile(std::make_shared<BuckinghamMillerShape>(), {"buckingham_miller", {}},
                          ProfileKind::AnalyticClosedForm);
}

PotentialProfile make_monotone_kink(KinkShape shape, double scale) {
  if (!(scale > 0.0)) throw Error(ErrorCode::InvalidArgument, "kink scale must be positive");
  if (shape == KinkShape::AtanExp) {
    return PotentialProfile(std::make_shared<AtanExpKink>(scale),
                            {"monotone_kink", {{"shape", 0.0}, {"scale", scale}}},
                            ProfileKind::AnalyticClosedForm);
  }
  return PotentialProfile(std::make_shared<TanhRampKink>(scale),
                          {"monotone_kink", {{"shape", 1.0}, {"scale", scale}}},
                          ProfileKind::AnalyticClosedForm);
}

PotentialProfile make_klaus_shaw_breather(double peak, double width) {
  if (!(peak > 0.0 && peak < pi)) {
    throw Error(ErrorCode::InvalidArgument, "breather peak must lie in (0, pi)");
  }
  if (!(width > 0.0)) throw Error(ErrorCode::InvalidArgument, "breather width must be positive");
  return PotentialProfile(std::make_shared<SechHump>(peak, width),
                          {"sech_breather", {{"peak", peak}, {"width", width}}},
                          ProfileKind::AnalyticClosedForm);
}

PotentialProfile make_breather_with_l1(double peak, double target) {
  if (!(target > 0.0)) throw Error(ErrorCode::InvalidArgument, "target l1 must be positive");
  // ∫sin(peak·sech(x/w)/2) dx scales linearly with w.
  auto unit = make_klaus_shaw_breather(peak, 1.0);
  const double width = target / l1_sine_half(unit, 1e-13).signed_value;
  return make_klaus_shaw_breather(peak, width);
}

PotentialProfile make_compact_bump(double peak, double half_width) {
  if (!(half_width > 0.0)) throw Error(ErrorCode::InvalidArgument, "bump half width must be positive");
  return PotentialProfile(std::make_shared<CompactBump>(peak, half_width),
                          {"compact_bump", {{"peak", peak}, {"half_width", half_width}}},
                          ProfileKind::AnalyticClosedForm, Interval{-half_width, half_width});
}

PotentialProfile make_smoothed_box(double height, double half_width, double ramp) {
  if (!(half_width > 0.0 && ramp > 0.0 && ramp <= half_width)) {
    throw Error(ErrorCode::InvalidArgument, "smoothed box needs 0 < ramp <= half_width");
  }
  const double p = half_width - ramp;
  return PotentialProfile(
      std::make_shared<SmoothedBox>(height, half_width, ramp),
      {"smoothed_box", {{"height", height}, {"half_width", half_width}, {"ramp", ramp}}},
      ProfileKind::AnalyticClosedForm, Interval{-half_width, half_width}, {-p, p});
}

PotentialProfile make_odd_sech(double amplitude) {
  return PotentialProfile(std::make_shared<OddSech>(amplitude),
                          {"odd_sech", {{"amplitude", amplitude}}},
                          ProfileKind::AnalyticClosedForm);
}

PotentialProfile make_piecewise_constant(std::vector<double> breaks, std::vector<double> values) {
  if (breaks.size() < 2 || values.size() + 1 != breaks.size()) {
    throw Error(ErrorCode::InvalidArgument, "piecewise constant profile needs n+1 breaks for n values");
  }
  if (!std::is_sorted(breaks.begin(), breaks.end()) ||
      std::adjacent_find(breaks.begin(), breaks.end()) != breaks.end()) {
    throw Error(ErrorCode::InvalidArgument, "breaks must be strictly increasing");
  }
  ProfileDescriptor d{"piecewise_constant", {}};
  for (std::size_t i = 0; i < values.size(); ++i) {
    d.params.emplace_back("break" + std::to_string(i), breaks[i]);
    d.params.emplace_back("value" + std::to_string(i), values[i]);
  }
  d.params.emplace_back("break" + std::to_string(values.size()), breaks.back());
  const Interval dom{breaks.front(), breaks.back()};
  auto bp = breaks;
  return PotentialProfile(std::make_shared<PiecewiseConstant>(std::move(breaks), std::move(values)),
                          std::move(d), ProfileKind::AnalyticClosedForm, std::nullopt,
                          std::move(bp), dom);
}

PotentialProfile make_tabulated(std::vector<double> xs, std::vector<double> us, std::string source) {
  if (xs.size() < 3 || xs.size() != us.size()) {
    throw Error(ErrorCode::InvalidArgument, "tabulated profile needs at least 3 (x, u) samples");
  }
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    if (!(xs[i + 1] > xs[i])) {
      throw Error(ErrorCode::InvalidArgument, "tabulated x values must be strictly increasing");
    }
  }
  const Interval dom{xs.front(), xs.back()};
  // Knots carry jumps in u'' that adaptive rules would otherwise hunt for.
  std::vector<double> knots = xs;
  auto shape = std::make_shared<MonotoneCubic>(std::move(xs), std::move(us));
  const ProfileOptions opt;
  for (double x : {dom.lo, dom.hi}) {
    if (!(tail_value(*shape, x) < opt.tabulated_end_tolerance)) {
      throw Error(ErrorCode::TailNotIntegrable,
                  "tabulated profile does not reach a multiple of 2pi at its ends");
    }
  }
  return PotentialProfile(shape, {"tabulated:" + source, {}}, ProfileKind::Tabulated,
                          std::nullopt, std::move(knots), dom);
}

PotentialProfile load_tabulated(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open tabulated profile " + path);
  std::vector<double> xs, us;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    double x, u;
    if (!(ss >> x)) continue;
    if (!(ss >> u)) {
      throw Error(ErrorCode::IoError, path + ":" + std::to_string(lineno) + ": expected two columns");
    }
    xs.push_back(x);
    us.push_back(u);
  }
  return make_tabulated(std::move(xs), std::move(us), path);
}

void write_tabulated(const PotentialProfile& p, const std::string& path, std::size_t samples) {
  if (samples < 3) throw Error(ErrorCode::InvalidArgument, "need at least 3 samples");
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
  out << "# x u\n" << std::setprecision(17);
  for (double x : sample_grid(p, samples)) out << x << ' ' << p.u(x) << '\n';
}

std::vector<double> sample_grid(const PotentialProfile& p, std::size_t n) {
  const auto d = p.domain();
  std::vector<double> xs(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = d.lo + d.length() * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  xs.back() = d.hi;
  return xs;
}

L1Result l1_sine_half(const PotentialProfile& p, double abs_tol) {
  const auto d = p.domain();
  auto s = [&p](double x) { return p.half_angle(x).s; };
  auto sv = integrate_adaptive(s, d.lo, d.hi, p.breakpoints(), abs_tol);
  auto av = integrate_adaptive([&](double x) { return std::abs(s(x)); }, d.lo, d.hi,
                               p.breakpoints(), abs_tol);
  // Tails beyond the truncation were certified below the profile threshold.
  const double tail = p.support_hint() ? 0.0 : 2e-12;
  const double err = std::max(sv.error, av.error) + tail;
  if (err > std::max(abs_tol, 1e-9)) {
    throw Error(ErrorCode::TailNotIntegrable,
                "l1 quadrature error " + std::to_string(err) + " above tolerance");
  }
  return {sv.value, av.value, err};
}

double charge_integral(const PotentialProfile& p) {
  const auto d = p.domain();
  auto r = integrate_adaptive([&p](double x) { return p.u_x(x); }, d.lo, d.hi, p.breakpoints(),
                              1e-12);
  return r.value / (2.0 * pi);
}

DerivativeNorms derivative_norms(const PotentialProfile& p) {
  const auto d = p.domain();
  DerivativeNorms n{};
  n.ux_l1 = integrate_adaptive([&p](double x) { return std::abs(p.u_x(x)); }, d.lo, d.hi,
                               p.breakpoints(), 1e-12).value;
  for (double x : sample_grid(p, 20001)) n.ux_sup = std::max(n.ux_sup, std::abs(p.u_x(x)));
  n.sine_half_l1 = l1_sine_half(p).abs_value;
  return n;
}

HypothesisClass classify(const PotentialProfile& p) {
  const auto xs = sample_grid(p, 20001);
  std::vector<double> ux(xs.size());
  double sup = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    ux[i] = p.u_x(xs[i]);
    sup = std::max(sup, std::abs(ux[i]));
  }
  if (sup == 0.0) return {};
  const double tol = 1e-10 * sup;
  const int q = p.charge();

  if (q == 1 || q == -1) {
    const bool monotone = std::all_of(ux.begin(), ux.end(),
                                      [&](double v) { return q * v >= -tol; });
    if (!monotone) return {};
    return {q == 1 ? HypothesisTag::KinkMonotoneQ1 : HypothesisTag::KinkMonotoneQminus1, 0.0};
  }
  if (q != 0) return {};

  const double base = 2.0 * pi * p.k_minus();
  double vmax = 0.0, vmin = 0.0;
  for (double x : xs) {
    const double v = p.u(x) - base;
    vmax = std::max(vmax, v);
    vmin = std::min(vmin, v);
  }
  const double vtol = 1e-12 * std::max(vmax, -vmin);
  int sign = 0;
  if (vmin >= -vtol) sign = 1;
  else if (vmax <= vtol) sign = -1;
  if (sign == 0) return {};

  // The hump must rise then fall (fixed-sign u, one sign change of u_x).
  int changes = 0;
  int last = 0;
  int first = 0;
  for (double v : ux) {
    if (std::abs(v) <= tol) continue;
    const int sg = v > 0 ? 1 : -1;
    if (first == 0) first = sg;
    if (last != 0 && sg != last) ++changes;
    last = sg;
  }
  if (changes != 1 || first != sign) return {};
  const double u0 = sign > 0 ? vmax : -vmin;
  if (!(u0 > 0.0 && u0 < pi)) return {};
  return {HypothesisTag::KlausShawBreather, u0};
}

}  // namespace sgspec
