#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace sgspec {

struct HalfAngle {
  double c;  // cos(u/2)
  double s;  // sin(u/2)
};

struct Interval {
  double lo;
  double hi;
  double length() const { return hi - lo; }
  bool contains(double x) const { return lo <= x && x <= hi; }
};

enum class ProfileKind { AnalyticClosedForm, Tabulated };

enum class KinkShape { AtanExp, TanhRamp };

// A concrete u(x). Subclasses override half_angle when a closed form avoids
// the cancellation in sin(u/2) near multiples of 2π.
class ProfileShape {
 public:
  virtual ~ProfileShape() = default;
  virtual double u(double x) const = 0;
  virtual double u_x(double x) const = 0;
  virtual HalfAngle half_angle(double x) const;
};

struct ProfileDescriptor {
  std::string family;
  std::vector<std::pair<std::string, double>> params;
};

struct ProfileOptions {
  double tail_threshold = 1e-12;
  double max_extent = 2.0e4;
  double tabulated_end_tolerance = 1e-8;  // sampled data rarely lands on the threshold exactly
};

class PotentialProfile {
 public:
  // Explicit domain skips tail detection (used for compact and piecewise data).
  PotentialProfile(std::shared_ptr<const ProfileShape> shape, ProfileDescriptor descriptor,
                   ProfileKind kind, std::optional<Interval> support_hint = std::nullopt,
                   std::vector<double> breakpoints = {},
                   std::optional<Interval> domain = std::nullopt,
                   const ProfileOptions& options = {});

  double u(double x) const { return shape_->u(x); }
  double u_x(double x) const { return shape_->u_x(x); }
  HalfAngle half_angle(double x) const { return shape_->half_angle(x); }

  int k_minus() const { return k_minus_; }
  int k_plus() const { return k_plus_; }
  int charge() const { return k_plus_ - k_minus_; }
  ProfileKind kind() const { return kind_; }
  const std::optional<Interval>& support_hint() const { return support_; }
  const ProfileDescriptor& descriptor() const { return descriptor_; }

  // Truncated domain on which every integration runs.
  Interval domain() const { return domain_; }
  const std::vector<double>& breakpoints() const { return breakpoints_; }
  double matching_point() const { return x_match_; }

  // ∫_0^x cos(u/2) at the domain ends.
  double omega_at_lo() const { return omega_lo_; }
  double omega_at_hi() const { return omega_hi_; }
  // ∫_{lo}^{0} (1 − c₋ cos(u/2)) + ∫_0^{hi} (1 − c₊ cos(u/2)) with c± = cos(π k±).
  double phase_integral() const { return phase_k_; }

  PotentialProfile reflected() const;
  PotentialProfile translated(double a) const;
  // u − 2π·periods; flips the signs of cos(u/2), sin(u/2) for odd periods.
  PotentialProfile shifted(int periods) const;

  const std::shared_ptr<const ProfileShape>& shape() const { return shape_; }

 private:
  std::shared_ptr<const ProfileShape> shape_;
  ProfileDescriptor descriptor_;
  ProfileKind kind_;
  std::optional<Interval> support_;
  std::vector<double> breakpoints_;
  Interval domain_{0.0, 0.0};
  int k_minus_ = 0;
  int k_plus_ = 0;
  double x_match_ = 0.0;
  double omega_lo_ = 0.0;
  double omega_hi_ = 0.0;
  double phase_k_ = 0.0;
};

PotentialProfile make_zero_potential();
PotentialProfile make_buckingham_miller();
PotentialProfile make_monotone_kink(KinkShape shape, double scale);
PotentialProfile make_klaus_shaw_breather(double peak, double width);
// sech breather whose width is chosen so that ∫sin(u/2) equals target.
PotentialProfile make_breather_with_l1(double peak, double target);
PotentialProfile make_compact_bump(double peak, double half_width);
PotentialProfile make_smoothed_box(double height, double half_width, double ramp);
PotentialProfile make_odd_sech(double amplitude);
// Values on [breaks[i], breaks[i+1]); the outer values extend to ±∞.
PotentialProfile make_piecewise_constant(std::vector<double> breaks, std::vector<double> values);
// Monotone C¹ cubic (Fritsch–Carlson) through the samples, constant beyond them.
PotentialProfile make_tabulated(std::vector<double> xs, std::vector<double> us,
                                std::string source = "inline");

PotentialProfile load_tabulated(const std::string& path);
void write_tabulated(const PotentialProfile& p, const std::string& path, std::size_t samples);

struct L1Result {
  double signed_value;  // I = ∫ sin(u/2)
  double abs_value;     // ∫ |sin(u/2)|
  double error_bound;
};

L1Result l1_sine_half(const PotentialProfile& p, double abs_tol = 1e-10);

// (1/2π) ∫ u_x over the truncated domain.
double charge_integral(const PotentialProfile& p);

struct DerivativeNorms {
  double ux_l1;
  double ux_sup;
  double sine_half_l1;
};

DerivativeNorms derivative_norms(const PotentialProfile& p);

enum class HypothesisTag { KinkMonotoneQ1, KinkMonotoneQminus1, KlausShawBreather, General };

struct HypothesisClass {
  HypothesisTag tag = HypothesisTag::General;
  double u0 = 0.0;  // peak height relative to the asymptote, breathers only

  bool is_kink() const {
    return tag == HypothesisTag::KinkMonotoneQ1 || tag == HypothesisTag::KinkMonotoneQminus1;
  }
  bool is_breather() const { return tag == HypothesisTag::KlausShawBreather; }
};

std::string to_string(HypothesisTag tag);

HypothesisClass classify(const PotentialProfile& p);

// Uniform samples of the truncated domain, including both ends.
std::vector<double> sample_grid(const PotentialProfile& p, std::size_t n);

}  // namespace sgspec
