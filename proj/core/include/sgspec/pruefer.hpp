#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sgspec/potentials.hpp"

namespace sgspec {

// (φ₁, iφ₂) = ρ (cos η, sin η) for eigenfunctions on |z| = 1.
struct PrueferState {
  double eta = 0.0;
  double log_rho = 0.0;
};

struct PrueferOptions {
  double tol = 1e-12;
};

// Angle data at one θ. The left sweep starts at η = 0 on the left end and the
// right sweep starts from its boundary angle on the right end; both stop at the
// matching point. The endpoint angle is
//   L(θ) = η_L(x_m) − η_R(x_m) + η_R(x_max),
// which equals the single forward sweep η(x_max) when u has compact support and
// stays continuous in θ when the tails are only exponentially small.
struct PrueferFlow {
  double theta = 0.0;
  double endpoint = 0.0;
  PrueferState left;   // at x_m
  PrueferState right;  // at x_m
  double right_boundary = 0.0;
};

// Profiles are anchored (shifted by 2π k₋) so the left asymptote is 0.
PotentialProfile anchored(const PotentialProfile& p);

PrueferFlow pruefer_flow_detail(double theta, const PotentialProfile& p,
                                const PrueferOptions& opts = {});
double pruefer_flow(double theta, const PotentialProfile& p, const PrueferOptions& opts = {});

// Single forward sweep η(x; θ) from the left end over the whole domain.
std::vector<std::pair<double, PrueferState>> pruefer_trajectory(double theta,
                                                                const PotentialProfile& p,
                                                                const PrueferOptions& opts = {});

struct CircleScanOptions {
  std::size_t grid_size = 256;
  int max_doublings = 3;
  double angle_tol = 1e-10;
  double l1_tol = 1e-10;  // quadrature tolerance for I
  PrueferOptions flow;
};

// Eigenangles in the open quadrant, sorted; θ = π/2 appended for odd charge.
std::vector<double> circle_scan(const PotentialProfile& p, const CircleScanOptions& opts = {});

std::vector<std::pair<double, double>> pruefer_curve(const PotentialProfile& p, std::size_t samples,
                                                     const PrueferOptions& opts = {});

int count_lower_bound(double I, int charge);

struct CountReport {
  double I = 0.0;       // signed ∫ sin(u/2)
  double I_abs = 0.0;   // ∫ |sin(u/2)|
  double I_error = 0.0;
  int charge = 0;
  int lower_bound_N = 0;
  std::optional<int> exact_count;
  // Breathers: eigenangles in the open quadrant. Odd charge: all eigenangles in
  // (0, π), i.e. the quadrant angles, π/2 and their mirrors π − θ.
  std::vector<double> circle_angles;
  std::string counting_region;
  HypothesisClass applicability;
  std::string theorem;
  bool near_threshold = false;
  bool scan_consistent = true;
};

// Always succeeds; exact_count is set only under the counting hypotheses.
CountReport count_report(const PotentialProfile& p, const CircleScanOptions& opts = {});
// Throws HypothesisNotMet when classify(p) is General.
CountReport count_exact(const PotentialProfile& p, const CircleScanOptions& opts = {});

struct MonotonicityCertificate {
  double integral_formula;  // dL/dθ from the eigenfunction integral
  double bracket;           // ∫ (sinθ s ρ² − 2 cosθ c p q) for the unit-norm eigenfunction
  double rho_match_sq;      // ρ(x_m)²
};

// dL/dθ at an eigenangle, oriented so that the theorem predicts a positive
// value (multiplied by the sign of the anchored I). Throws
// NonPositiveDerivative when the value is not positive.
MonotonicityCertificate angle_monotonicity_certificate(const PotentialProfile& p, double theta,
                                                       double tol = 1e-11);

}  // namespace sgspec
