#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sgspec/krein.hpp"
#include "sgspec/potentials.hpp"
#include "sgspec/pruefer.hpp"
#include "sgspec/scattering.hpp"

namespace sgspec {

struct Disk {
  cplx center;
  double radius = 0.0;
  bool contains(cplx z) const { return std::abs(z - center) < radius; }
};

// Either r0 ≤ |z| ≤ r1, t0 ≤ arg z ≤ t1 (annulus sector) or
// r0 ≤ Re z ≤ r1, t0 ≤ Im z ≤ t1 (rectangle). Points inside an excluded disk
// are dropped from the search output.
struct SearchRegion {
  enum class Kind { Rectangle, AnnulusSector };
  Kind kind = Kind::AnnulusSector;
  double r0 = 0.05, r1 = 20.0;
  double t0 = 0.01, t1 = 3.141592653589793 - 0.01;
  std::vector<Disk> excluded;

  static SearchRegion annulus_sector(double r_min, double r_max, double theta_min,
                                     double theta_max);
  static SearchRegion rectangle(double re_min, double re_max, double im_min, double im_max);

  bool contains(cplx z) const;
  // Throws InvalidArgument unless the region keeps |z| ≥ 0.05 and the
  // real-axis margin (arg z ≥ 0.01 for sectors, Im z ≥ 0.01 for rectangles).
  void validate() const;
  std::string describe() const;
};

// Closed piecewise-smooth curve; each piece maps t ∈ [0, 1] into the plane and
// the pieces join end to start, counterclockwise.
struct Contour {
  std::string label;
  std::vector<std::function<cplx(double)>> pieces;
};

Contour circle_contour(cplx center, double radius);
Contour annular_sector_contour(double r0, double r1, double t0, double t1);
Contour rectangle_contour(double re0, double re1, double im0, double im1);

struct WindingOptions {
  double tol = 1e-11;
  double max_phase_step = 0.7853981633974483;  // π/4
  std::size_t initial_samples = 16;
  // Samples with |W| below floor · max|W| count as a zero on the contour.
  double zero_floor = 1e-10;
  double min_parameter_step = 1e-10;
};

struct WindingResult {
  int winding = 0;
  double phase_change = 0.0;
  double min_abs = 0.0;
  double max_abs = 0.0;
  std::size_t samples = 0;
};

// Argument principle on the reduced Wronskian. Throws ZeroOnContour when the
// contour passes too close to a zero.
WindingResult winding_number(const Contour& contour, const PotentialProfile& p,
                             const WindingOptions& opts = {});

struct ExclusionBounds {
  double ux_l1 = 0.0;
  double ux_sup = 0.0;
  double sine_l1 = 0.0;
  double u0 = 0.0;
  double rho0 = 0.0;      // radius on which the Volterra bound is taken
  double C = 0.0;         // ‖T‖ ≤ C |z|² / Im z for |z| ≤ rho0
  double diameter = 0.0;  // eigenvalue-free disk {|z| < diameter · sin arg z}
  double corollary_radius = 0.0;
};

struct ExclusionRegion {
  enum class Kind { OriginDisk, ImagBound, SectorComplement, CorollaryDisk };
  Kind kind = Kind::OriginDisk;
  std::string name;
  double parameter = 0.0;  // diameter, Im bound, half-angle or radius
  bool empty = false;      // nothing of it lies inside the search annulus

  bool contains(cplx z) const;
  bool has_contour() const { return kind != Kind::CorollaryDisk && !empty; }
  // Boundary moved inward by attempt · 1e-3 (relative) to step off zeros.
  Contour contour(int attempt = 0) const;
};

struct ExclusionSet {
  ExclusionBounds bounds;
  std::vector<ExclusionRegion> regions;
};

// Eigenvalue-free regions of a single-hump breather. Throws HypothesisNotMet
// for other profiles.
ExclusionSet exclusion_regions(const PotentialProfile& p);

// Winding on a region contour with up to max_attempts inward perturbations.
WindingResult exclusion_winding(const ExclusionRegion& region, const PotentialProfile& p,
                                const WindingOptions& opts = {}, int max_attempts = 5);

struct SearchOptions {
  double tol = 1e-11;
  double threshold = 1e-8;  // accept |W| < threshold · max |W| on the region boundary
  double max_phase_step = 0.7853981633974483;
  int max_depth = 40;
  int max_retries = 5;
  bool use_symmetry = true;
  double root_tol = 1e-12;
  double simple_threshold = 1e-6;
  bool signatures = true;
};

struct SpectralPoint {
  cplx z;
  double residual = 0.0;           // |W(z)|, reduced
  double relative_residual = 0.0;  // residual / scale
  cplx wdot;
  DerivativeMethod wdot_method = DerivativeMethod::FiniteDifference;
  cplx wdot_check;  // finite differences, for comparison with the closed form
  bool on_circle = false;
  std::optional<SignatureReport> signature;
  bool simple = false;
  bool from_symmetry = false;  // produced by the orbit map, then re-certified
};

struct SearchResult {
  std::vector<SpectralPoint> points;  // sorted by (Re z, Im z)
  int total_winding = 0;              // over the searched (possibly reduced) region
  double scale = 0.0;                 // max |W| on the searched boundary
  double threshold = 0.0;             // absolute acceptance threshold
  std::size_t evaluations = 0;
  int max_depth_reached = 0;
  std::size_t cells = 0;
  std::string searched;
  std::vector<std::string> anomalies;
};

// Argument-principle quadtree plus secant polishing. Throws SubdivisionLimit
// when a cell keeps a nonzero winding past max_depth levels.
SearchResult locate_eigenvalues(const SearchRegion& region, const PotentialProfile& p,
                                const SearchOptions& opts = {});

// Certificate data for one point; used by the search and by the symmetry check.
SpectralPoint certify_point(cplx z, const PotentialProfile& p, double scale,
                            const SearchOptions& opts = {});

struct Check {
  std::string name;
  bool applicable = true;
  bool passed = true;
  std::string detail;
};

struct VerificationReport {
  std::vector<Check> checks;
  bool all_passed() const;
};

struct VerifyOptions {
  SearchRegion region;
  SearchOptions search;
  bool exclusion_windings = true;
  CircleScanOptions scan;
};

// Per-theorem checks of a located spectrum. Failures are report entries.
VerificationReport verify_spectrum(const SearchResult& result, const PotentialProfile& p,
                                   const CountReport& count, const VerifyOptions& opts = {});
VerificationReport verify_spectrum(const SearchResult& result, const PotentialProfile& p,
                                   const VerifyOptions& opts = {});

// Numerically odd: u(−x) = −u(x) on a sample grid.
bool is_odd_profile(const PotentialProfile& p, double tol = 1e-12);

}  // namespace sgspec
