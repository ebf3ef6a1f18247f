#pragma once

#include <array>
#include <string>
#include <vector>

#include "sgspec/scattering.hpp"

namespace sgspec {

struct SignatureReport {
  cplx kappa_circle;  // κ = 2ir (sinθ ∫s|Φ|² − i cosθ ∫c⟨Φ,τ₃Φ⟩)
  cplx kappa_imag;    // κ̃ = (i/2)(r − 1/r) ∫c⟨Φ,τ₂Φ⟩ − (i/2)(r + 1/r) ∫s⟨Φ,τ₁Φ⟩
  double circle_bracket = 0.0;  // the real bracket inside κ
  // ∫s|Φ|², ∫c⟨Φ,τ₃Φ⟩, ∫c⟨Φ,τ₂Φ⟩, ∫s⟨Φ,τ₁Φ⟩ for the unit-norm eigenfunction
  std::array<cplx, 4> bracket_integrals{};
  bool definite = false;
};

SignatureReport signature_report(const BoundState& state);

// Both throw NotAnEigenvalue when |reduced W(z)| exceeds threshold.
cplx circle_signature(const SpectralParameter& z, const PotentialProfile& p, double threshold,
                      double tol = 1e-11);
cplx imag_axis_signature(const SpectralParameter& z, const PotentialProfile& p, double threshold,
                         double tol = 1e-11);

struct FluxResiduals {
  // ⟨Φ,τ₂Φ⟩', ⟨Φ,τ₃Φ⟩', (|Φ|²)', ⟨Φ,τ₁Φ⟩' identities, max over the step midpoints
  // of |LHS − RHS| / (|Φ|² max(1, |z|, 1/|z|)).
  std::array<double, 4> residual{};
  std::size_t samples = 0;
};

FluxResiduals flux_residuals(const JostTrajectory& trajectory, const PotentialProfile& p);

struct OrbitMember {
  cplx z;
  std::string eigenfunction_map;
};

// {z, 1/z, −z, z̄, −1/z, 1/z̄, −z̄, −1/z̄} with coincident points merged.
std::vector<OrbitMember> symmetry_orbit(cplx z);

// Orbit members in the closed upper half plane.
std::vector<cplx> upper_half_orbit(cplx z);

// |∫ φ₁* φ₁' − ∫ φ₂* φ₂'| for the unit-norm eigenfunction.
double zero_momentum_residual(const BoundState& state);

}  // namespace sgspec
