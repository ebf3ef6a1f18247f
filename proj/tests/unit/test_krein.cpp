#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "sgspec/error.hpp"
#include "sgspec/krein.hpp"
#include "sgspec/pruefer.hpp"

using namespace sgspec;
constexpr double pi = std::numbers::pi;
const cplx I1(0.0, 1.0);

namespace {

double worst(const FluxResiduals& f) { return *std::max_element(f.residual.begin(), f.residual.end()); }

}  // namespace

TEST_SUITE("krein") {
  TEST_CASE("symmetry orbit sizes") {
    CHECK(symmetry_orbit(cplx(0.3, 0.7)).size() == 8);
    CHECK(symmetry_orbit(std::polar(1.0, 0.4)).size() == 4);
    CHECK(symmetry_orbit(I1).size() == 2);
    CHECK(symmetry_orbit(cplx(0.0, 2.0)).size() == 4);
    const auto up = upper_half_orbit(cplx(0.3, 0.7));
    CHECK(up.size() == 4);
    for (cplx w : up) CHECK(w.imag() > 0.0);
    CHECK_THROWS_AS(symmetry_orbit(cplx(0.0, 0.0)), Error);
  }

  TEST_CASE("flux identities hold along Jost trajectories") {
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> ang(0.05, pi - 0.05), lr(-1.5, 1.5);
    const std::vector<PotentialProfile> ps{make_buckingham_miller(), make_klaus_shaw_breather(1.2, 1.5),
                                           make_monotone_kink(KinkShape::TanhRamp, 2.0), make_smoothed_box(0.5 * pi, 4.0, 0.5)};
    for (int k = 0; k < 8; ++k) {
      const auto z = SpectralParameter::polar(std::exp(lr(rng)), ang(rng));
      const auto& p = ps[static_cast<std::size_t>(k) % ps.size()];
      const auto t = integrate_jost(k % 2 ? JostSide::Left : JostSide::Right, z, p);
      const auto f = flux_residuals(t, p);
      CHECK(f.samples > 10);
      CHECK(worst(f) < 1e-7);
    }
  }

  TEST_CASE("flux residuals shrink linearly with the tolerance") {
    const auto p = make_klaus_shaw_breather(1.0, 2.0);
    const auto z = SpectralParameter(cplx(0.8, 0.9));
    JostOptions a, b;
    a.tol = 1e-9;
    b.tol = 5e-10;
    const double ra = worst(flux_residuals(integrate_jost(JostSide::Left, z, p, a), p));
    const double rb = worst(flux_residuals(integrate_jost(JostSide::Left, z, p, b), p));
    CHECK(rb / ra > 0.35);
    CHECK(rb / ra < 0.65);
  }

  TEST_CASE("circle signature is positive for a breather eigenvalue") {
    const auto p = make_breather_with_l1(0.5 * pi, 1.5 * pi);
    const auto a = circle_scan(p);
    REQUIRE(a.size() == 1);
    const auto z = SpectralParameter::polar(1.0, a[0]);
    const BoundState bs(z, p);
    const auto s = signature_report(bs);
    CHECK(s.circle_bracket > 1e-8);
    CHECK(s.definite);
    // κ = 2ir times the bracket on the unit circle.
    CHECK(std::abs(s.kappa_circle - 2.0 * I1 * s.circle_bracket) < 1e-9);
    CHECK_THROWS_AS(circle_signature(SpectralParameter::polar(1.0, a[0] + 0.1), p, 1e-8), Error);
  }

  TEST_CASE("imaginary-axis signature at z = i for Buckingham-Miller") {
    const auto p = make_buckingham_miller();
    const cplx k = imag_axis_signature(SpectralParameter(I1), p, 1e-8);
    CHECK(std::isfinite(k.real()));
    CHECK(std::abs(k) > 1e-8);
  }

  TEST_CASE("zero momentum at kink and small-peak breather eigenvalues") {
    const BoundState bm(SpectralParameter(I1), make_buckingham_miller());
    CHECK(zero_momentum_residual(bm) < 1e-9);
    const auto p = make_breather_with_l1(0.5 * pi, 2.5 * pi);
    for (double th : circle_scan(p)) {
      const BoundState bs(SpectralParameter::polar(1.0, th), p);
      CHECK(zero_momentum_residual(bs) < 1e-7);
    }
  }
}
