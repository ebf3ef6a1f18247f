#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "../oracles.hpp"
#include "sgspec/error.hpp"
#include "sgspec/ode.hpp"
#include "sgspec/scattering.hpp"

using namespace sgspec;
constexpr double pi = std::numbers::pi;
const cplx I1(0.0, 1.0);

namespace {

// Reflectionless one-soliton: the reduced Wronskian is the Blaschke factor
// with its single zero at z = i.
cplx bm_reduced(cplx z) { return (I1 - z) / (I1 + z); }

double max_entry_diff(const Mat2& a, const oracle::Mat& b) {
  double d = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) d = std::max(d, std::abs(a[i][j] - b[i][j]));
  return d;
}

}  // namespace

TEST_SUITE("scattering") {
  TEST_CASE("dense output of the Dormand-Prince integrator") {
    using V = ode::Vec<cplx, 1>;
    V y{1.0};
    ode::StepControl ctl;
    ctl.tol = 1e-12;
    double worst = 0.0, worst_d = 0.0;
    ode::dopri5<cplx, 1>([](double, const V& v) { return V{I1 * v[0]}; }, 0.0, 20.0, y, ctl,
                         [&](const ode::DenseSegment<cplx, 1>& s, V&) {
                           for (double t : {0.13, 0.5, 0.91}) {
                             const double x = s.x0 + t * s.h;
                             worst = std::max(worst, std::abs(s.value(x)[0] - std::exp(I1 * x)));
                             worst_d = std::max(worst_d, std::abs(s.derivative(x)[0] - I1 * std::exp(I1 * x)));
                           }
                           return false;
                         });
    CHECK(std::abs(y[0] - std::exp(I1 * 20.0)) < 1e-9);
    CHECK(worst < 1e-9);
    CHECK(worst_d < 1e-7);
  }

  TEST_CASE("integrator lands on stops and runs backwards") {
    using V = ode::Vec<double, 1>;
    V y{1.0};
    std::vector<double> hits;
    ode::dopri5<double, 1>([](double x, const V& v) { return V{-2.0 * x * v[0]}; }, 2.0, -1.0, y, {},
                           [&](const ode::DenseSegment<double, 1>& s, V&) {
                             hits.push_back(s.x1());
                             return false;
                           },
                           {0.5, 1.25, 7.0});
    CHECK(y[0] == doctest::Approx(std::exp(4.0 - 1.0)).epsilon(1e-9));
    CHECK(std::find(hits.begin(), hits.end(), 0.5) != hits.end());
    CHECK(std::find(hits.begin(), hits.end(), 1.25) != hits.end());
  }

  TEST_CASE("spectral parameter") {
    CHECK_THROWS_AS(SpectralParameter(cplx(0.0, 0.0)), Error);
    const auto z = SpectralParameter::polar(2.0, 0.75 * pi);
    CHECK(z.r() == doctest::Approx(2.0));
    CHECK(z.theta() == doctest::Approx(0.75 * pi));
    CHECK(std::abs(z.a() - 0.25 * (z.z() - 1.0 / z.z())) < 1e-15);
  }

  TEST_CASE("rhs is the coefficient matrix times v") {
    const auto p = make_klaus_shaw_breather(1.1, 1.3);
    const SpectralParameter z(cplx(0.4, 0.9));
    const Vec2 v{cplx(0.3, -0.2), cplx(1.1, 0.5)};
    const auto m = coefficient_matrix(0.7, z, p);
    const auto r = rhs(0.7, z, v, p);
    CHECK(std::abs(r[0] - (m[0][0] * v[0] + m[0][1] * v[1])) < 1e-15);
    CHECK(std::abs(r[1] - (m[1][0] * v[0] + m[1][1] * v[1])) < 1e-15);
    const auto o = oracle::coefficient(z.z(), p.u(0.7));
    CHECK(max_entry_diff(m, o) < 1e-14);
  }

  TEST_CASE("Buckingham-Miller reduced Wronskian against the Blaschke factor") {
    const auto p = make_buckingham_miller();
    for (cplx z : {cplx(0.6, 0.8), cplx(0.3, 0.5), cplx(0.05, 0.2), cplx(3.0, 10.0), cplx(-2.0, 0.4),
                   cplx(0.01, 0.05), cplx(15.0, 2.0)}) {
      const cplx w = reduced_wronskian(SpectralParameter(z), p);
      CHECK(std::abs(w - bm_reduced(z)) < 1e-8);
    }
    CHECK(std::abs(reduced_wronskian(SpectralParameter(I1), p)) < 1e-12);
  }

  TEST_CASE("zero potential has constant unit Wronskian") {
    const auto p = make_zero_potential();
    for (cplx z : {cplx(0.6, 0.8), cplx(0.1, 2.0), cplx(-3.0, 0.5)}) {
      CHECK(std::abs(std::abs(reduced_wronskian(SpectralParameter(z), p)) - 1.0) < 1e-12);
    }
  }

  TEST_CASE("Wronskian is independent of the matching point") {
    const auto p = make_klaus_shaw_breather(1.3, 2.0);
    const SpectralParameter z(cplx(0.7, 0.9));
    WronskianOptions a, b;
    a.x_match = -3.0;
    b.x_match = 4.5;
    const cplx wa = wronskian(z, p, a).reduced();
    const cplx wb = wronskian(z, p, b).reduced();
    CHECK(std::abs(wa - wb) < 1e-9 * std::max(1.0, std::abs(wa)));
  }

  TEST_CASE("Wronskian constancy along the overlap") {
    const auto p = make_monotone_kink(KinkShape::AtanExp, 2.5);
    const SpectralParameter z(cplx(0.4, 0.6));
    JostOptions lo, ro;
    lo.x_stop = p.domain().hi;
    ro.x_stop = p.domain().lo;
    const auto l = integrate_jost(JostSide::Left, z, p, lo);
    const auto r = integrate_jost(JostSide::Right, z, p, ro);
    CHECK(wronskian_constancy(l, r) < 1e-8);
  }

  TEST_CASE("near-zero spectral parameter is refused") {
    CHECK_THROWS_AS(integrate_jost(JostSide::Left, SpectralParameter(cplx(0.0, 0.01)), make_buckingham_miller()), Error);
  }

  TEST_CASE("Wronskian derivative: closed form against finite differences and the Blaschke factor") {
    const auto p = make_buckingham_miller();
    const SpectralParameter z(I1);
    const BoundState bs(z, p);
    const cplx closed = bs.wronskian_derivative();
    const cplx fd = wronskian_derivative_fd(z, p).value;
    // d/dz (i − z)/(i + z) = −2i/(i + z)²
    const cplx exact = -2.0 * I1 / ((I1 + I1) * (I1 + I1));
    CHECK(std::abs(closed - exact) < 1e-8);
    CHECK(std::abs(fd - exact) < 1e-7);
  }

  TEST_CASE("transfer matrices match matrix exponentials for piecewise constant data") {
    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> val(-2.0 * pi, 2.0 * pi), len(0.2, 2.5), ang(0.05, pi - 0.05),
        rad(0.2, 4.0);
    for (int trial = 0; trial < 3; ++trial) {
      std::vector<double> breaks{-4.0};
      std::vector<double> values;
      for (int k = 0; k < 5; ++k) {
        breaks.push_back(breaks.back() + len(rng));
        values.push_back(val(rng));
      }
      const auto p = make_piecewise_constant(breaks, values);
      for (int zi = 0; zi < 3; ++zi) {
        const SpectralParameter z = SpectralParameter::polar(rad(rng), ang(rng));
        oracle::Mat ref{{{1.0, 0.0}, {0.0, 1.0}}};
        for (std::size_t k = 0; k < values.size(); ++k) {
          ref = oracle::mul(oracle::expm_tracefree(oracle::coefficient(z.z(), values[k]), breaks[k + 1] - breaks[k]), ref);
        }
        const auto t = transfer_matrix(z, p, breaks.front(), breaks.back());
        CHECK(max_entry_diff(t.entries, ref) < 1e-9);
        CHECK(std::abs(t.det() - 1.0) < 1e-9);
      }
    }
  }

  TEST_CASE("monodromy at z = 1 for compact breathers") {
    for (const auto& p : {make_compact_bump(0.9 * pi, 3.0), make_smoothed_box(0.5 * pi, 4.0, 0.5)}) {
      const auto d = p.domain();
      const double I = oracle::romberg_pieces([&](double x) { return std::sin(0.5 * p.u(x)); }, d.lo, d.hi, 0.5);
      const auto t = transfer_matrix(SpectralParameter(1.0), p, d.lo, d.hi);
      CHECK(std::abs(t.entries[0][0] - std::cos(0.5 * I)) < 1e-9);
      CHECK(std::abs(t.entries[1][0] - I1 * std::sin(0.5 * I)) < 1e-9);
    }
  }

  TEST_CASE("property: transfer matrices are unimodular and compose") {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> ang(0.05, pi - 0.05), rad(0.3, 3.0);
    const auto p = make_klaus_shaw_breather(1.4, 1.2);
    for (int k = 0; k < 5; ++k) {
      const auto z = SpectralParameter::polar(rad(rng), ang(rng));
      const auto a = transfer_matrix(z, p, -5.0, 0.3);
      const auto b = transfer_matrix(z, p, 0.3, 6.0);
      const auto c = transfer_matrix(z, p, -5.0, 6.0);
      const auto ab = matmul(b.entries, a.entries);
      double d = 0.0;
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) d = std::max(d, std::abs(ab[i][j] - c.entries[i][j]));
      CHECK(d < 1e-9);
      CHECK(std::abs(c.det() - 1.0) < 1e-9);
    }
  }

  TEST_CASE("bound state at z = i for Buckingham-Miller") {
    const BoundState bs(SpectralParameter(I1), make_buckingham_miller());
    CHECK(bs.mismatch() < 1e-8);
    const double norm = bs.integrate([](double, const Vec2& v) { return std::norm(v[0]) + std::norm(v[1]); });
    CHECK(norm == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(bs.phase_alignment_defect() < 1e-8);
  }

  TEST_CASE("bound state construction fails away from eigenvalues") {
    CHECK_THROWS_AS(BoundState(SpectralParameter(cplx(0.5, 0.5)), make_buckingham_miller()), Error);
  }
}
