#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <random>

#include "../oracles.hpp"
#include "sgspec/error.hpp"
#include "sgspec/potentials.hpp"

using namespace sgspec;
constexpr double pi = std::numbers::pi;

TEST_SUITE("potentials") {
  TEST_CASE("Buckingham-Miller integral of sech is pi") {
    const auto p = make_buckingham_miller();
    const auto l1 = l1_sine_half(p);
    CHECK(std::abs(std::abs(l1.signed_value) - pi) < 1e-10);
    CHECK(p.k_minus() == 1);
    CHECK(p.k_plus() == 0);
    CHECK(p.charge() == -1);
    CHECK(classify(p).tag == HypothesisTag::KinkMonotoneQminus1);
  }

  TEST_CASE("Buckingham-Miller matches pi - 2 gd(x)") {
    const auto p = make_buckingham_miller();
    for (double x : {-3.0, -0.5, 0.0, 0.7, 4.0}) {
      const double gd = 2.0 * std::atan(std::tanh(0.5 * x));
      CHECK(p.u(x) == doctest::Approx(pi - 2.0 * gd).epsilon(1e-14));
      const auto h = p.half_angle(x);
      CHECK(h.c == doctest::Approx(std::cos(0.5 * p.u(x))).epsilon(1e-12));
      CHECK(h.s == doctest::Approx(std::sin(0.5 * p.u(x))).epsilon(1e-12));
    }
  }

  TEST_CASE("sech breather integral against Romberg") {
    for (double peak : {0.25 * pi, 0.5 * pi, 0.9 * pi}) {
      const double width = 1.7;
      const auto p = make_klaus_shaw_breather(peak, width);
      const double ref = oracle::romberg_pieces(
          [&](double x) { return std::sin(0.5 * peak / std::cosh(x / width)); }, -60.0, 60.0);
      CHECK(l1_sine_half(p).signed_value == doctest::Approx(ref).epsilon(1e-10));
    }
  }

  TEST_CASE("breather width tuning hits the target integral") {
    for (double target : {0.9 * pi, 1.5 * pi, 2.5 * pi, 3.5 * pi}) {
      const auto p = make_breather_with_l1(0.5 * pi, target);
      CHECK(std::abs(l1_sine_half(p).signed_value - target) < 1e-9);
      const auto cls = classify(p);
      CHECK(cls.tag == HypothesisTag::KlausShawBreather);
      CHECK(cls.u0 == doctest::Approx(0.5 * pi).epsilon(1e-12));
    }
  }

  TEST_CASE("monotone kink integrals scale with the width") {
    for (double scale : {1.0, 2.5, 4.5}) {
      const auto p = make_monotone_kink(KinkShape::AtanExp, scale);
      CHECK(l1_sine_half(p).signed_value == doctest::Approx(pi * scale).epsilon(1e-10));
      CHECK(p.charge() == 1);
      CHECK(classify(p).tag == HypothesisTag::KinkMonotoneQ1);
    }
    const auto t = make_monotone_kink(KinkShape::TanhRamp, 1.3);
    const double ref = oracle::romberg_pieces(
        [](double x) { return std::sin(0.5 * pi * (1.0 + std::tanh(x / 1.3))); }, -40.0, 40.0);
    CHECK(l1_sine_half(t).signed_value == doctest::Approx(ref).epsilon(1e-9));
  }

  TEST_CASE("compact bump integral") {
    const auto p = make_compact_bump(0.9 * pi, 3.0);
    const double ref = oracle::romberg(
        [](double x) { const double c = std::cos(0.5 * pi * x / 3.0); return std::sin(0.45 * pi * c * c); }, -3.0, 3.0);
    CHECK(l1_sine_half(p).signed_value == doctest::Approx(ref).epsilon(1e-11));
    CHECK(p.domain().lo == -3.0);
    CHECK(p.domain().hi == 3.0);
  }

  TEST_CASE("classification") {
    CHECK(classify(make_odd_sech(pi)).tag == HypothesisTag::General);
    CHECK(classify(make_zero_potential()).tag == HypothesisTag::General);
    CHECK(classify(make_smoothed_box(0.5 * pi, 4.0, 0.5)).tag == HypothesisTag::KlausShawBreather);
    CHECK(classify(make_compact_bump(0.5 * pi, 2.0)).tag == HypothesisTag::KlausShawBreather);
    // Two humps: u_x changes sign three times.
    const auto two = make_piecewise_constant({-3.0, -1.0, 1.0, 3.0}, {1.0, 0.0, 1.0});
    CHECK(classify(two).tag == HypothesisTag::General);
  }

  TEST_CASE("invalid arguments") {
    CHECK_THROWS_AS(make_klaus_shaw_breather(pi, 1.0), Error);
    CHECK_THROWS_AS(make_klaus_shaw_breather(0.5, -1.0), Error);
    CHECK_THROWS_AS(make_monotone_kink(KinkShape::AtanExp, 0.0), Error);
    CHECK_THROWS_AS(make_piecewise_constant({0.0, 1.0}, {1.0, 2.0}), Error);
    CHECK_THROWS_AS(make_smoothed_box(1.0, 1.0, 2.0), Error);
    try {
      make_klaus_shaw_breather(4.0, 1.0);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::InvalidArgument);
    }
  }

  TEST_CASE("tails are below the threshold at the domain ends") {
    for (const auto& p : {make_buckingham_miller(), make_klaus_shaw_breather(1.0, 2.0),
                          make_monotone_kink(KinkShape::AtanExp, 2.5), make_odd_sech(pi)}) {
      const auto d = p.domain();
      for (double x : {d.lo, d.hi}) CHECK(std::abs(p.half_angle(x).s) < 1e-11);
    }
  }

  TEST_CASE("reflection, translation and shifts") {
    const auto p = make_klaus_shaw_breather(1.2, 1.5);
    const auto r = p.reflected();
    const auto t = p.translated(7.5);
    for (double x : {-2.0, 0.3, 1.9}) {
      CHECK(r.u(x) == doctest::Approx(p.u(-x)));
      CHECK(t.u(x + 7.5) == doctest::Approx(p.u(x)));
    }
    CHECK(l1_sine_half(t).signed_value == doctest::Approx(l1_sine_half(p).signed_value).epsilon(1e-10));
    const auto bm = make_buckingham_miller();
    const auto s = bm.shifted(1);
    CHECK(s.k_minus() == 0);
    CHECK(s.k_plus() == -1);
    for (double x : {-1.0, 0.5}) {
      CHECK(s.half_angle(x).c == doctest::Approx(-bm.half_angle(x).c));
      CHECK(s.half_angle(x).s == doctest::Approx(-bm.half_angle(x).s));
    }
  }

  TEST_CASE("matching point sits at the half-charge crossing for kinks") {
    const auto p = make_monotone_kink(KinkShape::AtanExp, 2.0).translated(3.0);
    CHECK(p.matching_point() == doctest::Approx(3.0).epsilon(1e-9));
  }

  TEST_CASE("derivative norms") {
    const auto p = make_buckingham_miller();
    const auto n = derivative_norms(p);
    CHECK(n.ux_l1 == doctest::Approx(2.0 * pi).epsilon(1e-9));
    CHECK(n.ux_sup == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(n.sine_half_l1 == doctest::Approx(pi).epsilon(1e-9));
  }

  TEST_CASE("tabulated round trip") {
    const auto p = make_buckingham_miller();
    const auto path = (std::filesystem::temp_directory_path() / "sgspec_tab_test.dat").string();
    write_tabulated(p, path, 4001);
    const auto q = load_tabulated(path);
    std::filesystem::remove(path);
    CHECK(q.kind() == ProfileKind::Tabulated);
    CHECK(q.charge() == -1);
    CHECK(std::abs(std::abs(l1_sine_half(q).signed_value) - pi) < 1e-5);
    CHECK_THROWS_AS(load_tabulated("/nonexistent/profile.dat"), Error);
  }

  TEST_CASE("tabulated data must settle at multiples of 2 pi") {
    CHECK_THROWS_AS(make_tabulated({-1.0, 0.0, 1.0}, {0.0, 1.0, 1.0}), Error);
  }

  TEST_CASE("property: I is additive under the reflection u -> u(-x)") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> peak(0.1, 3.0), width(0.3, 4.0);
    for (int k = 0; k < 10; ++k) {
      const auto p = make_klaus_shaw_breather(peak(rng), width(rng));
      CHECK(l1_sine_half(p.reflected()).signed_value ==
            doctest::Approx(l1_sine_half(p).signed_value).epsilon(1e-11));
    }
  }
}
