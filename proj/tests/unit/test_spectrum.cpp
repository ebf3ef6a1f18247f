#include <doctest.h>

#include <cmath>
#include <numbers>

#include "sgspec/error.hpp"
#include "sgspec/spectrum.hpp"

using namespace sgspec;
constexpr double pi = std::numbers::pi;
const cplx I1(0.0, 1.0);

namespace {

bool same_sets(const SearchResult& a, const SearchResult& b, double tol) {
  if (a.points.size() != b.points.size()) return false;
  for (const auto& p : a.points) {
    bool hit = false;
    for (const auto& q : b.points) hit = hit || std::abs(p.z - q.z) < tol;
    if (!hit) return false;
  }
  return true;
}

}  // namespace

TEST_SUITE("spectrum") {
  TEST_CASE("winding around z = i for Buckingham-Miller") {
    const auto p = make_buckingham_miller();
    CHECK(winding_number(circle_contour(I1, 0.3), p).winding == 1);
    CHECK(winding_number(circle_contour(cplx(0.7, 0.6), 0.1), p).winding == 0);
    CHECK(winding_number(rectangle_contour(-0.5, 0.5, 0.6, 1.7), p).winding == 1);
  }

  TEST_CASE("zero potential has no zeros anywhere") {
    const auto p = make_zero_potential();
    CHECK(winding_number(annular_sector_contour(0.1, 5.0, 0.1, 1.5), p).winding == 0);
    CHECK(locate_eigenvalues(SearchRegion{}, p).points.empty());
  }

  TEST_CASE("a contour through a zero is reported") {
    const auto p = make_buckingham_miller();
    try {
      winding_number(circle_contour(cplx(0.0, 0.7), 0.3), p);
      FAIL("expected ZeroOnContour");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::ZeroOnContour);
    }
  }

  TEST_CASE("region validation") {
    CHECK_THROWS_AS(SearchRegion::annulus_sector(0.01, 20.0, 0.01, 3.0).validate(), Error);
    CHECK_THROWS_AS(SearchRegion::annulus_sector(0.05, 20.0, 0.0, 3.0).validate(), Error);
    CHECK_THROWS_AS(SearchRegion::rectangle(-1.0, 1.0, 0.001, 2.0).validate(), Error);
    CHECK_THROWS_AS(SearchRegion::rectangle(-1.0, 1.0, 0.02, 2.0).validate(), Error);
    CHECK_NOTHROW(SearchRegion::rectangle(-1.0, 1.0, 0.06, 2.0).validate());
    CHECK_NOTHROW(SearchRegion{}.validate());
  }

  TEST_CASE("Buckingham-Miller search finds exactly z = i") {
    const auto r = locate_eigenvalues(SearchRegion{}, make_buckingham_miller());
    REQUIRE(r.points.size() == 1);
    CHECK(std::abs(r.points[0].z - I1) < 1e-9);
    CHECK(r.points[0].on_circle);
    CHECK(r.points[0].simple);
    CHECK(r.anomalies.empty());
  }

  TEST_CASE("rectangle search") {
    const auto r = locate_eigenvalues(SearchRegion::rectangle(-0.5, 0.5, 0.5, 1.5), make_buckingham_miller());
    REQUIRE(r.points.size() == 1);
    CHECK(std::abs(r.points[0].z - I1) < 1e-9);
  }

  TEST_CASE("symmetric and full searches agree") {
    const auto p = make_breather_with_l1(0.5 * pi, 3.5 * pi);
    SearchOptions full;
    full.use_symmetry = false;
    const auto a = locate_eigenvalues(SearchRegion{}, p);
    const auto b = locate_eigenvalues(SearchRegion{}, p, full);
    CHECK(a.points.size() == 4);
    CHECK(same_sets(a, b, 1e-8));
    CHECK(b.total_winding == 4);
    CHECK(b.anomalies.empty());
  }

  TEST_CASE("search output is stable under contour offsets") {
    const auto p = make_monotone_kink(KinkShape::AtanExp, 2.5);
    const auto a = locate_eigenvalues(SearchRegion{}, p);
    const auto b = locate_eigenvalues(SearchRegion::annulus_sector(0.051, 19.98, 0.011, pi - 0.011), p);
    CHECK(a.points.size() == 3);
    CHECK(same_sets(a, b, 1e-8));
  }

  TEST_CASE("winding equals the number of located points inside") {
    const auto p = make_breather_with_l1(0.9 * pi, 3.5 * pi);
    const auto r = locate_eigenvalues(SearchRegion{}, p);
    const auto c = annular_sector_contour(0.5, 2.0, 0.05, 0.5 * pi - 0.05);
    int inside = 0;
    for (const auto& pt : r.points) {
      const double t = std::arg(pt.z);
      if (std::abs(pt.z) > 0.5 && std::abs(pt.z) < 2.0 && t > 0.05 && t < 0.5 * pi - 0.05) ++inside;
    }
    CHECK(winding_number(c, p).winding == inside);
    CHECK(inside == 2);
  }

  TEST_CASE("exclusion regions of a breather") {
    const auto p = make_breather_with_l1(0.5 * pi, 2.5 * pi);
    const auto ex = exclusion_regions(p);
    CHECK(ex.bounds.C > 0.0);
    CHECK(ex.bounds.diameter > 0.05);
    CHECK(ex.bounds.diameter <= ex.bounds.rho0 + 1e-12);
    CHECK(ex.regions.size() == 4);
    for (const auto& r : ex.regions) {
      if (r.has_contour()) CHECK(exclusion_winding(r, p).winding == 0);
    }
    CHECK_THROWS_AS(exclusion_regions(make_buckingham_miller()), Error);
    CHECK_THROWS_AS(exclusion_regions(make_odd_sech(pi)), Error);
  }

  TEST_CASE("exclusion region membership") {
    ExclusionRegion d;
    d.kind = ExclusionRegion::Kind::OriginDisk;
    d.parameter = 0.4;
    CHECK(d.contains(cplx(0.0, 0.3)));
    CHECK_FALSE(d.contains(cplx(0.3, 0.01)));
    ExclusionRegion s;
    s.kind = ExclusionRegion::Kind::SectorComplement;
    s.parameter = 0.6;
    CHECK(s.contains(std::polar(1.0, 1.0)));
    CHECK_FALSE(s.contains(std::polar(1.0, 0.3)));
    CHECK_FALSE(s.contains(std::polar(1.0, pi - 0.3)));
  }

  TEST_CASE("verification of a breather spectrum passes") {
    const auto p = make_breather_with_l1(0.25 * pi, 2.5 * pi);
    const auto r = locate_eigenvalues(SearchRegion{}, p);
    const auto v = verify_spectrum(r, p);
    for (const auto& c : v.checks) {
      INFO(c.name << ": " << c.detail);
      CHECK((!c.applicable || c.passed));
    }
    CHECK(v.all_passed());
  }

  TEST_CASE("general profiles get a lower-bound count check only") {
    const auto p = make_odd_sech(pi);
    const auto v = verify_spectrum(locate_eigenvalues(SearchRegion{}, p), p);
    bool lower = false, odd = false;
    for (const auto& c : v.checks) {
      lower = lower || c.name == "count (lower bound only)";
      odd = odd || (c.name == "no circle eigenvalues (odd profile)" && c.passed);
    }
    CHECK(lower);
    CHECK(odd);
    CHECK(is_odd_profile(p));
    CHECK_FALSE(is_odd_profile(make_buckingham_miller()));
  }

  TEST_CASE("verification flags a wrong spectrum") {
    const auto p = make_breather_with_l1(0.5 * pi, 1.5 * pi);
    auto r = locate_eigenvalues(SearchRegion{}, p);
    REQUIRE(r.points.size() == 2);
    r.points.pop_back();
    VerifyOptions o;
    o.exclusion_windings = false;
    CHECK_FALSE(verify_spectrum(r, p, o).all_passed());
  }
}
