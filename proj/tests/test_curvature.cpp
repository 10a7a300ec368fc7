#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "subfinsler/characteristic_flow.hpp"
#include "subfinsler/curvature.hpp"
#include "subfinsler/pansu_wulff.hpp"
#include "test_support.hpp"

using namespace subfinsler;
using std::numbers::pi;
using testing::kind_of;

namespace {

// Clockwise circle of planar radius r through the origin, unit speed.
HeisenbergCurve lifted_circle(double r, std::size_t n) {
  PlanarCurve c;
  for (std::size_t i = 0; i < n; ++i) {
    const double s = 2 * pi * r * static_cast<double>(i) / static_cast<double>(n - 1);
    c.params.push_back(s);
    c.x.push_back(r * std::sin(s / r));
    c.y.push_back(r * std::cos(s / r) - r);
  }
  return horizontal_lift(c, 0.0);
}

HeisenbergCurve straight_line(std::size_t n) {
  PlanarCurve c;
  for (std::size_t i = 0; i < n; ++i) {
    const double s = 0.01 * static_cast<double>(i);
    c.params.push_back(s);
    c.x.push_back(0.6 * s + 0.2);
    c.y.push_back(-0.8 * s);
  }
  return horizontal_lift(c, 1.0);
}

CurveScalar constant_along(const HeisenbergCurve& c, double v) {
  return {std::vector<double>(c.params().begin(), c.params().end()), std::vector<double>(c.size(), v)};
}

}  // namespace

TEST_SUITE("curvature") {
  TEST_CASE("dpi of the disk at a unit vector is the tangent projection") {
    const Mat2 m = dpi_matrix(ConvexBody::disk(), {0, -1});
    CHECK(m.a11 == doctest::Approx(1.0));
    CHECK(std::abs(m.a12) < 1e-15);
    CHECK(std::abs(m.a21) < 1e-15);
    CHECK(std::abs(m.a22) < 1e-15);
    CHECK(kind_of([] { dpi_matrix(ConvexBody::disk(), {0, -2}); }) == ErrorKind::NotUnit);
  }

  TEST_CASE("dpi eigenstructure and symmetry") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> ang(0, 2 * pi);
    for (const ConvexBody& body : {ConvexBody::disk(), ConvexBody::ellipse(2, 1), ConvexBody::make(1, {0.3}, {0, 0.05})}) {
      double sym = 0.0, null = 0.0, eig = 0.0, fd = 0.0;
      for (int i = 0; i < 1000; ++i) {
        const double th = ang(rng);
        const Vec2 nu{std::cos(th), std::sin(th)};
        const Vec2 z = apply_J(nu);
        const Mat2 m = dpi_matrix(body, nu);
        const Mat2 d = dpi_matrix_fd(body, nu);
        sym = std::max(sym, std::abs(m.a12 - m.a21));
        null = std::max(null, norm(m * nu));
        eig = std::max(eig, norm(m * z - z / body.curvature(th)));
        fd = std::max({fd, std::abs(m.a11 - d.a11), std::abs(m.a12 - d.a12), std::abs(m.a21 - d.a21),
                       std::abs(m.a22 - d.a22)});
      }
      CHECK(sym <= 1e-8);
      CHECK(null <= 1e-8);
      CHECK(eig <= 1e-6);
      CHECK(fd <= 1e-6);
    }
  }

  TEST_CASE("straight lines have zero curvature") {
    const FramedCurve fc = FramedCurve::from_velocity(straight_line(101));
    for (double v : h_k_along(ConvexBody::ellipse(2, 1), fc).values) CHECK(std::abs(v) < 1e-10);
    for (double v : h_d_along(fc).values) CHECK(std::abs(v) < 1e-10);
    const RatioReport r = verify_ratio(ConvexBody::ellipse(2, 1), fc, constant_along(fc.curve, 0.0));
    CHECK(r.max_gap_hd <= 1e-10);
    CHECK(r.max_gap_hk <= 1e-10);
  }

  TEST_CASE("lifted circles have curvature one over the radius") {
    for (double r : {0.5, 1.0, 2.0}) {
      const FramedCurve fc = FramedCurve::from_velocity(lifted_circle(r, 4001), -1.0);
      const auto hk = h_k_along(ConvexBody::disk(), fc);
      const auto hd = h_d_along(fc);
      for (std::size_t i = 0; i < hk.values.size(); ++i) {
        CHECK(std::abs(hk.values[i] - 1.0 / r) < 1e-4);
        CHECK(std::abs(hd.values[i] - 1.0 / r) < 1e-4);
        CHECK(std::abs(hk.values[i] - hd.values[i]) < 1e-8);
      }
    }
  }

  TEST_CASE("generating curves: H_K is one and H_D is the curvature of K") {
    for (const ConvexBody& body : {ConvexBody::disk(), ConvexBody::ellipse(2, 1)}) {
      const HeisenbergCurve c = lifted_boundary_curve(body, 0.7, 4096);
      const FramedCurve fc = FramedCurve::from_velocity(c, -1.0);
      const RatioReport r = verify_ratio(body, fc, constant_along(c, 1.0));
      CHECK(r.max_gap_hk <= 1e-4);
      CHECK(r.max_gap_hd <= 1e-4);
      const auto [lo, hi] = std::minmax_element(r.kappa.begin(), r.kappa.end());
      if (body.cos_coeffs().empty()) {
        CHECK(*hi - *lo < 1e-12);
      } else {
        CHECK(*hi - *lo > 1.0);
      }
    }
  }

  TEST_CASE("H_K in arc length equals dM/dx along graph leaves") {
    const ConvexBody body = ConvexBody::ellipse(2, 1);
    const CurveFunction f = [](double x) { return 1.0 + 0.1 * std::sin(x); };
    const PrescribedCurve pc = prescribed_curve(body, f, 0.0, 0.0, 0.0, 0.2, {-0.6, 0.6}, 1e-3);
    const HeisenbergCurve unit = reparameterize_arclength(pc.curve);
    const FramedCurve fc = FramedCurve::from_velocity(unit, 1.0);
    const auto hk = h_k_along(body, fc);
    const auto xs = unit.xs();
    for (std::size_t i = 0; i < xs.size(); ++i) CHECK(std::abs(hk.values[i] - f(xs[i])) < 1e-3);
  }

  TEST_CASE("framing and sampling errors") {
    const HeisenbergCurve c = lifted_circle(1.0, 201);
    std::vector<Vec2> bad(c.size(), Vec2{1.0, 0.1});
    CHECK(kind_of([&] { FramedCurve::from_normals(c, bad); }) == ErrorKind::NotUnit);

    PlanarCurve slow;
    for (int i = 0; i < 100; ++i) {
      slow.params.push_back(0.01 * i);
      slow.x.push_back(0.02 * i);
      slow.y.push_back(0.0);
    }
    const FramedCurve fast = FramedCurve::from_velocity(horizontal_lift(slow, 0.0));
    CHECK(kind_of([&] { h_k_along(ConvexBody::disk(), fast); }) == ErrorKind::NotUnitSpeed);
    CHECK(kind_of([&] { h_d_along(fast); }) == ErrorKind::NotUnitSpeed);

    const FramedCurve fc = FramedCurve::from_velocity(c, -1.0);
    CurveScalar short_f{{0, 1}, {1, 1}};
    CHECK(kind_of([&] { verify_ratio(ConvexBody::disk(), fc, short_f); }) == ErrorKind::GridMismatch);
  }
}
