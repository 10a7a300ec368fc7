#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "subfinsler/characteristic_flow.hpp"
#include "subfinsler/curvature.hpp"
#include "subfinsler/numerics.hpp"
#include "subfinsler/pansu_wulff.hpp"
#include "test_support.hpp"

using namespace subfinsler;
using std::numbers::pi;
using testing::kind_of;

namespace {

// Shoelace area of a dense boundary polygon, independent of the Fourier formulas.
double polygon_area(const ConvexBody& body) {
  const int n = 100000;
  double a = 0.0;
  Vec2 prev = body.boundary_point(0.0);
  for (int i = 1; i <= n; ++i) {
    const Vec2 p = body.boundary_point(2 * pi * i / n);
    a += cross(prev, p);
    prev = p;
  }
  return 0.5 * a;
}

// Pansu sphere of the disk near its equator, as an intrinsic graph over y = 0.
// The generating curve Gamma_0 sweeps a circle of radius r(T) = 2 sin(s/2) at
// height T = s - sin s; rotating about the t-axis gives u = -sqrt(r(T)^2 - x^2)
// with T = t - x u.
double s_of_height(double T) {
  double s = std::cbrt(6 * T);
  if (s > 3) s = T;
  s = std::clamp(s, 1e-3, 2 * pi - 1e-3);
  for (int i = 0; i < 100; ++i) {
    const double ds = (s - std::sin(s) - T) / (1 - std::cos(s));
    s -= ds;
    if (std::abs(ds) < 1e-15) break;
  }
  return s;
}

double pansu_radius(double T) { return 2 * std::sin(s_of_height(T) / 2); }

double pansu_u(double x, double t) {
  double u = -pansu_radius(t);
  for (int i = 0; i < 200; ++i) {
    const double r = pansu_radius(t - x * u);
    const double next = -std::sqrt(r * r - x * x);
    if (std::abs(next - u) < 1e-15) break;
    u = next;
  }
  return u;
}

}  // namespace

TEST_SUITE("pansu_wulff") {
  TEST_CASE("clockwise boundary parameterization") {
    const ConvexBody e = ConvexBody::ellipse(2, 1);
    const ClockwiseBoundary cb(e);
    CHECK(cb.theta(0.0) == doctest::Approx(pi / 2));
    CHECK(cb.point(0.0).y == doctest::Approx(1.0));
    for (double s : {0.3, 1.7, 4.0, 9.0}) {
      const double h = 1e-6;
      const Vec2 d = (cb.point(s + h) - cb.point(s - h)) / (2 * h);
      CHECK(norm(d - cb.velocity(s)) < 1e-8);
      CHECK(norm(cb.velocity(s)) == doctest::Approx(1.0));
      // Clockwise: the outer normal is J(velocity).
      const Vec2 n{std::cos(cb.theta(s)), std::sin(cb.theta(s))};
      CHECK(norm(apply_J(cb.velocity(s)) - n) < 1e-12);
    }
    CHECK(norm(cb.point(cb.period() + 0.4) - cb.point(0.4)) < 1e-10);
  }

  TEST_CASE("generating curve of the disk is the classical geodesic") {
    const HeisenbergCurve c = lifted_boundary_curve(ConvexBody::disk(), 0.0, 4097);
    CHECK(c.front() == HeisenbergPoint{0, 0, 0});
    double err = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
      const double s = c.params()[i];
      const auto& p = c.points()[i];
      err = std::max({err, std::abs(p.x - std::sin(s)), std::abs(p.y - (std::cos(s) - 1)),
                      std::abs(p.t - (s - std::sin(s)))});
    }
    CHECK(err < 1e-10);
    CHECK(c.horizontality_residual() <= 1e-8);
  }

  TEST_CASE("every generating curve closes at the apex") {
    for (const ConvexBody& body : {ConvexBody::ellipse(2, 1), ConvexBody::make(1, {0.25}, {0.0, 0.04})}) {
      const double area = polygon_area(body);
      for (double v : {0.0, 0.9, 2.5}) {
        const HeisenbergCurve c = lifted_boundary_curve(body, v, 4096);
        CHECK(c.front() == HeisenbergPoint{0, 0, 0});
        CHECK(std::abs(c.back().x) < 1e-6);
        CHECK(std::abs(c.back().y) < 1e-6);
        CHECK(std::abs(c.back().t - 2 * area) < 1e-6);
        CHECK(c.horizontality_residual() <= 1e-8);
      }
    }
  }

  TEST_CASE("wulff shapes") {
    const WulffShape d = wulff_shape(ConvexBody::disk(), 16, 1024);
    CHECK(d.apex.t == doctest::Approx(2 * pi).epsilon(1e-10));
    CHECK(d.max_apex_gap <= 1e-6);
    CHECK(d.max_hk_gap <= 1e-4);
    const WulffShape e = wulff_shape(ConvexBody::ellipse(2, 1), 16, 4096);
    CHECK(e.apex.t == doctest::Approx(4 * pi).epsilon(1e-10));
    CHECK(e.max_apex_gap <= 1e-6);
    CHECK(e.max_hk_gap <= 1e-4);
    CHECK(e.max_horizontality <= 1e-8);
    CHECK(e.curves.size() == 16);

    const SurfaceMesh& m = e.mesh;
    CHECK(m.h_k.size() == m.vertices.size());
    CHECK(m.horizontality.size() == m.vertices.size());
    auto area3 = [&](std::size_t a, std::size_t b, std::size_t c) {
      const auto& p = m.vertices[a];
      const auto& q = m.vertices[b];
      const auto& r = m.vertices[c];
      const double ux = q.x - p.x, uy = q.y - p.y, ut = q.t - p.t;
      const double vx = r.x - p.x, vy = r.y - p.y, vt = r.t - p.t;
      return 0.5 * std::sqrt(std::pow(uy * vt - ut * vy, 2) + std::pow(ut * vx - ux * vt, 2) +
                             std::pow(ux * vy - uy * vx, 2));
    };
    for (const auto& q : m.quads) {
      for (std::size_t i : q) CHECK(i < m.vertices.size());
      CHECK(area3(q[0], q[1], q[2]) + area3(q[0], q[2], q[3]) > 1e-14);
    }
    for (const auto& t : m.triangles) {
      for (std::size_t i : t) CHECK(i < m.vertices.size());
      CHECK(area3(t[0], t[1], t[2]) > 1e-14);
    }
    CHECK(kind_of([] { wulff_shape(ConvexBody::disk(), 4, 1024); }) == ErrorKind::InvalidArgument);
  }

  TEST_CASE("prescribed curves") {
    const ConvexBody disk = ConvexBody::disk();
    const PrescribedCurve line = prescribed_curve(disk, [](double) { return 0.0; }, 0.5, 1.0, 2.0, 0.3, {-1, 1}, 1e-3);
    CHECK(line.curve.horizontality_residual() <= 1e-8);
    for (const auto& p : line.curve.points()) {
      CHECK(std::abs(p.y - (1.0 + 0.3 * (p.x - 0.5))) < 1e-12);
      // t' = y - x m integrates to t0 + (1 - 0.15)(x - x0) with the xy terms cancelling.
      CHECK(std::abs(p.t - (2.0 + (1.0 - 0.3 * 0.5) * (p.x - 0.5))) < 1e-12);
    }

    const PrescribedCurve arc = prescribed_curve(disk, [](double) { return 1.0; }, 0, 0, 0, 0.0, {-0.9, 0.9}, 1e-3);
    CHECK(arc.curve.horizontality_residual() <= 1e-8);
    const HeisenbergCurve gamma = lifted_boundary_curve(disk, 0.0, 8193);
    const auto gx = gamma.xs(), gy = gamma.ys(), gt = gamma.ts();
    const HeisenbergPoint shift{0, 2, -pi};
    for (const auto& p : arc.curve.points()) {
      // sigma = +1: the projection is the lower arc y = 1 - sqrt(1 - x^2).
      CHECK(std::abs(p.y - (1 - std::sqrt(1 - p.x * p.x))) < 1e-9);
      const double s = pi - std::asin(p.x);
      const HeisenbergPoint q = left_translate(
          shift, {interpolate_cubic(gamma.params(), gx, s), interpolate_cubic(gamma.params(), gy, s),
                  interpolate_cubic(gamma.params(), gt, s)});
      CHECK(std::abs(q.x - p.x) < 1e-8);
      CHECK(std::abs(q.y - p.y) < 1e-8);
      CHECK(std::abs(q.t - p.t) < 1e-8);
    }
    CHECK_THROWS_AS(prescribed_curve(disk, [](double) { return 1.0; }, 0, 0, 0, 0.0, {-1.5, 1.5}, 1e-3),
                    RangeEscapeError);
  }

  TEST_CASE("plane-like synthesis") {
    Transversal tr;
    tr.a = 0.0;
    tr.t_range = {-2.0, 2.0};
    tr.n_leaves = 401;
    tr.u = [](double) { return 0.2; };
    tr.g = [](double) { return 0.5; };
    PatchOptions po;
    po.domain = {-0.5, 0.5, -0.5, 0.5};
    po.nx = po.nt = 101;
    const ScalarField zero = [](double, double) { return 0.0; };
    const SynthesizedPatch p = synthesize_graph_patch(ConvexBody::disk(), zero, tr, po);
    for (double x : {-0.5, -0.1, 0.3, 0.5}) {
      for (double t : {-0.5, 0.0, 0.4}) CHECK(std::abs(p.field.value(x, t) - (0.2 + 0.5 * x)) < 1e-12);
    }
    const auto battery = bump_battery(p.field.domain(), p.field.support_margin());
    CHECK(criticality_residual(p.field, zero, ConvexBody::disk(), battery) <= 1e-10);
  }

  TEST_CASE("synthesis reconstructs a slice of the Pansu sphere") {
    const double tc = pi;
    Transversal tr;
    tr.a = 0.0;
    // Leaves drift by about 4 in t per unit of x near the equator.
    tr.t_range = {tc - 1.9, tc + 1.9};
    tr.n_leaves = 1521;
    tr.u = [](double t) { return -pansu_radius(t); };
    tr.g = [](double t) { return 1.0 / std::tan(s_of_height(t) / 2); };
    PatchOptions po;
    po.domain = {-0.3, 0.3, tc - 0.5, tc + 0.5};
    po.nx = 121;
    po.nt = 201;
    const SynthesizedPatch p = synthesize_graph_patch(ConvexBody::disk(), [](double, double) { return 1.0; }, tr, po);
    // The oracle's own slope at the transversal must match the data we fed in.
    const double h = 1e-6;
    const double ux = (pansu_u(h, 3.3) - pansu_u(-h, 3.3)) / (2 * h);
    const double ut = (pansu_u(0, 3.3 + h) - pansu_u(0, 3.3 - h)) / (2 * h);
    CHECK(ux + 2 * pansu_u(0, 3.3) * ut == doctest::Approx(tr.g(3.3)).epsilon(1e-6));
    double err = 0.0;
    for (std::size_t it = 0; it < po.nt; it += 4) {
      for (std::size_t ix = 0; ix < po.nx; ix += 4) {
        const double x = po.domain.x0 + ix * p.field.dx();
        const double t = po.domain.t0 + it * p.field.dt();
        err = std::max(err, std::abs(p.field.value(x, t) - pansu_u(x, t)));
      }
    }
    CHECK(err <= 1e-4);
  }

  TEST_CASE("synthesis errors") {
    Transversal tr;
    tr.a = 0.0;
    tr.t_range = {-0.1, 0.1};
    tr.n_leaves = 21;
    tr.u = [](double) { return 0.0; };
    tr.g = [](double) { return 0.0; };
    PatchOptions po;
    po.domain = {-0.5, 0.5, -0.5, 0.5};
    po.nx = po.nt = 51;
    const ScalarField zero = [](double, double) { return 0.0; };
    CHECK(kind_of([&] { synthesize_graph_patch(ConvexBody::disk(), zero, tr, po); }) == ErrorKind::CoverageGap);
    tr.t_range = {-1, 1};
    tr.n_leaves = 201;
    tr.g = [](double) { return 0.9; };
    const ScalarField big = [](double, double) { return 5.0; };
    CHECK_THROWS_AS(synthesize_graph_patch(ConvexBody::disk(), big, tr, po), RangeEscapeError);
  }
}
