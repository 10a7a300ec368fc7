#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "subfinsler/errors.hpp"
#include "subfinsler/heisenberg.hpp"

using namespace subfinsler;
using std::numbers::pi;

namespace {

HeisenbergPoint random_point(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-5, 5);
  return {u(rng), u(rng), u(rng)};
}

// Lie bracket of frame vector fields by the coordinate formula [A,B] = DB.A - DA.B.
Vec3 bracket(Frame a, Frame b, const HeisenbergPoint& p) {
  const double h = 1e-6;
  auto deriv = [&](Frame field, const Vec3& dir) {
    const HeisenbergPoint q1{p.x + h * dir.x, p.y + h * dir.y, p.t + h * dir.t};
    const HeisenbergPoint q0{p.x - h * dir.x, p.y - h * dir.y, p.t - h * dir.t};
    const Vec3 v1 = frame_vector(field, q1), v0 = frame_vector(field, q0);
    return Vec3{(v1.x - v0.x) / (2 * h), (v1.y - v0.y) / (2 * h), (v1.t - v0.t) / (2 * h)};
  };
  const Vec3 ab = deriv(b, frame_vector(a, p));
  const Vec3 ba = deriv(a, frame_vector(b, p));
  return {ab.x - ba.x, ab.y - ba.y, ab.t - ba.t};
}

}  // namespace

TEST_SUITE("heisenberg_core") {
  TEST_CASE("group product examples") {
    CHECK(group_product({0, 0, 0}, {2, 3, 4}) == HeisenbergPoint{2, 3, 4});
    CHECK(group_product({1, 0, 0}, {0, 1, 0}) == HeisenbergPoint{1, 1, -1});
    CHECK(group_product({0, 1, 0}, {1, 0, 0}) == HeisenbergPoint{1, 1, 1});
    const HeisenbergPoint p{1.5, -2, 0.25};
    CHECK(group_product(p, group_inverse(p)) == HeisenbergPoint{0, 0, 0});
  }

  TEST_CASE("associativity on random triples") {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 1000; ++i) {
      const auto p = random_point(rng), q = random_point(rng), r = random_point(rng);
      const auto a = group_product(group_product(p, q), r);
      const auto b = group_product(p, group_product(q, r));
      CHECK(std::abs(a.x - b.x) < 1e-12);
      CHECK(std::abs(a.y - b.y) < 1e-12);
      CHECK(std::abs(a.t - b.t) < 1e-12 * (1 + std::abs(a.t)));
    }
  }

  TEST_CASE("frame examples and left invariance") {
    CHECK(frame_vector(Frame::X, {0, 0, 0}) == Vec3{1, 0, 0});
    CHECK(frame_vector(Frame::X, {0, 3, 0}) == Vec3{1, 0, 3});
    CHECK(frame_vector(Frame::Y, {2, 0, 0}) == Vec3{0, 1, -2});
    std::mt19937_64 rng(6);
    for (int i = 0; i < 1000; ++i) {
      const auto p = random_point(rng);
      for (Frame f : {Frame::X, Frame::Y, Frame::T}) {
        CHECK(left_translate_vector(p, frame_vector(f, {0, 0, 0})) == frame_vector(f, p));
      }
      CHECK(contact_form(p, frame_vector(Frame::X, p)) == 0.0);
      CHECK(contact_form(p, frame_vector(Frame::Y, p)) == 0.0);
      CHECK(contact_form(p, frame_vector(Frame::T, p)) == 1.0);
    }
  }

  TEST_CASE("left translation differential matches finite differences of L_p") {
    std::mt19937_64 rng(8);
    for (int i = 0; i < 50; ++i) {
      const auto p = random_point(rng), q = random_point(rng);
      const Vec3 v{0.3, -1.1, 0.7};
      const double h = 1e-6;
      const auto a = left_translate(p, {q.x + h * v.x, q.y + h * v.y, q.t + h * v.t});
      const auto b = left_translate(p, {q.x - h * v.x, q.y - h * v.y, q.t - h * v.t});
      const Vec3 dl = left_translate_vector(p, v);
      CHECK(std::abs((a.t - b.t) / (2 * h) - dl.t) < 1e-7);
    }
  }

  TEST_CASE("J is a rotation by a quarter turn") {
    const HorizontalVector v{{1, 2, 3}, 0.6, -0.8};
    const HorizontalVector jj = v.rotated().rotated();
    CHECK(jj.f == -v.f);
    CHECK(jj.g == -v.g);
    CHECK(v.rotated().f == 0.8);
    CHECK(v.rotated().g == 0.6);
    CHECK(contact_form(v.base, v.coordinates()) == doctest::Approx(0.0));
  }

  TEST_CASE("connection table is torsion-consistent with the brackets") {
    // Levi-Civita is torsion free: D_A B - D_B A = [A, B]. With [X,Y] = -2T
    // this also checks the frame conventions.
    const HeisenbergPoint p{0.4, -0.9, 2.0};
    const Frame all[] = {Frame::X, Frame::Y, Frame::T};
    for (Frame a : all) {
      for (Frame b : all) {
        const auto dab = levi_civita(a, b), dba = levi_civita(b, a);
        const Vec3 br = bracket(a, b, p);
        // Express [A,B] in the frame: coordinates (c_x, c_y, c_t) = c_x X + c_y Y + c_T T
        // with c_T = omega([A,B]).
        const double cx = br.x, cy = br.y, ct = contact_form(p, br);
        CHECK(std::abs(dab[0] - dba[0] - cx) < 1e-8);
        CHECK(std::abs(dab[1] - dba[1] - cy) < 1e-8);
        CHECK(std::abs(dab[2] - dba[2] - ct) < 1e-8);
      }
    }
    const Vec3 xy = bracket(Frame::X, Frame::Y, p);
    CHECK(contact_form(p, xy) == doctest::Approx(-2.0));
  }

  TEST_CASE("connection table is metric") {
    // <D_A B, C> + <B, D_A C> = 0 for an orthonormal frame.
    const Frame all[] = {Frame::X, Frame::Y, Frame::T};
    for (Frame a : all) {
      for (Frame b : all) {
        for (Frame c : all) {
          const double lhs = levi_civita(a, b)[static_cast<int>(c)] + levi_civita(a, c)[static_cast<int>(b)];
          CHECK(lhs == 0.0);
        }
      }
    }
  }

  TEST_CASE("horizontal lift examples") {
    {
      std::vector<double> s;
      PlanarCurve seg;
      for (int i = 0; i <= 100; ++i) {
        seg.params.push_back(0.01 * i);
        seg.x.push_back(0.01 * i);
        seg.y.push_back(0.0);
      }
      const HeisenbergCurve c = horizontal_lift(seg, 0.0);
      for (const auto& p : c.points()) CHECK(p.t == 0.0);
    }
    {
      PlanarCurve circle;
      const int n = 2001;
      for (int i = 0; i < n; ++i) {
        const double s = 2 * pi * i / (n - 1);
        circle.params.push_back(s);
        circle.x.push_back(std::sin(s));
        circle.y.push_back(std::cos(s) - 1);
      }
      const HeisenbergCurve c = horizontal_lift(circle, 0.0);
      double err = 0.0;
      for (std::size_t i = 0; i < c.size(); ++i) {
        const double s = c.params()[i];
        err = std::max(err, std::abs(c.points()[i].t - (s - std::sin(s))));
      }
      CHECK(err < 1e-10);
      CHECK(c.horizontality_residual() < 1e-9);
    }
    PlanarCurve bad{{0, 1, 1, 2}, {0, 0, 0, 0}, {0, 0, 0, 0}, {}, {}};
    CHECK_THROWS_AS(horizontal_lift(bad, 0.0), Error);
  }

  TEST_CASE("closed clockwise loops gain twice their area") {
    // Clockwise ellipse x = 2 sin s, y = cos s + 0.3 shifted off the origin: area 2 pi.
    PlanarCurve loop;
    const int n = 10000;
    for (int i = 0; i < n; ++i) {
      const double s = 2 * pi * i / (n - 1);
      loop.params.push_back(s);
      loop.x.push_back(2 * std::sin(s) + 0.5);
      loop.y.push_back(std::cos(s) + 0.3);
    }
    const HeisenbergCurve c = horizontal_lift(loop, 1.0);
    const double gain = c.back().t - c.front().t;
    CHECK(std::abs(gain - 4 * pi) / (4 * pi) < 1e-6);
  }

  TEST_CASE("covariant derivative of horizontal fields") {
    PlanarCurve line;
    for (int i = 0; i <= 200; ++i) {
      line.params.push_back(0.01 * i);
      line.x.push_back(std::cos(0.01 * i));
      line.y.push_back(std::sin(0.01 * i));
    }
    const HeisenbergCurve c = horizontal_lift(line, 0.0);
    std::vector<Vec2> constant(c.size(), Vec2{1, 0});
    for (const Vec2& d : covariant_derivative_horizontal(c, constant)) {
      CHECK(d.x == doctest::Approx(0.0));
      CHECK(d.y == doctest::Approx(0.0));
    }
    std::vector<Vec2> rot, jrot;
    for (double s : c.params()) {
      rot.push_back({std::cos(s), std::sin(s)});
      jrot.push_back({-std::sin(s), std::cos(s)});
    }
    const auto d = covariant_derivative_horizontal(c, rot);
    const auto dj = covariant_derivative_horizontal(c, jrot);
    double err = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
      const double s = c.params()[i];
      err = std::max(err, std::hypot(d[i].x + std::sin(s), d[i].y - std::cos(s)));
      // J commutes with the derivative.
      CHECK(std::abs(dj[i].x + d[i].y) < 1e-14);
      CHECK(std::abs(dj[i].y - d[i].x) < 1e-14);
    }
    CHECK(err < 1e-8);

    HeisenbergCurve tiny({0, 1, 2, 3}, {{0, 0, 0}, {1, 0, 0}, {2, 0, 0}, {3, 0, 0}});
    std::vector<Vec2> f(4, Vec2{1, 0});
    CHECK_THROWS_AS(covariant_derivative_horizontal(tiny, f), Error);
  }

  TEST_CASE("curve utilities") {
    PlanarCurve circle;
    const int n = 801;
    for (int i = 0; i < n; ++i) {
      // Non-uniform parameter: s = u + 0.2 sin u.
      const double u = 2 * pi * i / (n - 1);
      const double s = u + 0.2 * std::sin(u);
      circle.params.push_back(u);
      circle.x.push_back(std::sin(s));
      circle.y.push_back(std::cos(s) - 1);
    }
    const HeisenbergCurve c = horizontal_lift(circle, 0.0);
    const HeisenbergCurve a = reparameterize_arclength(c, 401);
    CHECK(a.size() == 401);
    CHECK(a.params().back() - a.params().front() == doctest::Approx(2 * pi).epsilon(1e-8));
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double s = a.params()[i];
      CHECK(std::abs(a.points()[i].t - (s - std::sin(s))) < 1e-6);
    }
    const HeisenbergCurve r = c.reversed();
    CHECK(r.front() == c.back());
    const HeisenbergPoint p{1, 2, 3};
    const HeisenbergCurve tr = c.translated(p);
    CHECK(tr.points()[5] == left_translate(p, c.points()[5]));
    CHECK(tr.horizontality_residual() < 1e-6);
    CHECK_THROWS_AS(HeisenbergCurve({0, 0}, {{0, 0, 0}, {1, 0, 0}}), Error);
  }
}
