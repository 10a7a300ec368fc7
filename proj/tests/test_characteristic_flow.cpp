#include <doctest.h>

#include <cmath>
#include <vector>

#include "subfinsler/characteristic_flow.hpp"
#include "subfinsler/numerics.hpp"
#include "test_support.hpp"

using namespace subfinsler;
using testing::affine_field;
using testing::kind_of;

namespace {

const Domain kBox{-1, 1, -2, 2};

GraphField smooth_field(const Domain& d) {
  return GraphField::analytic(d, [](double x, double t) {
    return FieldSample{0.3 * std::sin(x) + 0.2 * t * t, 0.3 * std::cos(x), 0.4 * t};
  });
}

}  // namespace

TEST_SUITE("characteristic_flow") {
  TEST_CASE("anchored grids are uniform on each side and hit the anchor") {
    const auto g = anchored_grid(0.3, {-1.0, 1.0}, 0.1);
    CHECK(g.front() == -1.0);
    CHECK(g.back() == 1.0);
    bool has_anchor = false;
    for (double x : g) has_anchor = has_anchor || x == 0.3;
    CHECK(has_anchor);
    for (std::size_t i = 1; i < g.size(); ++i) CHECK(g[i] - g[i - 1] <= 0.1 + 1e-12);
  }

  TEST_CASE("leaf examples") {
    const Leaf c = integrate_leaf(affine_field(kBox, 0.4, 0, 0), 0.0, 0.0, {-0.8, 0.8});
    for (std::size_t i = 0; i < c.xi.size(); ++i) CHECK(std::abs(c.t[i] - 0.8 * c.xi[i]) < 1e-13);
    const Leaf q = integrate_leaf(affine_field(kBox, 0, 1, 0), 0.0, 0.0, {-0.9, 0.9});
    for (std::size_t i = 0; i < q.xi.size(); ++i) CHECK(std::abs(q.t[i] - q.xi[i] * q.xi[i]) < 1e-13);
    const Leaf e = integrate_leaf(affine_field(Domain{-1, 1, 0, 10}, 0, 0, 1), 0.0, 1.0, {-1.0, 1.0});
    CHECK_FALSE(e.exited_domain);
    for (std::size_t i = 0; i < e.xi.size(); ++i) CHECK(std::abs(e.t[i] - std::exp(2 * e.xi[i])) < 1e-8);
  }

  TEST_CASE("leaf errors and early exit") {
    CHECK(kind_of([] { integrate_leaf(affine_field(kBox, 0, 0, 0), 0.0, 5.0, {-0.5, 0.5}); }) ==
          ErrorKind::StartOutOfDomain);
    const Leaf l = integrate_leaf(affine_field(kBox, 3.0, 0, 0), 0.0, 0.0, {-1.0, 1.0});
    CHECK(l.exited_domain);
    for (double t : l.t) CHECK(kBox.contains(0.0, t));
  }

  TEST_CASE("ODE residual is fourth order small") {
    const GraphField u = smooth_field(kBox);
    LeafOptions o;
    o.step = 1e-2;
    for (double b : {-1.0, 0.0, 0.7}) {
      const Leaf l = integrate_leaf(u, 0.1, b, {-0.9, 0.9}, o);
      CHECK(ode_residual(u, l) <= 10 * o.step * o.step);
    }
  }

  TEST_CASE("families of constant fields are shears") {
    const CharacteristicFamily fam = build_family(affine_field(kBox, 0.25, 0, 0), 0.0, 0.0, {-0.5, 0.5}, 11, {-0.5, 0.5});
    for (std::size_t k = 0; k < fam.eps.size(); ++k) {
      for (std::size_t i = 0; i < fam.xi.size(); ++i) {
        CHECK(std::abs(fam.t_at(k, i) - (fam.eps[k] + 0.5 * fam.xi[i])) < 1e-13);
        CHECK(std::abs(fam.jacobian_at(k, i) - 1.0) < 1e-10);
      }
    }
  }

  TEST_CASE("jacobian of u = t is exponential") {
    const CharacteristicFamily fam =
        build_family(affine_field(Domain{-1, 1, -1, 10}, 0, 0, 1), 0.0, 1.0, {-0.1, 0.1}, 21, {-0.5, 0.5});
    for (std::size_t k = 0; k < fam.eps.size(); ++k) {
      for (std::size_t i = 0; i < fam.xi.size(); ++i) {
        CHECK(std::abs(fam.jacobian_at(k, i) - std::exp(2 * fam.xi[i])) < 1e-6);
      }
    }
  }

  TEST_CASE("jacobian equals the exponential of the integrated t-derivative") {
    const GraphField u = smooth_field(kBox);
    const CharacteristicFamily fam = build_family(u, 0.0, 0.2, {-0.05, 0.05}, 41, {-0.8, 0.8});
    for (std::size_t k = 0; k < fam.leaves.size(); k += 10) {
      const Leaf& l = fam.leaves[k];
      std::vector<double> ut(l.xi.size());
      for (std::size_t i = 0; i < l.xi.size(); ++i) ut[i] = 2 * u.sample(l.xi[i], l.t[i]).ut;
      const auto integral = cumulative_integral(l.xi, ut);
      // Anchor the integral at xi = a.
      const double at_a = interpolate_cubic(l.xi, integral, 0.0);
      for (std::size_t i = 0; i < fam.xi.size(); ++i) {
        CHECK(fam.jacobian_at(k, i) > 0.0);
        const double expected = std::exp(integral[i] - at_a);
        CHECK(std::abs(fam.jacobian_at(k, i) - expected) < 1e-5);
      }
    }
  }

  TEST_CASE("family leaves are ordered") {
    const CharacteristicFamily fam = build_family(smooth_field(kBox), 0.0, 0.0, {-0.3, 0.3}, 31, {-0.8, 0.8});
    for (std::size_t k = 1; k < fam.eps.size(); ++k) {
      for (std::size_t i = 0; i < fam.xi.size(); ++i) CHECK(fam.t_at(k, i) > fam.t_at(k - 1, i));
    }
  }

  TEST_CASE("change of variables through the chart") {
    const TestField psi = TestField::bump(0.0, 0.0, 0.2, 0.1);
    {
      const auto fam = build_family(affine_field(kBox, 0, 0, 0), 0.0, 0.0, {-0.3, 0.3}, 61, {-0.4, 0.4});
      const auto cv = change_of_variables_check(fam, psi.scaled(1.0 / psi.exact_integral()));
      CHECK(cv.direct == doctest::Approx(1.0).epsilon(1e-6));
      CHECK(cv.pulled_back == doctest::Approx(1.0).epsilon(1e-6));
    }
    {
      const auto fam = build_family(affine_field(kBox, 0.3, 0, 0), 0.0, 0.0, {-0.6, 0.6}, 61, {-0.4, 0.4});
      const auto cv = change_of_variables_check(fam, psi);
      CHECK(std::abs(cv.direct - cv.pulled_back) < 1e-6);
    }
    {
      const auto fam =
          build_family(affine_field(Domain{-1, 1, -1, 5}, 0, 0, 1), 0.0, 1.0, {-0.4, 0.4}, 81, {-0.4, 0.4});
      const TestField bump = TestField::bump(0.0, 1.0, 0.1, 0.1);
      const auto cv = change_of_variables_check(fam, bump);
      CHECK(std::abs(cv.direct - cv.pulled_back) < 1e-4);
    }
    const auto small = build_family(affine_field(kBox, 0, 0, 0), 0.0, 0.0, {-0.05, 0.05}, 11, {-0.4, 0.4});
    CHECK(kind_of([&] { change_of_variables_check(small, psi); }) == ErrorKind::SupportOutsideChart);
  }

  TEST_CASE("M along leaves") {
    const ConvexBody disk = ConvexBody::disk();
    const Leaf c = integrate_leaf(affine_field(kBox, 0.3, 0, 0), 0.0, 0.0, {-0.5, 0.5});
    for (double m : m_along(c, disk).values) CHECK(m == 0.0);
    const Leaf l = integrate_leaf(affine_field(kBox, 0, 0.8, 0), 0.0, 0.0, {-0.5, 0.5});
    for (double m : m_along(l, disk).values) CHECK(m == doctest::Approx(0.8 / std::sqrt(1.64)));
  }

  TEST_CASE("estimate_f is exact on affine M and recovers synthesized curvature") {
    CurveScalar m;
    for (int i = 0; i <= 40; ++i) {
      m.params.push_back(0.05 * i);
      m.values.push_back(2.0);
    }
    for (double v : estimate_f(m).values) CHECK(std::abs(v) < 1e-12);
    for (std::size_t i = 0; i < m.params.size(); ++i) m.values[i] = m.params[i];
    for (std::size_t w : {2u, 7u, 10u}) {
      for (double v : estimate_f(m, w).values) CHECK(std::abs(v - 1.0) < 1e-12);
    }
    CurveScalar tiny{{0, 1, 2}, {0, 1, 2}};
    CHECK(kind_of([&] { estimate_f(tiny); }) == ErrorKind::TooFewSamples);

    // Leaves of the constant-curvature disk patch have dM/dxi = 1.
    const ConvexBody disk = ConvexBody::disk();
    const SynthesizedPatch& patch = testing::unit_patch();
    for (std::size_t k = 100; k < patch.leaves.size(); k += 200) {
      const FEstimate fe = estimate_f(m_along(patch.leaves[k], disk));
      for (double v : fe.values) CHECK(std::abs(v - 1.0) < 1e-3);
    }
  }

  TEST_CASE("regularity diagnostic") {
    const Leaf line = integrate_leaf(affine_field(kBox, 0.3, 0, 0), 0.0, 0.0, {-0.5, 0.5});
    CHECK(regularity_diagnostic(line).verdict == Regularity::C2Consistent);

    const SynthesizedPatch& patch = testing::unit_patch();
    for (std::size_t k = 50; k < patch.leaves.size(); k += 150) {
      CHECK(regularity_diagnostic(patch.leaves[k]).verdict == Regularity::C2Consistent);
    }

    std::vector<double> s;
    std::vector<HeisenbergPoint> pts;
    for (int i = -200; i <= 200; ++i) {
      const double x = i * 1e-3;
      s.push_back(x);
      pts.push_back({x, 0.1 * x, std::abs(x)});
    }
    const RegularityReport corner = regularity_diagnostic(HeisenbergCurve(s, pts));
    CHECK(corner.verdict == Regularity::C2Violation);
    REQUIRE(corner.quotients.size() == 3);
    CHECK(corner.quotients[0] > corner.quotients[1]);
    CHECK(std::string(to_string(Regularity::C2Violation)) == "C2_VIOLATION");

    HeisenbergCurve few({0, 1, 2, 3, 4}, {{0, 0, 0}, {1, 0, 0}, {2, 0, 0}, {3, 0, 0}, {4, 0, 0}});
    CHECK(kind_of([&] { regularity_diagnostic(few); }) == ErrorKind::TooFewSamples);
  }

  TEST_CASE("slope reconstruction") {
    const ConvexBody disk = ConvexBody::disk();
    const SlopeProfile flat = reconstruct_slope(disk, [](double) { return 0.0; }, 0.7, 0.0, {-1, 1}, 0.01);
    for (double g : flat.g) CHECK(g == doctest::Approx(0.7).epsilon(1e-12));

    const SlopeProfile p = reconstruct_slope(disk, [](double) { return 1.0; }, 0.0, 0.0, {-0.9, 0.9}, 1e-3);
    for (std::size_t i = 0; i < p.params.size(); ++i) {
      const double x = p.params[i];
      CHECK(std::abs(p.g[i] - x / std::sqrt(1 - x * x)) < 1e-9);
    }
    try {
      reconstruct_slope(disk, [](double) { return 1.0; }, 0.0, 0.0, {-2, 2}, 1e-3);
      FAIL("expected RangeEscape");
    } catch (const RangeEscapeError& e) {
      CHECK(e.kind() == ErrorKind::RangeEscape);
      CHECK(std::abs(std::abs(e.xi()) - 1.0) < 2e-3);
    }
    try {
      reconstruct_slope(disk, [](double) { return 1.0; }, 0.0, 0.0, {-0.5, 2}, 1e-3);
      FAIL("expected RangeEscape");
    } catch (const RangeEscapeError& e) {
      CHECK(e.xi() == doctest::Approx(1.0).epsilon(2e-3));
    }
  }
}
