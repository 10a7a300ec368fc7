#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <vector>

#include "subfinsler/characteristic_flow.hpp"
#include "subfinsler/convex_body.hpp"
#include "subfinsler/graph_field.hpp"
#include "subfinsler/heisenberg.hpp"
#include "subfinsler/intrinsic_graph.hpp"

namespace subfinsler {

/// Clockwise unit-speed parameterization gamma(s) of the boundary of K with
/// gamma(0) the top point p(pi/2). The outer normal at gamma(s) is
/// u(theta(s)) where theta decreases from pi/2 and gamma'(s) = (sin theta, -cos theta).
class ClockwiseBoundary {
 public:
  explicit ClockwiseBoundary(const ConvexBody& body) : body_(body) {}
  double period() const { return body_.perimeter(); }
  /// Normal angle reached after arc length s (any real s).
  double theta(double s) const;
  Vec2 point(double s) const;
  Vec2 velocity(double s) const;

 private:
  const ConvexBody& body_;
};

/// Horizontal lift of s -> gamma(s + v) - gamma(v), s in [0, P], on n_samples
/// uniform samples; starts at the origin and ends at (0, 0, 2 area(K)).
HeisenbergCurve lifted_boundary_curve(const ConvexBody& body, double v, std::size_t n_samples);

struct SurfaceMesh {
  std::vector<HeisenbergPoint> vertices;
  std::vector<std::array<std::size_t, 4>> quads;
  std::vector<std::array<std::size_t, 3>> triangles;
  std::vector<double> h_k;            // per vertex
  std::vector<double> horizontality;  // per vertex
  std::size_t dropped_faces = 0;      // zero-area faces removed at the poles
};

struct WulffShape {
  double period = 0.0;
  HeisenbergPoint apex;
  std::vector<double> offsets;  // v of each generating curve
  std::vector<HeisenbergCurve> curves;
  SurfaceMesh mesh;
  double max_apex_gap = 0.0;         // max_v |Gamma_v(P) - apex|
  double max_hk_gap = 0.0;           // max |H_K - 1| over all curves
  double max_horizontality = 0.0;
};

/// Requires n_curves >= 8 and n_samples >= 64.
WulffShape wulff_shape(const ConvexBody& body, std::size_t n_curves, std::size_t n_samples);

struct PrescribedCurve {
  HeisenbergCurve curve;  // parameterized by x
  SlopeProfile profile;
};

/// Integrates (x', y', t') = (1, g(x), y - x g(x)) through (x0, y0, t0) with
/// g from reconstruct_slope anchored at x0. Throws RangeEscapeError.
PrescribedCurve prescribed_curve(const ConvexBody& body, const CurveFunction& f, double x0,
                                 double y0, double t0, double g0, Span span, double step);

/// Initial data of the leaves on the segment x = a.
struct Transversal {
  double a = 0.0;
  Span t_range;
  std::size_t n_leaves = 0;
  std::function<double(double t)> u;  // u(a, t)
  std::function<double(double t)> g;  // slope u_x + 2 u u_t at (a, t)
};

struct PatchOptions {
  Domain domain;
  std::size_t nx = 201;
  std::size_t nt = 201;
  /// Leaf step; rounded down to divide the lattice spacing.
  double step = 1e-3;
  /// Adjacent leaves may be at most this many lattice t-cells apart.
  double max_gap_cells = 2.0;
};

struct SynthesizedPatch {
  GraphField field;
  std::vector<Leaf> leaves;
};

/// Builds Gr(u) leaf by leaf: each leaf solves y' = F^{-1}(M), M' = f(xi, tau),
/// tau' = 2y from (u(a,b), F(g(a,b)), b), then u is scattered to the lattice by
/// linear interpolation in t between adjacent leaves. The transversal must sit
/// on a lattice column. Throws LeafCrossing, CoverageGap, RangeEscapeError.
SynthesizedPatch synthesize_graph_patch(const ConvexBody& body, const ScalarField& f,
                                        const Transversal& transversal, const PatchOptions& opts);

}  // namespace subfinsler
