#include "subfinsler/pansu_wulff.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "subfinsler/curvature.hpp"
#include "subfinsler/errors.hpp"
#include "subfinsler/numerics.hpp"

namespace subfinsler {

double ClockwiseBoundary::theta(double s) const {
  // arc_length(pi/2) - arc_length(theta) = s, with arc_length increasing at rate rho.
  const double top = std::numbers::pi / 2;
  const double target = body_.arc_length(top) - s;
  const double P = period();
  double th = top - 2.0 * std::numbers::pi * s / P;
  double lo = th - 2.0 * std::numbers::pi, hi = th + 2.0 * std::numbers::pi;
  for (int it = 0; it < 100; ++it) {
    const double r = body_.arc_length(th) - target;
    if (r > 0) hi = std::min(hi, th); else lo = std::max(lo, th);
    const double step = r / body_.radius_of_curvature(th);
    double next = th - step;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - th) <= 1e-15 * (1.0 + std::abs(th))) return next;
    th = next;
  }
  return th;
}

Vec2 ClockwiseBoundary::point(double s) const { return body_.boundary_point(theta(s)); }

Vec2 ClockwiseBoundary::velocity(double s) const {
  const double th = theta(s);
  return {std::sin(th), -std::cos(th)};
}

HeisenbergCurve lifted_boundary_curve(const ConvexBody& body, double v, std::size_t n_samples) {
  if (n_samples < 5) throw Error(ErrorKind::TooFewSamples, "lifted boundary curve needs 5 samples");
  const ClockwiseBoundary gamma(body);
  const double P = gamma.period();
  const Vec2 base = gamma.point(v);
  PlanarCurve c;
  c.params.resize(n_samples);
  c.x.resize(n_samples);
  c.y.resize(n_samples);
  c.dx.emplace(n_samples);
  c.dy.emplace(n_samples);
  for (std::size_t i = 0; i < n_samples; ++i) {
    const double s = P * static_cast<double>(i) / static_cast<double>(n_samples - 1);
    const double th = gamma.theta(s + v);
    const Vec2 p = body.boundary_point(th) - base;
    c.params[i] = s;
    c.x[i] = p.x;
    c.y[i] = p.y;
    (*c.dx)[i] = std::sin(th);
    (*c.dy)[i] = -std::cos(th);
  }
  // The loop closes exactly; remove the rounding of the final point.
  c.x.front() = c.y.front() = 0.0;
  c.x.back() = c.y.back() = 0.0;
  return horizontal_lift(c, 0.0);
}

namespace {

double triangle_area(const HeisenbergPoint& a, const HeisenbergPoint& b, const HeisenbergPoint& c) {
  const double ux = b.x - a.x, uy = b.y - a.y, ut = b.t - a.t;
  const double vx = c.x - a.x, vy = c.y - a.y, vt = c.t - a.t;
  const double cx = uy * vt - ut * vy, cy = ut * vx - ux * vt, cz = ux * vy - uy * vx;
  return 0.5 * std::sqrt(cx * cx + cy * cy + cz * cz);
}

constexpr double kMinFaceArea = 1e-14;

}  // namespace

WulffShape wulff_shape(const ConvexBody& body, std::size_t n_curves, std::size_t n_samples) {
  if (n_curves < 8 || n_samples < 64) {
    throw Error(ErrorKind::InvalidArgument, "wulff shape needs at least 8 curves of 64 samples");
  }
  WulffShape shape;
  shape.period = body.perimeter();
  shape.apex = {0.0, 0.0, 2.0 * body.area()};
  shape.offsets.resize(n_curves);
  shape.curves.resize(n_curves);
  std::vector<std::vector<double>> hk(n_curves), horiz(n_curves);
  for (std::size_t j = 0; j < n_curves; ++j) {
    shape.offsets[j] = shape.period * static_cast<double>(j) / static_cast<double>(n_curves);
  }
  parallel_for(n_curves, [&](std::size_t j) {
    shape.curves[j] = lifted_boundary_curve(body, shape.offsets[j], n_samples);
    hk[j] = h_k_along(body, FramedCurve::from_velocity(shape.curves[j], -1.0)).values;
    horiz[j] = shape.curves[j].horizontality_profile();
  });
  for (std::size_t j = 0; j < n_curves; ++j) {
    const HeisenbergPoint& end = shape.curves[j].back();
    shape.max_apex_gap = std::max(
        shape.max_apex_gap, std::sqrt(end.x * end.x + end.y * end.y +
                                      (end.t - shape.apex.t) * (end.t - shape.apex.t)));
    for (double h : hk[j]) shape.max_hk_gap = std::max(shape.max_hk_gap, std::abs(h - 1.0));
    shape.max_horizontality = std::max(shape.max_horizontality, shape.curves[j].horizontality_residual());
  }

  // Vertex 0 is the welded start (origin), vertex 1 the welded apex; interior
  // samples of curve j follow.
  SurfaceMesh& mesh = shape.mesh;
  const std::size_t inner = n_samples - 2;
  mesh.vertices.reserve(2 + n_curves * inner);
  mesh.vertices.push_back({0.0, 0.0, 0.0});
  mesh.vertices.push_back(shape.apex);
  mesh.h_k = {hk[0].front(), hk[0].back()};
  mesh.horizontality = {horiz[0].front(), horiz[0].back()};
  for (std::size_t j = 0; j < n_curves; ++j) {
    const auto pts = shape.curves[j].points();
    for (std::size_t i = 1; i + 1 < n_samples; ++i) {
      mesh.vertices.push_back(pts[i]);
      mesh.h_k.push_back(hk[j][i]);
      mesh.horizontality.push_back(horiz[j][i]);
    }
  }
  auto vid = [&](std::size_t j, std::size_t i) {
    if (i == 0) return std::size_t{0};
    if (i == n_samples - 1) return std::size_t{1};
    return 2 + (j % n_curves) * inner + (i - 1);
  };
  const auto& V = mesh.vertices;
  for (std::size_t j = 0; j < n_curves; ++j) {
    for (std::size_t i = 0; i + 1 < n_samples; ++i) {
      const std::size_t a = vid(j, i), b = vid(j, i + 1), c = vid(j + 1, i + 1), d = vid(j + 1, i);
      if (i == 0 || i + 2 == n_samples) {
        const std::array<std::size_t, 3> tri = i == 0 ? std::array<std::size_t, 3>{a, b, c}
                                                      : std::array<std::size_t, 3>{a, b, d};
        if (triangle_area(V[tri[0]], V[tri[1]], V[tri[2]]) > kMinFaceArea) {
          mesh.triangles.push_back(tri);
        } else {
          ++mesh.dropped_faces;
        }
        continue;
      }
      if (triangle_area(V[a], V[b], V[c]) + triangle_area(V[a], V[c], V[d]) > kMinFaceArea) {
        mesh.quads.push_back({a, b, c, d});
      } else {
        ++mesh.dropped_faces;
      }
    }
  }
  return shape;
}

PrescribedCurve prescribed_curve(const ConvexBody& body, const CurveFunction& f, double x0,
                                 double y0, double t0, double g0, Span span, double step) {
  PrescribedCurve out;
  out.profile = reconstruct_slope(body, f, g0, x0, span, step);
  const auto& x = out.profile.params;
  const auto& g = out.profile.g;
  const std::size_t n = x.size();
  const std::size_t ia = static_cast<std::size_t>(std::lower_bound(x.begin(), x.end(), x0) - x.begin());
  const std::vector<double> cy = cumulative_integral(x, g);
  std::vector<double> y(n), tp(n);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = y0 + (cy[i] - cy[ia]);
    tp[i] = y[i] - x[i] * g[i];
  }
  const std::vector<double> ct = cumulative_integral(x, tp);
  std::vector<HeisenbergPoint> pts(n);
  for (std::size_t i = 0; i < n; ++i) pts[i] = {x[i], y[i], t0 + (ct[i] - ct[ia])};
  out.curve = HeisenbergCurve(x, std::move(pts));
  return out;
}

namespace {

struct LeafState {
  double y, m, tau;
};

}  // namespace

SynthesizedPatch synthesize_graph_patch(const ConvexBody& body, const ScalarField& f,
                                        const Transversal& tr, const PatchOptions& opts) {
  const Domain& d = opts.domain;
  if (opts.nx < 3 || opts.nt < 3) throw Error(ErrorKind::InvalidArgument, "lattice needs 3x3 nodes");
  if (tr.n_leaves < 2 || !(tr.t_range.hi > tr.t_range.lo)) {
    throw Error(ErrorKind::InvalidArgument, "transversal needs at least two leaves");
  }
  const double dx = d.width() / static_cast<double>(opts.nx - 1);
  const double dt = d.height() / static_cast<double>(opts.nt - 1);
  const double col = (tr.a - d.x0) / dx;
  const long ia_l = std::lround(col);
  if (std::abs(col - static_cast<double>(ia_l)) > 1e-9 || ia_l < 0 ||
      ia_l >= static_cast<long>(opts.nx)) {
    throw Error(ErrorKind::InvalidArgument, "transversal x = a must be a lattice column");
  }
  const std::size_t ia = static_cast<std::size_t>(ia_l);
  const std::size_t sub = static_cast<std::size_t>(std::max(1.0, std::ceil(dx / opts.step - 1e-9)));
  const double h = dx / static_cast<double>(sub);
  const std::size_t n_samples = (opts.nx - 1) * sub + 1;
  const std::size_t i0 = ia * sub;  // sample index of the transversal
  std::vector<double> xi(n_samples);
  for (std::size_t i = 0; i < n_samples; ++i) {
    // Lattice columns are hit exactly.
    xi[i] = i % sub == 0 ? d.x0 + dx * static_cast<double>(i / sub) : d.x0 + h * static_cast<double>(i);
  }
  const auto [mlo, mhi] = body.F_range();

  std::vector<Leaf> leaves(tr.n_leaves);
  const double db = (tr.t_range.hi - tr.t_range.lo) / static_cast<double>(tr.n_leaves - 1);
  parallel_for(tr.n_leaves, [&](std::size_t k) {
    const double b = tr.t_range.lo + db * static_cast<double>(k);
    std::vector<LeafState> st(n_samples);
    st[i0] = {tr.u(b), body.F_value(tr.g(b)), b};
    auto rhs = [&](double x, const LeafState& s) {
      if (!(s.m > mlo && s.m < mhi)) {
        throw RangeEscapeError(x, "M leaves the range of F at xi = " + std::to_string(x) +
                                      " on the leaf through t = " + std::to_string(b));
      }
      return LeafState{body.F_inverse(s.m), f(x, s.tau), 2.0 * s.y};
    };
    auto step = [&](double x, const LeafState& s, double hh) {
      const LeafState k1 = rhs(x, s);
      const LeafState k2 = rhs(x + 0.5 * hh, {s.y + 0.5 * hh * k1.y, s.m + 0.5 * hh * k1.m, s.tau + 0.5 * hh * k1.tau});
      const LeafState k3 = rhs(x + 0.5 * hh, {s.y + 0.5 * hh * k2.y, s.m + 0.5 * hh * k2.m, s.tau + 0.5 * hh * k2.tau});
      const LeafState k4 = rhs(x + hh, {s.y + hh * k3.y, s.m + hh * k3.m, s.tau + hh * k3.tau});
      return LeafState{s.y + hh * (k1.y + 2 * k2.y + 2 * k3.y + k4.y) / 6.0,
                       s.m + hh * (k1.m + 2 * k2.m + 2 * k3.m + k4.m) / 6.0,
                       s.tau + hh * (k1.tau + 2 * k2.tau + 2 * k3.tau + k4.tau) / 6.0};
    };
    for (std::size_t i = i0; i + 1 < n_samples; ++i) st[i + 1] = step(xi[i], st[i], xi[i + 1] - xi[i]);
    for (std::size_t i = i0; i > 0; --i) st[i - 1] = step(xi[i], st[i], xi[i - 1] - xi[i]);

    Leaf& leaf = leaves[k];
    leaf.a = tr.a;
    leaf.b = b;
    leaf.xi = xi;
    leaf.t.resize(n_samples);
    leaf.u.resize(n_samples);
    leaf.g.resize(n_samples);
    std::vector<HeisenbergPoint> pts(n_samples);
    for (std::size_t i = 0; i < n_samples; ++i) {
      if (!(st[i].m > mlo && st[i].m < mhi)) {
        throw RangeEscapeError(xi[i], "M leaves the range of F at xi = " + std::to_string(xi[i]));
      }
      leaf.t[i] = st[i].tau;
      leaf.u[i] = st[i].y;
      leaf.g[i] = body.F_inverse(st[i].m);
      leaf.exited_domain = leaf.exited_domain || !d.contains(xi[i], st[i].tau);
      pts[i] = {xi[i], st[i].y, st[i].tau - xi[i] * st[i].y};
    }
    leaf.lifted = HeisenbergCurve(xi, std::move(pts));
  });

  std::vector<double> values(opts.nx * opts.nt);
  for (std::size_t ix = 0; ix < opts.nx; ++ix) {
    const std::size_t s = ix * sub;
    for (std::size_t k = 0; k + 1 < tr.n_leaves; ++k) {
      const double gap = leaves[k + 1].t[s] - leaves[k].t[s];
      if (!(gap > 0.0)) {
        throw Error(ErrorKind::LeafCrossing, "leaves " + std::to_string(k) + " and " +
                                                 std::to_string(k + 1) + " cross at x = " +
                                                 std::to_string(xi[s]));
      }
    }
    std::size_t k = 0;
    for (std::size_t it = 0; it < opts.nt; ++it) {
      const double t = d.t0 + dt * static_cast<double>(it);
      if (t < leaves.front().t[s] || t > leaves.back().t[s]) {
        throw Error(ErrorKind::CoverageGap, "no leaf covers (" + std::to_string(xi[s]) + ", " +
                                                std::to_string(t) + "); widen the transversal");
      }
      while (k + 2 < tr.n_leaves && leaves[k + 1].t[s] < t) ++k;
      const Leaf& lo = leaves[k];
      const Leaf& hi = leaves[k + 1];
      const double gap = hi.t[s] - lo.t[s];
      if (gap > opts.max_gap_cells * dt) {
        throw Error(ErrorKind::CoverageGap, "leaves are " + std::to_string(gap / dt) +
                                                " cells apart near (" + std::to_string(xi[s]) +
                                                ", " + std::to_string(t) + ")");
      }
      const double w = (t - lo.t[s]) / gap;
      values[it * opts.nx + ix] = (1.0 - w) * lo.u[s] + w * hi.u[s];
    }
  }
  GraphField field = GraphField::grid(d, opts.nx, opts.nt, std::move(values));
  return SynthesizedPatch{std::move(field), std::move(leaves)};
}

}  // namespace subfinsler
