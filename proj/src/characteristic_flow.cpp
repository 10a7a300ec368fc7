#include "subfinsler/characteristic_flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "subfinsler/errors.hpp"
#include "subfinsler/numerics.hpp"

namespace subfinsler {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::size_t side_steps(double length, double step) {
  if (length <= 0.0) return 0;
  return static_cast<std::size_t>(std::max(1.0, std::ceil(length / step - 1e-9)));
}

// Ascending grid; anchor_index receives the position of the anchor.
std::vector<double> build_grid(double anchor, Span span, double step, std::size_t& anchor_index) {
  if (!(step > 0.0)) throw Error(ErrorKind::InvalidArgument, "step must be positive");
  if (!(span.lo <= anchor && anchor <= span.hi)) {
    throw Error(ErrorKind::InvalidArgument, "anchor lies outside the span");
  }
  const std::size_t nb = side_steps(anchor - span.lo, step);
  const std::size_t nf = side_steps(span.hi - anchor, step);
  const double hb = nb ? (anchor - span.lo) / static_cast<double>(nb) : 0.0;
  const double hf = nf ? (span.hi - anchor) / static_cast<double>(nf) : 0.0;
  std::vector<double> grid;
  grid.reserve(nb + nf + 1);
  for (std::size_t k = nb; k > 0; --k) grid.push_back(anchor - hb * static_cast<double>(k));
  grid.push_back(anchor);
  for (std::size_t k = 1; k <= nf; ++k) grid.push_back(anchor + hf * static_cast<double>(k));
  anchor_index = nb;
  return grid;
}

struct Rhs {
  const GraphField& u;
  // Returns false when (xi, t) is outside the domain.
  bool operator()(double xi, double t, double& out) const {
    if (!u.domain().contains(xi, t)) return false;
    out = 2.0 * u.value(xi, t);
    return true;
  }
};

bool rk4_step(const Rhs& f, double xi, double t, double h, double& out) {
  double k1, k2, k3, k4;
  if (!f(xi, t, k1)) return false;
  if (!f(xi + 0.5 * h, t + 0.5 * h * k1, k2)) return false;
  if (!f(xi + 0.5 * h, t + 0.5 * h * k2, k3)) return false;
  if (!f(xi + h, t + h * k3, k4)) return false;
  out = t + h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
  return true;
}

bool heun_step(const Rhs& f, double xi, double t, double h, double& out) {
  double k1, k2;
  if (!f(xi, t, k1)) return false;
  if (!f(xi + h, t + h * k1, k2)) return false;
  out = t + 0.5 * h * (k1 + k2);
  return true;
}

// One output interval with recursive halving until the Richardson estimate
// |two half steps - one full step| / 3 is below tol.
bool heun_controlled(const Rhs& f, double xi, double t, double h, double tol, int depth,
                     double& out, double& err) {
  double full, mid, half;
  if (!heun_step(f, xi, t, h, full)) return false;
  if (!heun_step(f, xi, t, 0.5 * h, mid)) return false;
  if (!heun_step(f, xi + 0.5 * h, mid, 0.5 * h, half)) return false;
  const double est = std::abs(half - full) / 3.0;
  if (est <= tol || depth >= 24) {
    out = half;
    err += est;
    return true;
  }
  double m;
  if (!heun_controlled(f, xi, t, 0.5 * h, tol, depth + 1, m, err)) return false;
  return heun_controlled(f, xi + 0.5 * h, m, 0.5 * h, tol, depth + 1, out, err);
}

// Integrates from grid[from] towards grid[to] (either direction); returns the
// t values reached, stopping when the solution leaves the domain.
std::vector<double> integrate_side(const GraphField& u, const std::vector<double>& grid,
                                   std::size_t from, bool forward, double b, double tol,
                                   bool& exited, double& err) {
  const Rhs f{u};
  std::vector<double> ts{b};
  std::size_t i = from;
  double t = b;
  while (forward ? i + 1 < grid.size() : i > 0) {
    const std::size_t j = forward ? i + 1 : i - 1;
    const double h = grid[j] - grid[i];
    double next;
    const bool ok = u.is_grid() ? heun_controlled(f, grid[i], t, h, tol, 0, next, err)
                                : rk4_step(f, grid[i], t, h, next);
    if (!ok || !u.domain().contains(grid[j], next)) {
      exited = true;
      break;
    }
    ts.push_back(next);
    t = next;
    i = j;
  }
  return ts;
}

Leaf integrate_raw(const GraphField& u, double a, double b, Span span, const LeafOptions& opts) {
  if (!u.domain().contains(a, b)) {
    throw Error(ErrorKind::StartOutOfDomain, "leaf start (" + std::to_string(a) + ", " +
                                                 std::to_string(b) + ") is outside the domain");
  }
  if (!(span.lo >= u.domain().x0 - 1e-12 && span.hi <= u.domain().x1 + 1e-12)) {
    throw Error(ErrorKind::OutOfDomain, "leaf span exceeds the domain x-extent");
  }
  std::size_t ia = 0;
  const std::vector<double> grid = build_grid(a, span, opts.step, ia);
  Leaf leaf;
  leaf.a = a;
  leaf.b = b;
  bool exited = false;
  const auto back = integrate_side(u, grid, ia, false, b, opts.tolerance, exited, leaf.error_estimate);
  const auto fwd = integrate_side(u, grid, ia, true, b, opts.tolerance, exited, leaf.error_estimate);
  leaf.exited_domain = exited;
  for (std::size_t k = back.size(); k > 1; --k) {
    leaf.xi.push_back(grid[ia - (k - 1)]);
    leaf.t.push_back(back[k - 1]);
  }
  for (std::size_t k = 0; k < fwd.size(); ++k) {
    leaf.xi.push_back(grid[ia + k]);
    leaf.t.push_back(fwd[k]);
  }
  const std::size_t n = leaf.xi.size();
  leaf.u.resize(n);
  leaf.g.resize(n);
  std::vector<double> params(leaf.xi);
  std::vector<HeisenbergPoint> pts(n);
  for (std::size_t i = 0; i < n; ++i) {
    const FieldSample s = u.sample(leaf.xi[i], leaf.t[i]);
    leaf.u[i] = s.u;
    leaf.g[i] = s.ux + 2.0 * s.u * s.ut;
    pts[i] = {leaf.xi[i], s.u, leaf.t[i] - leaf.xi[i] * s.u};
  }
  leaf.lifted = HeisenbergCurve(std::move(params), std::move(pts));
  return leaf;
}

}  // namespace

std::vector<double> anchored_grid(double anchor, Span span, double step) {
  std::size_t ia = 0;
  return build_grid(anchor, span, step, ia);
}

Leaf integrate_leaf(const GraphField& u, double a, double b, Span span, const LeafOptions& opts) {
  Leaf leaf = integrate_raw(u, a, b, span, opts);
  if (!opts.probe) return leaf;
  const Domain& d = u.domain();
  double delta = 1e-7 * std::max(1.0, d.height());
  if (!d.contains(a, b + delta)) delta = -delta;
  LeafOptions probe_opts = opts;
  probe_opts.probe = false;
  const Leaf probe = integrate_raw(u, a, b + delta, span, probe_opts);
  // Leaves on the same grid; align by xi.
  std::size_t j = 0;
  for (std::size_t i = 0; i < leaf.xi.size(); ++i) {
    while (j < probe.xi.size() && probe.xi[j] < leaf.xi[i]) ++j;
    if (j == probe.xi.size()) break;
    if (probe.xi[j] != leaf.xi[i]) continue;
    if ((probe.t[j] - leaf.t[i]) * delta <= 0.0) {
      throw Error(ErrorKind::StepTooLarge,
                  "leaf crossed its probe at xi = " + std::to_string(leaf.xi[i]) +
                      "; reduce the step");
    }
  }
  return leaf;
}

double ode_residual(const GraphField& u, const Leaf& leaf) {
  if (leaf.xi.size() < 5) throw Error(ErrorKind::TooFewSamples, "leaf has fewer than 5 samples");
  const std::vector<double> dt = differentiate(leaf.xi, leaf.t);
  double worst = 0.0;
  for (std::size_t i = 0; i < leaf.xi.size(); ++i) {
    worst = std::max(worst, std::abs(dt[i] - 2.0 * u.value(leaf.xi[i], leaf.t[i])));
  }
  return worst;
}

CharacteristicFamily build_family(const GraphField& u, double a, double b, Span eps_range,
                                  std::size_t n_leaves, Span span, const LeafOptions& opts) {
  if (n_leaves < 2 || !(eps_range.hi > eps_range.lo)) {
    throw Error(ErrorKind::InvalidArgument, "family needs at least two leaves and a nonempty eps range");
  }
  CharacteristicFamily fam;
  fam.a = a;
  fam.b = b;
  fam.eps.resize(n_leaves);
  const double de = (eps_range.hi - eps_range.lo) / static_cast<double>(n_leaves - 1);
  for (std::size_t k = 0; k < n_leaves; ++k) fam.eps[k] = eps_range.lo + de * static_cast<double>(k);
  fam.xi = anchored_grid(a, span, opts.step);
  fam.leaves.resize(n_leaves);
  LeafOptions leaf_opts = opts;
  leaf_opts.probe = false;
  parallel_for(n_leaves, [&](std::size_t k) {
    fam.leaves[k] = integrate_raw(u, a, b + fam.eps[k], span, leaf_opts);
  });
  const std::size_t nx = fam.xi.size();
  fam.t.assign(n_leaves * nx, kNaN);
  for (std::size_t k = 0; k < n_leaves; ++k) {
    const Leaf& leaf = fam.leaves[k];
    if (leaf.xi.empty()) continue;
    const auto it = std::lower_bound(fam.xi.begin(), fam.xi.end(), leaf.xi.front());
    const std::size_t off = static_cast<std::size_t>(it - fam.xi.begin());
    for (std::size_t i = 0; i < leaf.xi.size(); ++i) fam.t[k * nx + off + i] = leaf.t[i];
  }
  for (std::size_t i = 0; i < nx; ++i) {
    for (std::size_t k = 0; k + 1 < n_leaves; ++k) {
      const double lo = fam.t[k * nx + i], hi = fam.t[(k + 1) * nx + i];
      if (std::isnan(lo) || std::isnan(hi)) continue;
      if (!(hi > lo)) {
        throw Error(ErrorKind::OrderingViolation,
                    "leaves " + std::to_string(k) + " and " + std::to_string(k + 1) +
                        " are not ordered at xi = " + std::to_string(fam.xi[i]));
      }
    }
  }
  fam.jacobian.assign(n_leaves * nx, kNaN);
  auto at = [&](std::size_t k, std::size_t i) { return fam.t[k * nx + i]; };
  for (std::size_t i = 0; i < nx; ++i) {
    for (std::size_t k = 0; k < n_leaves; ++k) {
      double j = kNaN;
      const bool has_prev = k > 0 && !std::isnan(at(k - 1, i));
      const bool has_next = k + 1 < n_leaves && !std::isnan(at(k + 1, i));
      if (!std::isnan(at(k, i))) {
        if (has_prev && has_next) {
          j = (at(k + 1, i) - at(k - 1, i)) / (2.0 * de);
        } else if (has_next) {
          j = (k + 2 < n_leaves && !std::isnan(at(k + 2, i)))
                  ? (-3.0 * at(k, i) + 4.0 * at(k + 1, i) - at(k + 2, i)) / (2.0 * de)
                  : (at(k + 1, i) - at(k, i)) / de;
        } else if (has_prev) {
          j = (k >= 2 && !std::isnan(at(k - 2, i)))
                  ? (3.0 * at(k, i) - 4.0 * at(k - 1, i) + at(k - 2, i)) / (2.0 * de)
                  : (at(k, i) - at(k - 1, i)) / de;
        }
      }
      fam.jacobian[k * nx + i] = j;
    }
  }
  return fam;
}

ChangeOfVariables change_of_variables_check(const CharacteristicFamily& family, const TestField& psi,
                                            const QuadratureOptions& opts) {
  const Domain box = psi.support();
  const std::size_t nx = family.xi.size(), ne = family.eps.size();
  if (box.x0 < family.xi.front() || box.x1 > family.xi.back()) {
    throw Error(ErrorKind::SupportOutsideChart, "support exceeds the xi range of the family");
  }
  for (std::size_t i = 0; i < nx; ++i) {
    if (family.xi[i] < box.x0 || family.xi[i] > box.x1) continue;
    const double lo = family.t_at(0, i), hi = family.t_at(ne - 1, i);
    if (std::isnan(lo) || std::isnan(hi) || lo > box.t0 || hi < box.t1) {
      throw Error(ErrorKind::SupportOutsideChart,
                  "support leaves the chart image at xi = " + std::to_string(family.xi[i]));
    }
  }
  ChangeOfVariables out;
  out.direct = integrate_box(
      box,
      [&](std::span<const double> xs, std::span<const double> ts, std::span<double> vals) {
        for (std::size_t i = 0; i < xs.size(); ++i) vals[i] = psi.value(xs[i], ts[i]);
      },
      opts);
  std::vector<double> column(nx);
  std::vector<double> inner(ne);
  for (std::size_t i = 0; i < nx; ++i) {
    for (std::size_t k = 0; k < ne; ++k) {
      const double t = family.t_at(k, i), j = family.jacobian_at(k, i);
      inner[k] = (std::isnan(t) || std::isnan(j)) ? 0.0 : psi.value(family.xi[i], t) * j;
    }
    column[i] = cumulative_integral(family.eps, inner).back();
  }
  out.pulled_back = cumulative_integral(family.xi, column).back();
  return out;
}

CurveScalar m_along(const Leaf& leaf, const ConvexBody& body) {
  CurveScalar m;
  m.params = leaf.xi;
  m.values.resize(leaf.g.size());
  body.F_batch(leaf.g, m.values);
  return m;
}

FEstimate estimate_f(const CurveScalar& m, std::size_t window) {
  const std::size_t n = m.params.size();
  if (window < 1) throw Error(ErrorKind::InvalidArgument, "window must be at least 1");
  if (m.values.size() != n) throw Error(ErrorKind::GridMismatch, "parameter and value counts differ");
  if (n < 2 * window + 1) {
    throw Error(ErrorKind::TooFewSamples, "estimate_f needs at least " +
                                              std::to_string(2 * window + 1) + " samples");
  }
  FEstimate out;
  out.params = m.params;
  out.values.resize(n);
  out.residuals.resize(n);
  const std::size_t w = 2 * window + 1;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = std::min(i >= window ? i - window : 0, n - w);
    const double scale = 0.5 * (m.params[lo + w - 1] - m.params[lo]);
    // Normal equations of m_j - m_i ~ c0 + c1 d + c2 d^2 with d scaled to O(1).
    double s[5] = {0, 0, 0, 0, 0}, r[3] = {0, 0, 0};
    for (std::size_t j = lo; j < lo + w; ++j) {
      const double d = (m.params[j] - m.params[i]) / scale;
      const double y = m.values[j] - m.values[i];
      double p = 1.0;
      for (int k = 0; k < 5; ++k) {
        s[k] += p;
        if (k < 3) r[k] += p * y;
        p *= d;
      }
    }
    const double A[3][3] = {{s[0], s[1], s[2]}, {s[1], s[2], s[3]}, {s[2], s[3], s[4]}};
    auto det3 = [](const double M[3][3]) {
      return M[0][0] * (M[1][1] * M[2][2] - M[1][2] * M[2][1]) -
             M[0][1] * (M[1][0] * M[2][2] - M[1][2] * M[2][0]) +
             M[0][2] * (M[1][0] * M[2][1] - M[1][1] * M[2][0]);
    };
    const double D = det3(A);
    double c[3];
    for (int col = 0; col < 3; ++col) {
      double B[3][3];
      for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) B[a][b] = b == col ? r[a] : A[a][b];
      }
      c[col] = det3(B) / D;
    }
    out.values[i] = c[1] / scale;
    double ss = 0.0;
    for (std::size_t j = lo; j < lo + w; ++j) {
      const double d = (m.params[j] - m.params[i]) / scale;
      const double e = m.values[j] - m.values[i] - (c[0] + d * (c[1] + d * c[2]));
      ss += e * e;
    }
    out.residuals[i] = std::sqrt(ss / static_cast<double>(w));
  }
  return out;
}

const char* to_string(Regularity r) {
  switch (r) {
    case Regularity::C2Consistent: return "C2_CONSISTENT";
    case Regularity::C2Violation: return "C2_VIOLATION";
    case Regularity::Inconclusive: return "INCONCLUSIVE";
  }
  return "INCONCLUSIVE";
}

RegularityReport regularity_diagnostic(const HeisenbergCurve& curve) {
  const std::size_t n = curve.size();
  if (n < 9) throw Error(ErrorKind::TooFewSamples, "regularity diagnostic needs at least 9 samples");
  const auto params = curve.params();
  if (!is_uniform(params, 1e-6)) {
    throw Error(ErrorKind::InvalidArgument, "regularity diagnostic needs a uniform parameter grid");
  }
  const double h = (params.back() - params.front()) / static_cast<double>(n - 1);
  const std::vector<double> coords[3] = {curve.xs(), curve.ys(), curve.ts()};
  double cmax = 0.0;
  for (const auto& c : coords) {
    for (double v : c) cmax = std::max(cmax, std::abs(v));
  }
  RegularityReport rep;
  for (std::size_t k : {1u, 2u, 4u}) {
    double q = 0.0;
    for (const auto& c : coords) {
      for (std::size_t i = k; i + k < n; ++i) {
        q = std::max(q, std::abs(c[i + k] - 2.0 * c[i] + c[i - k]));
      }
    }
    const double kh = static_cast<double>(k) * h;
    rep.spacings.push_back(kh);
    rep.quotients.push_back(q / (kh * kh));
  }
  // Below this the second differences are rounding noise (straight pieces).
  const double floor = 64.0 * std::numeric_limits<double>::epsilon() * (1.0 + cmax) / (h * h);
  const auto& q = rep.quotients;
  if (std::max({q[0], q[1], q[2]}) <= floor) {
    rep.verdict = Regularity::C2Consistent;
    return rep;
  }
  auto rel = [](double a, double b) { return std::abs(a - b) / std::max(a, b); };
  rep.drift = std::max(rel(q[0], q[1]), rel(q[1], q[2]));
  if (rep.drift < 0.1) {
    rep.verdict = Regularity::C2Consistent;
  } else if (q[0] >= 1.5 * q[1] && q[1] >= 1.5 * q[2]) {
    rep.verdict = Regularity::C2Violation;
  } else {
    rep.verdict = Regularity::Inconclusive;
  }
  return rep;
}

SlopeProfile reconstruct_slope(const ConvexBody& body, const CurveFunction& f, double g0,
                               double anchor, Span span, double step) {
  std::size_t ia = 0;
  SlopeProfile out;
  out.params = build_grid(anchor, span, step, ia);
  const std::size_t n = out.params.size();
  std::vector<double> fv(n);
  for (std::size_t i = 0; i < n; ++i) fv[i] = f(out.params[i]);
  const std::vector<double> cum = cumulative_integral(out.params, fv);
  const double m0 = body.F_value(g0);
  out.M.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.M[i] = m0 + (cum[i] - cum[ia]);
  const auto [lo, hi] = body.F_range();
  auto inside = [&](double m) { return m > lo && m < hi; };
  // Crossing nearest to the anchor, interpolated between the last good sample
  // and the first bad one.
  double escape = std::numeric_limits<double>::infinity();
  auto crossing = [&](std::size_t good, std::size_t bad) {
    const double edge = out.M[bad] >= hi ? hi : lo;
    const double w = (edge - out.M[good]) / (out.M[bad] - out.M[good]);
    return out.params[good] + w * (out.params[bad] - out.params[good]);
  };
  if (!inside(out.M[ia])) {
    throw RangeEscapeError(anchor, "initial slope is outside the range of F");
  }
  for (std::size_t i = ia + 1; i < n; ++i) {
    if (!inside(out.M[i])) {
      escape = crossing(i - 1, i);
      break;
    }
  }
  for (std::size_t i = ia; i-- > 0;) {
    if (!inside(out.M[i])) {
      const double x = crossing(i + 1, i);
      if (std::abs(x - anchor) < std::abs(escape - anchor)) escape = x;
      break;
    }
  }
  if (std::isfinite(escape)) {
    throw RangeEscapeError(escape, "M leaves the range of F at xi = " + std::to_string(escape) +
                                       " (characteristic tangent turns vertical)");
  }
  out.g.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.g[i] = body.F_inverse(out.M[i]);
  return out;
}

}  // namespace subfinsler
