#include "subfinsler/intrinsic_graph.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "subfinsler/errors.hpp"
#include "subfinsler/numerics.hpp"

namespace subfinsler {

HeisenbergPoint graph_map(const GraphField& u, double x, double t) {
  const double v = u.value(x, t);
  return {x, v, t - x * v};
}

GraphPointData point_data(const GraphField& u, double x, double t) {
  const FieldSample s = u.sample(x, t);
  GraphPointData d;
  d.x = x;
  d.t = t;
  d.g = s.ux + 2.0 * s.u * s.ut;
  d.N_tilde = {d.g, -1.0, s.ut};
  d.N_tilde_h = {d.g, -1.0};
  const double nh = std::hypot(d.g, 1.0);
  d.nu_h = {d.g / nh, -1.0 / nh};
  d.Z_tilde = {1.0, d.g};
  d.Z = {1.0 / nh, d.g / nh};
  d.jac = std::sqrt(d.g * d.g + 1.0 + s.ut * s.ut);
  return d;
}

namespace {

constexpr double kBumpIntegral = 256.0 / 315.0;

// phi(r) = (1 - r^2)^4 and phi'(r).
inline void bump_profile(double r, double& phi, double& dphi) {
  if (std::abs(r) >= 1.0) {
    phi = 0.0;
    dphi = 0.0;
    return;
  }
  const double q = 1.0 - r * r;
  const double q3 = q * q * q;
  phi = q3 * q;
  dphi = -8.0 * r * q3;
}

void check_finite(std::span<const double> values, const char* what) {
  for (double v : values) {
    if (!std::isfinite(v)) {
      throw Error(ErrorKind::QuadratureFailure, std::string(what) + " integrand is not finite");
    }
  }
}

}  // namespace

TestField::TestField(std::vector<Bump> bumps) : bumps_(std::move(bumps)) {
  for (const Bump& b : bumps_) {
    if (!(b.wx > 0.0) || !(b.wt > 0.0)) {
      throw Error(ErrorKind::InvalidArgument, "bump widths must be positive");
    }
  }
}

TestField TestField::bump(double cx, double ct, double wx, double wt, double weight) {
  return TestField({Bump{weight, cx, ct, wx, wt}});
}

FieldSample TestField::sample(double x, double t) const {
  FieldSample out;
  for (const Bump& b : bumps_) {
    double px, dpx, pt, dpt;
    bump_profile((x - b.cx) / b.wx, px, dpx);
    bump_profile((t - b.ct) / b.wt, pt, dpt);
    out.u += b.weight * px * pt;
    out.ux += b.weight * dpx * pt / b.wx;
    out.ut += b.weight * px * dpt / b.wt;
  }
  return out;
}

double TestField::value(double x, double t) const { return sample(x, t).u; }

Domain TestField::support() const {
  if (bumps_.empty()) throw Error(ErrorKind::InvalidArgument, "empty test field");
  Domain box{bumps_[0].cx - bumps_[0].wx, bumps_[0].cx + bumps_[0].wx, bumps_[0].ct - bumps_[0].wt,
             bumps_[0].ct + bumps_[0].wt};
  for (const Bump& b : bumps_) {
    box.x0 = std::min(box.x0, b.cx - b.wx);
    box.x1 = std::max(box.x1, b.cx + b.wx);
    box.t0 = std::min(box.t0, b.ct - b.wt);
    box.t1 = std::max(box.t1, b.ct + b.wt);
  }
  return box;
}

TestField TestField::scaled(double factor) const {
  std::vector<Bump> out = bumps_;
  for (Bump& b : out) b.weight *= factor;
  return TestField(std::move(out));
}

TestField TestField::operator+(const TestField& other) const {
  std::vector<Bump> out = bumps_;
  out.insert(out.end(), other.bumps_.begin(), other.bumps_.end());
  return TestField(std::move(out));
}

double TestField::exact_integral() const {
  double total = 0.0;
  for (const Bump& b : bumps_) total += b.weight * kBumpIntegral * kBumpIntegral * b.wx * b.wt;
  return total;
}

double integrate_box(const Domain& box, const BatchIntegrand& integrand,
                     const QuadratureOptions& opts) {
  if (opts.cells_x < 1 || opts.cells_t < 1) {
    throw Error(ErrorKind::InvalidArgument, "quadrature needs at least one cell per axis");
  }
  const GaussRule& rule = gauss_legendre(opts.order);
  const std::size_t nc = static_cast<std::size_t>(opts.cells_x) * static_cast<std::size_t>(opts.cells_t);
  const std::size_t q = rule.nodes.size();
  const double hx = box.width() / opts.cells_x;
  const double ht = box.height() / opts.cells_t;
  std::vector<double> cell_totals(nc);
  parallel_for(nc, [&](std::size_t c) {
    const std::size_t cx = c % static_cast<std::size_t>(opts.cells_x);
    const std::size_t ct = c / static_cast<std::size_t>(opts.cells_x);
    const double xa = box.x0 + hx * static_cast<double>(cx);
    const double ta = box.t0 + ht * static_cast<double>(ct);
    std::vector<double> xs(q * q), ts(q * q), vals(q * q);
    for (std::size_t j = 0; j < q; ++j) {
      for (std::size_t i = 0; i < q; ++i) {
        xs[j * q + i] = xa + 0.5 * hx * (rule.nodes[i] + 1.0);
        ts[j * q + i] = ta + 0.5 * ht * (rule.nodes[j] + 1.0);
      }
    }
    integrand(xs, ts, vals);
    CompensatedSum sum;
    for (std::size_t j = 0; j < q; ++j) {
      for (std::size_t i = 0; i < q; ++i) sum.add(rule.weights[i] * rule.weights[j] * vals[j * q + i]);
    }
    cell_totals[c] = sum.value() * 0.25 * hx * ht;
  });
  CompensatedSum total;
  for (double v : cell_totals) total.add(v);
  return total.value();
}

double area_K(const GraphField& u, const ConvexBody& body, const Domain& region,
              const QuadratureOptions& opts) {
  if (!u.domain().contains(region)) {
    throw Error(ErrorKind::OutOfDomain, "integration region is not inside the field domain");
  }
  return integrate_box(
      region,
      [&](std::span<const double> xs, std::span<const double> ts, std::span<double> out) {
        std::vector<double> g(xs.size());
        for (std::size_t i = 0; i < xs.size(); ++i) g[i] = u.slope(xs[i], ts[i]);
        check_finite(g, "area");
        body.lower_dual_batch(g, out);
        check_finite(out, "area");
      },
      opts);
}

double area_K(const GraphField& u, const ConvexBody& body, const QuadratureOptions& opts) {
  return area_K(u, body, u.domain(), opts);
}

namespace {

Domain checked_support(const GraphField& u, const TestField& v) {
  const Domain box = v.support();
  if (!u.domain().contains(box, u.support_margin())) {
    throw Error(ErrorKind::SupportViolation,
                "test field support reaches the boundary margin of the domain");
  }
  return box;
}

// Integrates (Q integrand + f v, |v|) at once so both share the nodes.
struct VariationTotals {
  double q = 0.0;
  double fv = 0.0;
  double l1 = 0.0;
};

VariationTotals variation_totals(const GraphField& u, const TestField& v, const ConvexBody& body,
                                 const ScalarField* f, const QuadratureOptions& opts) {
  const Domain box = checked_support(u, v);
  VariationTotals totals;
  totals.q = integrate_box(
      box,
      [&](std::span<const double> xs, std::span<const double> ts, std::span<double> out) {
        const std::size_t n = xs.size();
        std::vector<double> g(n), w(n), m(n);
        for (std::size_t i = 0; i < n; ++i) {
          const FieldSample s = u.sample(xs[i], ts[i]);
          const FieldSample b = v.sample(xs[i], ts[i]);
          g[i] = s.ux + 2.0 * s.u * s.ut;
          w[i] = b.ux + 2.0 * b.u * s.ut + 2.0 * s.u * b.ut;
        }
        check_finite(g, "first variation");
        body.F_batch(g, m);
        for (std::size_t i = 0; i < n; ++i) out[i] = w[i] * m[i];
        check_finite(out, "first variation");
      },
      opts);
  if (f != nullptr) {
    totals.fv = integrate_box(
        box,
        [&](std::span<const double> xs, std::span<const double> ts, std::span<double> out) {
          for (std::size_t i = 0; i < xs.size(); ++i) out[i] = (*f)(xs[i], ts[i]) * v.value(xs[i], ts[i]);
          check_finite(out, "curvature");
        },
        opts);
  }
  totals.l1 = l1_norm(v, opts);
  return totals;
}

}  // namespace

double first_variation_area(const GraphField& u, const TestField& v, const ConvexBody& body,
                            const QuadratureOptions& opts) {
  return variation_totals(u, v, body, nullptr, opts).q;
}

double volume_variation(const TestField& v, const QuadratureOptions& opts) {
  return integrate_box(
      v.support(),
      [&](std::span<const double> xs, std::span<const double> ts, std::span<double> out) {
        for (std::size_t i = 0; i < xs.size(); ++i) out[i] = v.value(xs[i], ts[i]);
      },
      opts);
}

double l1_norm(const TestField& v, const QuadratureOptions& opts) {
  return integrate_box(
      v.support(),
      [&](std::span<const double> xs, std::span<const double> ts, std::span<double> out) {
        for (std::size_t i = 0; i < xs.size(); ++i) out[i] = std::abs(v.value(xs[i], ts[i]));
      },
      opts);
}

ResidualReport criticality_residual_report(const GraphField& u, const ScalarField& f,
                                           const ConvexBody& body,
                                           std::span<const TestField> tests,
                                           const QuadratureOptions& opts) {
  if (tests.empty()) throw Error(ErrorKind::InvalidArgument, "test battery is empty");
  ResidualReport report;
  report.per_test.reserve(tests.size());
  for (const TestField& v : tests) {
    const VariationTotals t = variation_totals(u, v, body, &f, opts);
    if (!(t.l1 > 0.0)) throw Error(ErrorKind::InvalidArgument, "test field vanishes identically");
    const double r = std::abs(t.q + t.fv) / t.l1;
    report.per_test.push_back(r);
    report.max_residual = std::max(report.max_residual, r);
  }
  return report;
}

double criticality_residual(const GraphField& u, const ScalarField& f, const ConvexBody& body,
                            std::span<const TestField> tests, const QuadratureOptions& opts) {
  return criticality_residual_report(u, f, body, tests, opts).max_residual;
}

double h0_estimate(const GraphField& u, const ConvexBody& body, const TestField& v,
                   const QuadratureOptions& opts) {
  const double vol = volume_variation(v, opts);
  if (std::abs(vol) <= 1e-14 * std::max(l1_norm(v, opts), 1e-300)) {
    throw Error(ErrorKind::ZeroVolumeVariation, "test field has zero mean");
  }
  return -first_variation_area(u, v, body, opts) / vol;
}

GraphField perturbed(const GraphField& u, const TestField& v, double s) {
  return GraphField::analytic(u.domain(), [u, v, s](double x, double t) {
    FieldSample a = u.sample(x, t);
    const FieldSample b = v.sample(x, t);
    a.u += s * b.u;
    a.ux += s * b.ux;
    a.ut += s * b.ut;
    return a;
  });
}

std::vector<TestField> bump_battery(const Domain& domain, double margin, const BatteryOptions& opts) {
  if (opts.centers_per_axis < 1 || opts.scales.empty()) {
    throw Error(ErrorKind::InvalidArgument, "battery needs scales and centers");
  }
  const double lo_x = domain.x0 + margin, hi_x = domain.x1 - margin;
  const double lo_t = domain.t0 + margin, hi_t = domain.t1 - margin;
  if (!(hi_x > lo_x) || !(hi_t > lo_t)) {
    throw Error(ErrorKind::SupportViolation, "margin leaves no room for test fields");
  }
  std::mt19937_64 rng(opts.seed);
  auto unit = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  std::vector<TestField> out;
  const int n = opts.centers_per_axis;
  for (double scale : opts.scales) {
    if (!(scale > 0.0) || scale > 1.0) throw Error(ErrorKind::InvalidArgument, "scale must lie in (0, 1]");
    const double wx = scale * 0.5 * (hi_x - lo_x);
    const double wt = scale * 0.5 * (hi_t - lo_t);
    const double cx0 = lo_x + wx, cx1 = hi_x - wx;
    const double ct0 = lo_t + wt, ct1 = hi_t - wt;
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        double ax, at;
        if (opts.seed == 0) {
          ax = n == 1 ? 0.5 : static_cast<double>(i) / (n - 1);
          at = n == 1 ? 0.5 : static_cast<double>(j) / (n - 1);
        } else {
          ax = unit();
          at = unit();
        }
        out.push_back(TestField::bump(cx0 + ax * (cx1 - cx0), ct0 + at * (ct1 - ct0), wx, wt));
      }
    }
  }
  return out;
}

}  // namespace subfinsler
