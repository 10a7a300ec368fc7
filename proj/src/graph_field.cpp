#include "subfinsler/graph_field.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "subfinsler/errors.hpp"

namespace subfinsler {

namespace {

double slack_of(double lo, double hi) { return 1e-12 * std::max(1.0, std::abs(hi) + std::abs(lo)); }

}  // namespace

bool Domain::contains(double x, double t) const {
  const double sx = slack_of(x0, x1), st = slack_of(t0, t1);
  return x >= x0 - sx && x <= x1 + sx && t >= t0 - st && t <= t1 + st;
}

bool Domain::contains(const Domain& inner, double margin) const {
  const double sx = slack_of(x0, x1), st = slack_of(t0, t1);
  return inner.x0 >= x0 + margin - sx && inner.x1 <= x1 - margin + sx &&
         inner.t0 >= t0 + margin - st && inner.t1 <= t1 - margin + st;
}

struct GraphField::Impl {
  Domain domain;
  Evaluator eval;  // analytic source
  std::size_t nx = 0, nt = 0;
  double dx = 0.0, dt = 0.0;
  std::vector<double> u, ux, ut;  // grid source

  FieldSample bilinear(double x, double t) const {
    const double fx = std::clamp((x - domain.x0) / dx, 0.0, static_cast<double>(nx - 1));
    const double ft = std::clamp((t - domain.t0) / dt, 0.0, static_cast<double>(nt - 1));
    const std::size_t ix = std::min(static_cast<std::size_t>(fx), nx - 2);
    const std::size_t it = std::min(static_cast<std::size_t>(ft), nt - 2);
    const double ax = fx - static_cast<double>(ix), at = ft - static_cast<double>(it);
    const std::size_t i00 = it * nx + ix, i10 = i00 + 1, i01 = i00 + nx, i11 = i01 + 1;
    auto lerp = [&](const std::vector<double>& f) {
      return (1 - at) * ((1 - ax) * f[i00] + ax * f[i10]) + at * ((1 - ax) * f[i01] + ax * f[i11]);
    };
    return {lerp(u), lerp(ux), lerp(ut)};
  }
};

GraphField GraphField::analytic(const Domain& domain, Evaluator eval) {
  if (!(domain.x1 > domain.x0) || !(domain.t1 > domain.t0)) {
    throw Error(ErrorKind::InvalidArgument, "domain must have positive extent");
  }
  auto impl = std::make_shared<Impl>();
  impl->domain = domain;
  impl->eval = std::move(eval);
  return GraphField(std::move(impl));
}

GraphField GraphField::grid(const Domain& domain, std::size_t nx, std::size_t nt,
                            std::vector<double> values) {
  if (!(domain.x1 > domain.x0) || !(domain.t1 > domain.t0)) {
    throw Error(ErrorKind::InvalidArgument, "domain must have positive extent");
  }
  if (nx < 3 || nt < 3) throw Error(ErrorKind::InvalidArgument, "grid needs at least 3x3 nodes");
  if (values.size() != nx * nt) {
    throw Error(ErrorKind::GridMismatch, "grid has " + std::to_string(values.size()) +
                                             " values, expected " + std::to_string(nx * nt));
  }
  for (double v : values) {
    if (!std::isfinite(v)) throw Error(ErrorKind::InvalidArgument, "grid values must be finite");
  }
  auto impl = std::make_shared<Impl>();
  impl->domain = domain;
  impl->nx = nx;
  impl->nt = nt;
  impl->dx = domain.width() / static_cast<double>(nx - 1);
  impl->dt = domain.height() / static_cast<double>(nt - 1);
  impl->u = std::move(values);
  impl->ux.resize(nx * nt);
  impl->ut.resize(nx * nt);
  const auto& u = impl->u;
  // Centered differences inside, second-order one-sided at the edges.
  for (std::size_t it = 0; it < nt; ++it) {
    for (std::size_t ix = 0; ix < nx; ++ix) {
      const std::size_t k = it * nx + ix;
      double dudx;
      if (ix == 0) {
        dudx = (-3.0 * u[k] + 4.0 * u[k + 1] - u[k + 2]) / (2.0 * impl->dx);
      } else if (ix == nx - 1) {
        dudx = (3.0 * u[k] - 4.0 * u[k - 1] + u[k - 2]) / (2.0 * impl->dx);
      } else {
        dudx = (u[k + 1] - u[k - 1]) / (2.0 * impl->dx);
      }
      double dudt;
      if (it == 0) {
        dudt = (-3.0 * u[k] + 4.0 * u[k + nx] - u[k + 2 * nx]) / (2.0 * impl->dt);
      } else if (it == nt - 1) {
        dudt = (3.0 * u[k] - 4.0 * u[k - nx] + u[k - 2 * nx]) / (2.0 * impl->dt);
      } else {
        dudt = (u[k + nx] - u[k - nx]) / (2.0 * impl->dt);
      }
      impl->ux[k] = dudx;
      impl->ut[k] = dudt;
    }
  }
  return GraphField(std::move(impl));
}

FieldSample GraphField::sample(double x, double t) const {
  if (!impl_->domain.contains(x, t)) {
    throw Error(ErrorKind::OutOfDomain,
                "(" + std::to_string(x) + ", " + std::to_string(t) + ") is outside the field domain");
  }
  if (impl_->nx > 0) return impl_->bilinear(x, t);
  return impl_->eval(x, t);
}

double GraphField::slope(double x, double t) const {
  const FieldSample s = sample(x, t);
  return s.ux + 2.0 * s.u * s.ut;
}

const Domain& GraphField::domain() const { return impl_->domain; }
bool GraphField::is_grid() const { return impl_->nx > 0; }
std::size_t GraphField::nx() const { return impl_->nx; }
std::size_t GraphField::nt() const { return impl_->nt; }
double GraphField::dx() const { return impl_->dx; }
double GraphField::dt() const { return impl_->dt; }
std::span<const double> GraphField::grid_values() const { return impl_->u; }

double GraphField::support_margin() const {
  return is_grid() ? std::max(impl_->dx, impl_->dt) : 0.0;
}

double GraphField::lipschitz_estimate(std::size_t n) const {
  const Domain& d = impl_->domain;
  double best = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double x = d.x0 + d.width() * static_cast<double>(i) / static_cast<double>(n - 1);
      const double t = d.t0 + d.height() * static_cast<double>(j) / static_cast<double>(n - 1);
      const FieldSample s = sample(x, t);
      best = std::max(best, std::hypot(s.ux, s.ut));
    }
  }
  return best;
}

double GraphField::slope_jump_statistic(std::size_t n) const {
  const Domain& d = impl_->domain;
  std::vector<double> g(n * n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      const double x = d.x0 + d.width() * static_cast<double>(i) / static_cast<double>(n - 1);
      const double t = d.t0 + d.height() * static_cast<double>(j) / static_cast<double>(n - 1);
      g[j * n + i] = slope(x, t);
    }
  }
  double jump = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      if (i + 1 < n) jump = std::max(jump, std::abs(g[j * n + i + 1] - g[j * n + i]));
      if (j + 1 < n) jump = std::max(jump, std::abs(g[(j + 1) * n + i] - g[j * n + i]));
    }
  }
  return jump;
}

}  // namespace subfinsler
