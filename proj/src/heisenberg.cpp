#include "subfinsler/heisenberg.hpp"

#include <algorithm>
#include <cmath>

#include "subfinsler/errors.hpp"
#include "subfinsler/numerics.hpp"

namespace subfinsler {

namespace {

void require_increasing(std::span<const double> params) {
  for (std::size_t i = 0; i + 1 < params.size(); ++i) {
    if (!(params[i + 1] > params[i])) {
      throw Error(ErrorKind::NonMonotoneParam,
                  "curve parameters must increase strictly (index " + std::to_string(i + 1) + ")");
    }
  }
}

// Velocity by five-point differences, or plain differences on short curves.
std::vector<double> velocity(std::span<const double> params, std::span<const double> values) {
  if (params.size() >= 5) return differentiate(params, values);
  std::vector<double> out(params.size(), 0.0);
  if (params.size() < 2) return out;
  for (std::size_t i = 0; i < params.size(); ++i) {
    const std::size_t a = i == 0 ? 0 : i - 1;
    const std::size_t b = i + 1 < params.size() ? i + 1 : i;
    out[i] = (values[b] - values[a]) / (params[b] - params[a]);
  }
  return out;
}

}  // namespace

HeisenbergCurve::HeisenbergCurve(std::vector<double> params, std::vector<HeisenbergPoint> points)
    : params_(std::move(params)), points_(std::move(points)) {
  if (params_.size() != points_.size()) {
    throw Error(ErrorKind::GridMismatch, "curve needs one parameter per point");
  }
  require_increasing(params_);
  const auto profile = horizontality_profile();
  residual_ = profile.empty() ? 0.0 : *std::max_element(profile.begin(), profile.end());
}

std::vector<double> HeisenbergCurve::xs() const {
  std::vector<double> v(points_.size());
  std::transform(points_.begin(), points_.end(), v.begin(), [](const auto& p) { return p.x; });
  return v;
}

std::vector<double> HeisenbergCurve::ys() const {
  std::vector<double> v(points_.size());
  std::transform(points_.begin(), points_.end(), v.begin(), [](const auto& p) { return p.y; });
  return v;
}

std::vector<double> HeisenbergCurve::ts() const {
  std::vector<double> v(points_.size());
  std::transform(points_.begin(), points_.end(), v.begin(), [](const auto& p) { return p.t; });
  return v;
}

std::vector<double> HeisenbergCurve::horizontality_profile() const {
  const auto dx = velocity(params_, xs());
  const auto dy = velocity(params_, ys());
  const auto dt = velocity(params_, ts());
  std::vector<double> out(points_.size());
  for (std::size_t i = 0; i < points_.size(); ++i) {
    out[i] = std::abs(contact_form(points_[i], {dx[i], dy[i], dt[i]}));
  }
  return out;
}

HeisenbergCurve HeisenbergCurve::reversed() const {
  const std::size_t n = points_.size();
  std::vector<double> params(n);
  std::vector<HeisenbergPoint> points(n);
  const double shift = n ? params_.front() + params_.back() : 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    params[i] = shift - params_[n - 1 - i];
    points[i] = points_[n - 1 - i];
  }
  return HeisenbergCurve(std::move(params), std::move(points));
}

HeisenbergCurve HeisenbergCurve::translated(const HeisenbergPoint& p) const {
  std::vector<HeisenbergPoint> points(points_.size());
  std::transform(points_.begin(), points_.end(), points.begin(),
                 [&](const auto& q) { return left_translate(p, q); });
  return HeisenbergCurve(params_, std::move(points));
}

HeisenbergCurve horizontal_lift(const PlanarCurve& curve, double t0) {
  const std::size_t n = curve.params.size();
  if (curve.x.size() != n || curve.y.size() != n) {
    throw Error(ErrorKind::GridMismatch, "planar curve arrays differ in length");
  }
  require_increasing(curve.params);
  const std::vector<double> dx = curve.dx ? *curve.dx : velocity(curve.params, curve.x);
  const std::vector<double> dy = curve.dy ? *curve.dy : velocity(curve.params, curve.y);
  if (dx.size() != n || dy.size() != n) {
    throw Error(ErrorKind::GridMismatch, "planar curve velocities differ in length");
  }
  std::vector<double> integrand(n);
  for (std::size_t i = 0; i < n; ++i) integrand[i] = curve.y[i] * dx[i] - curve.x[i] * dy[i];
  const auto t = cumulative_integral(curve.params, integrand);
  std::vector<HeisenbergPoint> points(n);
  for (std::size_t i = 0; i < n; ++i) points[i] = {curve.x[i], curve.y[i], t0 + t[i]};
  return HeisenbergCurve(curve.params, std::move(points));
}

std::vector<Vec2> covariant_derivative_horizontal(const HeisenbergCurve& curve,
                                                  std::span<const Vec2> field) {
  if (field.size() != curve.size()) {
    throw Error(ErrorKind::GridMismatch, "field must be sampled on the curve's parameter grid");
  }
  if (field.size() < 5) throw Error(ErrorKind::TooFewSamples, "need at least 5 samples");
  std::vector<double> f(field.size()), g(field.size());
  for (std::size_t i = 0; i < field.size(); ++i) {
    f[i] = field[i].x;
    g[i] = field[i].y;
  }
  const auto df = differentiate(curve.params(), f);
  const auto dg = differentiate(curve.params(), g);
  std::vector<Vec2> out(field.size());
  for (std::size_t i = 0; i < field.size(); ++i) out[i] = {df[i], dg[i]};
  return out;
}

HeisenbergCurve reparameterize_arclength(const HeisenbergCurve& curve, std::size_t samples) {
  const std::size_t n = curve.size();
  if (n < 5) throw Error(ErrorKind::TooFewSamples, "arc-length resampling needs 5 samples");
  if (samples == 0) samples = n;
  if (samples < 2) throw Error(ErrorKind::InvalidArgument, "need at least 2 output samples");
  const auto x = curve.xs(), y = curve.ys(), t = curve.ts();
  const auto dx = differentiate(curve.params(), x);
  const auto dy = differentiate(curve.params(), y);
  std::vector<double> speed(n);
  for (std::size_t i = 0; i < n; ++i) speed[i] = std::hypot(dx[i], dy[i]);
  const auto sigma = cumulative_integral(curve.params(), speed);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (!(sigma[i + 1] > sigma[i])) {
      throw Error(ErrorKind::InvalidArgument, "curve projection is stationary; no arc length");
    }
  }
  const double total = sigma.back();
  std::vector<double> params(samples);
  std::vector<HeisenbergPoint> points(samples);
  for (std::size_t j = 0; j < samples; ++j) {
    const double s = total * static_cast<double>(j) / static_cast<double>(samples - 1);
    params[j] = s;
    points[j] = {interpolate_cubic(sigma, x, s), interpolate_cubic(sigma, y, s),
                 interpolate_cubic(sigma, t, s)};
  }
  return HeisenbergCurve(std::move(params), std::move(points));
}

}  // namespace subfinsler
