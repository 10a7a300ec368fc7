#include "subfinsler/convex_body.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "subfinsler/errors.hpp"
#include "subfinsler/simd/support_kernels.hpp"

namespace subfinsler {

namespace {

constexpr double kPi = std::numbers::pi;

simd::SeriesView view_of(double a0, const std::vector<double>& c, const std::vector<double>& s) {
  return {a0, c.data(), s.data(), c.size()};
}

}  // namespace

ConvexBody ConvexBody::make(double a0, std::vector<double> cos_coeffs,
                            std::vector<double> sin_coeffs, std::size_t validation_samples) {
  if (validation_samples < kDefaultValidationSamples) {
    throw Error(ErrorKind::InvalidArgument, "validation sampling must use at least 4096 points");
  }
  if (!std::isfinite(a0)) throw Error(ErrorKind::InvalidArgument, "a0 must be finite");
  for (double v : cos_coeffs) {
    if (!std::isfinite(v)) throw Error(ErrorKind::InvalidArgument, "cos coefficients must be finite");
  }
  for (double v : sin_coeffs) {
    if (!std::isfinite(v)) throw Error(ErrorKind::InvalidArgument, "sin coefficients must be finite");
  }
  const std::size_t order = std::max(cos_coeffs.size(), sin_coeffs.size());
  cos_coeffs.resize(order, 0.0);
  sin_coeffs.resize(order, 0.0);

  ConvexBody body;
  body.a0_ = a0;
  body.cos_ = std::move(cos_coeffs);
  body.sin_ = std::move(sin_coeffs);
  body.validate(validation_samples);
  return body;
}

void ConvexBody::validate(std::size_t samples) {
  std::vector<double> c(samples), s(samples), h(samples), dh(samples), d2h(samples);
  for (std::size_t j = 0; j < samples; ++j) {
    const double theta = 2.0 * kPi * static_cast<double>(j) / static_cast<double>(samples);
    c[j] = std::cos(theta);
    s[j] = std::sin(theta);
  }
  support_batch(c, s, h, dh, d2h);
  rho_min_ = std::numeric_limits<double>::infinity();
  h_min_ = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < samples; ++j) {
    rho_min_ = std::min(rho_min_, h[j] + d2h[j]);
    h_min_ = std::min(h_min_, h[j]);
  }
  if (!(rho_min_ > 0.0)) {
    throw Error(ErrorKind::NotConvexPlus,
                "min(h + h'') = " + std::to_string(rho_min_) + " is not positive");
  }
  if (!(h_min_ > 0.0)) {
    throw Error(ErrorKind::OriginOutside, "min(h) = " + std::to_string(h_min_) + " is not positive");
  }
}

ConvexBody ConvexBody::disk(double radius) {
  if (!(radius > 0.0)) throw Error(ErrorKind::InvalidArgument, "disk radius must be positive");
  return make(radius, {}, {});
}

ConvexBody ConvexBody::ellipse(double a, double b, std::size_t harmonics) {
  if (!(a > 0.0) || !(b > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "ellipse semi-axes must be positive");
  }
  // Trapezoidal DFT of the exact support function; the samples far exceed the
  // truncation order so aliasing sits below rounding for moderate eccentricity.
  const std::size_t n = std::max<std::size_t>(4096, 8 * harmonics);
  std::vector<double> theta(n), h(n);
  double mean = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    theta[j] = 2.0 * kPi * static_cast<double>(j) / static_cast<double>(n);
    const double c = std::cos(theta[j]), s = std::sin(theta[j]);
    h[j] = std::sqrt(a * a * c * c + b * b * s * s);
    mean += h[j];
  }
  mean /= static_cast<double>(n);
  std::vector<double> cos_coeffs(harmonics, 0.0), sin_coeffs(harmonics, 0.0);
  // Central symmetry and the mirror symmetry in the x-axis leave only even cosines.
  for (std::size_t k = 2; k <= harmonics; k += 2) {
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) acc += h[j] * std::cos(static_cast<double>(k) * theta[j]);
    cos_coeffs[k - 1] = 2.0 * acc / static_cast<double>(n);
  }
  return make(mean, std::move(cos_coeffs), std::move(sin_coeffs));
}

SupportJet ConvexBody::support(double theta) const {
  return support_unit({std::cos(theta), std::sin(theta)});
}

SupportJet ConvexBody::support_unit(Vec2 unit) const {
  SupportJet jet;
  simd::support_series_scalar(view_of(a0_, cos_, sin_), &unit.x, &unit.y, 1,
                              {&jet.h, &jet.dh, &jet.d2h});
  return jet;
}

Vec2 ConvexBody::boundary_point(double theta) const {
  const Vec2 u{std::cos(theta), std::sin(theta)};
  const SupportJet jet = support_unit(u);
  return jet.h * u + jet.dh * apply_J(u);
}

double ConvexBody::curvature(double theta) const { return 1.0 / radius_of_curvature(theta); }

double ConvexBody::radius_of_curvature(double theta) const { return support(theta).rho(); }

Vec2 ConvexBody::inverse_gauss(Vec2 v) const {
  const double len = norm(v);
  if (!(len > 0.0)) throw Error(ErrorKind::ZeroVector, "inverse Gauss map of the zero vector");
  const Vec2 u = v / len;
  const SupportJet jet = support_unit(u);
  return jet.h * u + jet.dh * apply_J(u);
}

double ConvexBody::dual_norm(Vec2 v) const {
  const double len = norm(v);
  if (len == 0.0) return 0.0;
  return len * support_unit(v / len).h;
}

double ConvexBody::gauge_norm(Vec2 v) const {
  const double len = norm(v);
  if (len == 0.0) return 0.0;
  const Vec2 dir = v / len;
  const double phi = std::atan2(dir.y, dir.x);
  // Find theta whose boundary point lies on the ray through v. The polar angle
  // of p(theta) increases strictly (rate rho h / |p|^2), and on
  // [phi - pi/2, phi + pi/2] the signed angle from v to p changes sign.
  auto offset = [&](double theta, double* slope, Vec2* point) {
    const Vec2 u{std::cos(theta), std::sin(theta)};
    const SupportJet jet = support_unit(u);
    const Vec2 p = jet.h * u + jet.dh * apply_J(u);
    *point = p;
    *slope = jet.rho() * jet.h / dot(p, p);
    return std::atan2(cross(dir, p), dot(dir, p));
  };
  double lo = phi - 0.5 * kPi, hi = phi + 0.5 * kPi;
  double theta = phi;
  Vec2 p;
  for (int iter = 0; iter < 200; ++iter) {
    double slope = 0.0;
    const double d = offset(theta, &slope, &p);
    if (d == 0.0) break;
    if (d < 0.0) lo = theta; else hi = theta;
    double next = theta - d / slope;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - theta) < 1e-16 * (1.0 + std::abs(theta)) || hi - lo < 1e-15) {
      theta = next;
      double unused = 0.0;
      offset(theta, &unused, &p);
      break;
    }
    theta = next;
  }
  return len / norm(p);
}

double ConvexBody::F_value(double x) const {
  const double r = std::hypot(x, 1.0);
  const Vec2 u{x / r, -1.0 / r};
  const SupportJet jet = support_unit(u);
  return jet.h * u.x - jet.dh * u.y;
}

double ConvexBody::F_derivative(double x) const {
  const double r = std::hypot(x, 1.0);
  const SupportJet jet = support_unit({x / r, -1.0 / r});
  return jet.rho() / (r * r * r);
}

std::pair<double, double> ConvexBody::F_range() const {
  return {-support(kPi).h, support(0.0).h};
}

double ConvexBody::F_inverse(double m) const {
  const auto [lo_m, hi_m] = F_range();
  if (!(m > lo_m && m < hi_m)) {
    throw Error(ErrorKind::OutOfRange, "F_inverse: " + std::to_string(m) + " outside (" +
                                           std::to_string(lo_m) + ", " + std::to_string(hi_m) + ")");
  }
  // Work in the normal angle theta in (-pi, 0), where the first coordinate of
  // p(theta) increases with rate -rho sin(theta) > 0.
  double lo = -kPi, hi = 0.0;
  double theta = -0.5 * kPi;
  for (int iter = 0; iter < 200; ++iter) {
    const double c = std::cos(theta), s = std::sin(theta);
    const SupportJet jet = support_unit({c, s});
    const double res = jet.h * c - jet.dh * s - m;
    if (res == 0.0) break;
    if (res < 0.0) lo = theta; else hi = theta;
    const double slope = -jet.rho() * s;
    double next = slope > 0.0 ? theta - res / slope : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const bool done = std::abs(next - theta) < 1e-16 || hi - lo < 4e-16;
    theta = next;
    if (done) break;
  }
  double x = -std::cos(theta) / std::sin(theta);
  // Polish in x, keeping only steps that reduce the residual.
  double res = F_value(x) - m;
  for (int iter = 0; iter < 4 && res != 0.0; ++iter) {
    const double cand = x - res / F_derivative(x);
    const double cand_res = F_value(cand) - m;
    if (!(std::abs(cand_res) < std::abs(res))) break;
    x = cand;
    res = cand_res;
  }
  return x;
}

void ConvexBody::support_batch(std::span<const double> c, std::span<const double> s,
                               std::span<double> h, std::span<double> dh,
                               std::span<double> d2h) const {
  simd::support_series(view_of(a0_, cos_, sin_), c.data(), s.data(), c.size(),
                       {h.data(), dh.data(), d2h.empty() ? nullptr : d2h.data()});
}

void ConvexBody::F_batch(std::span<const double> x, std::span<double> out) const {
  const std::size_t n = x.size();
  std::vector<double> c(n), s(n), h(n), dh(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = std::hypot(x[i], 1.0);
    c[i] = x[i] / r;
    s[i] = -1.0 / r;
  }
  support_batch(c, s, h, dh, {});
  for (std::size_t i = 0; i < n; ++i) out[i] = h[i] * c[i] - dh[i] * s[i];
}

void ConvexBody::lower_dual_batch(std::span<const double> g, std::span<double> out) const {
  const std::size_t n = g.size();
  std::vector<double> c(n), s(n), r(n), h(n), dh(n);
  for (std::size_t i = 0; i < n; ++i) {
    r[i] = std::hypot(g[i], 1.0);
    c[i] = g[i] / r[i];
    s[i] = -1.0 / r[i];
  }
  support_batch(c, s, h, dh, {});
  for (std::size_t i = 0; i < n; ++i) out[i] = r[i] * h[i];
}

double ConvexBody::arc_length(double theta) const {
  double acc = a0_ * theta;
  for (std::size_t k = 1; k <= cos_.size(); ++k) {
    const double kd = static_cast<double>(k);
    const double w = (1.0 - kd * kd) / kd;
    acc += w * (cos_[k - 1] * std::sin(kd * theta) + sin_[k - 1] * (1.0 - std::cos(kd * theta)));
  }
  return acc;
}

double ConvexBody::perimeter() const { return 2.0 * kPi * a0_; }

double ConvexBody::area() const {
  double acc = kPi * a0_ * a0_;
  for (std::size_t k = 1; k <= cos_.size(); ++k) {
    const double kd = static_cast<double>(k);
    acc += 0.5 * kPi * (1.0 - kd * kd) * (cos_[k - 1] * cos_[k - 1] + sin_[k - 1] * sin_[k - 1]);
  }
  return acc;
}

}  // namespace subfinsler
