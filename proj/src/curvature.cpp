#include "subfinsler/curvature.hpp"

#include <cmath>
#include <string>

#include "subfinsler/errors.hpp"
#include "subfinsler/numerics.hpp"

namespace subfinsler {

namespace {

std::vector<Vec2> horizontal_velocity(const HeisenbergCurve& curve) {
  if (curve.size() < 5) throw Error(ErrorKind::TooFewSamples, "framed curves need 5 samples");
  const auto dx = differentiate(curve.params(), curve.xs());
  const auto dy = differentiate(curve.params(), curve.ys());
  std::vector<Vec2> v(dx.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = {dx[i], dy[i]};
  return v;
}

// Velocity component along Z; +-1 for unit-speed curves framed along their tangent.
std::vector<double> orientation_along(const FramedCurve& fc) {
  const auto vel = horizontal_velocity(fc.curve);
  std::vector<double> sigma(vel.size());
  for (std::size_t i = 0; i < vel.size(); ++i) {
    const double speed = norm(vel[i]);
    if (std::abs(speed - 1.0) > 1e-6) {
      throw Error(ErrorKind::NotUnitSpeed, "horizontal speed " + std::to_string(speed) +
                                               " at sample " + std::to_string(i));
    }
    sigma[i] = dot(vel[i], fc.Z[i]);
  }
  return sigma;
}

CurveScalar directional(const FramedCurve& fc, const std::vector<Vec2>& field) {
  const auto sigma = orientation_along(fc);
  const auto d = covariant_derivative_horizontal(fc.curve, field);
  CurveScalar out;
  out.params.assign(fc.curve.params().begin(), fc.curve.params().end());
  out.values.resize(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) out.values[i] = sigma[i] * dot(d[i], fc.Z[i]);
  return out;
}

void require_unit(Vec2 v) {
  if (std::abs(norm(v) - 1.0) > 1e-9) {
    throw Error(ErrorKind::NotUnit, "vector of length " + std::to_string(norm(v)) + " is not unit");
  }
}

}  // namespace

FramedCurve FramedCurve::from_normals(HeisenbergCurve curve, std::vector<Vec2> nu) {
  if (nu.size() != curve.size()) throw Error(ErrorKind::GridMismatch, "one normal per sample required");
  FramedCurve fc;
  fc.Z.reserve(nu.size());
  for (Vec2 n : nu) {
    require_unit(n);
    fc.Z.push_back(apply_J(n));
  }
  fc.curve = std::move(curve);
  fc.nu_h = std::move(nu);
  return fc;
}

FramedCurve FramedCurve::from_velocity(HeisenbergCurve curve, double orientation) {
  const auto vel = horizontal_velocity(curve);
  FramedCurve fc;
  fc.Z.resize(vel.size());
  fc.nu_h.resize(vel.size());
  for (std::size_t i = 0; i < vel.size(); ++i) {
    const double speed = norm(vel[i]);
    if (!(speed > 0.0)) throw Error(ErrorKind::ZeroVector, "curve has zero horizontal velocity");
    fc.Z[i] = vel[i] * (orientation / speed);
    fc.nu_h[i] = apply_J(fc.Z[i]) * -1.0;
  }
  fc.curve = std::move(curve);
  return fc;
}

CurveScalar h_k_along(const ConvexBody& body, const FramedCurve& fc) {
  std::vector<Vec2> pi(fc.nu_h.size());
  for (std::size_t i = 0; i < pi.size(); ++i) pi[i] = body.inverse_gauss(fc.nu_h[i]);
  return directional(fc, pi);
}

CurveScalar h_d_along(const FramedCurve& fc) { return directional(fc, fc.nu_h); }

Mat2 dpi_matrix(const ConvexBody& body, Vec2 nu) {
  require_unit(nu);
  const double rho = body.radius_of_curvature(std::atan2(nu.y, nu.x));
  const Vec2 z = apply_J(nu);
  return {rho * z.x * z.x, rho * z.x * z.y, rho * z.y * z.x, rho * z.y * z.y};
}

Mat2 dpi_matrix_fd(const ConvexBody& body, Vec2 nu, double step) {
  require_unit(nu);
  const Vec2 dxp = body.inverse_gauss(nu + Vec2{step, 0.0});
  const Vec2 dxm = body.inverse_gauss(nu - Vec2{step, 0.0});
  const Vec2 dyp = body.inverse_gauss(nu + Vec2{0.0, step});
  const Vec2 dym = body.inverse_gauss(nu - Vec2{0.0, step});
  const Vec2 cx = (dxp - dxm) * (0.5 / step);
  const Vec2 cy = (dyp - dym) * (0.5 / step);
  return {cx.x, cy.x, cx.y, cy.y};
}

RatioReport verify_ratio(const ConvexBody& body, const FramedCurve& fc, const CurveScalar& f) {
  if (f.values.size() != fc.curve.size()) {
    throw Error(ErrorKind::GridMismatch, "prescribed curvature has " + std::to_string(f.values.size()) +
                                             " samples, curve has " + std::to_string(fc.curve.size()));
  }
  RatioReport rep;
  rep.h_k = h_k_along(body, fc);
  rep.h_d = h_d_along(fc);
  rep.n_samples = fc.curve.size();
  rep.kappa.resize(rep.n_samples);
  for (std::size_t i = 0; i < rep.n_samples; ++i) {
    rep.kappa[i] = body.curvature(std::atan2(fc.nu_h[i].y, fc.nu_h[i].x));
    rep.max_gap_hd = std::max(rep.max_gap_hd, std::abs(rep.h_d.values[i] - rep.kappa[i] * f.values[i]));
    rep.max_gap_hk = std::max(rep.max_gap_hk, std::abs(rep.h_k.values[i] - f.values[i]));
  }
  return rep;
}

}  // namespace subfinsler
