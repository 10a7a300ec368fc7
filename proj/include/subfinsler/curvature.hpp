#pragma once

#include <vector>

#include "subfinsler/characteristic_flow.hpp"
#include "subfinsler/convex_body.hpp"
#include "subfinsler/heisenberg.hpp"
#include "subfinsler/vec2.hpp"

namespace subfinsler {

/// A horizontal curve on a surface with its horizontal unit normal nu_h and
/// characteristic direction Z = J(nu_h) at every sample.
struct FramedCurve {
  HeisenbergCurve curve;
  std::vector<Vec2> nu_h;
  std::vector<Vec2> Z;

  /// Throws NotUnit if some |nu| deviates from 1 by more than 1e-9.
  static FramedCurve from_normals(HeisenbergCurve curve, std::vector<Vec2> nu);
  /// Z = orientation * (unit horizontal velocity), nu_h = -J(Z). Use
  /// orientation -1 for clockwise boundary liftings, whose outer normal is
  /// J(velocity).
  static FramedCurve from_velocity(HeisenbergCurve curve, double orientation = 1.0);
};

/// <D_Z pi_K(nu_h), Z>. The derivative along Z is the parameter derivative
/// times <velocity, Z> = +-1. Throws NotUnitSpeed if the horizontal speed
/// deviates from 1 by more than 1e-6.
CurveScalar h_k_along(const ConvexBody& body, const FramedCurve& fc);

/// <D_Z nu_h, Z>. Same requirements as h_k_along.
CurveScalar h_d_along(const FramedCurve& fc);

/// Differential of v -> pi_K(v) at a unit vector: rho(theta) Z Z^T with
/// Z = J(nu). Throws NotUnit.
Mat2 dpi_matrix(const ConvexBody& body, Vec2 nu);
/// Central differences of pi_K with the given step, the independent route.
Mat2 dpi_matrix_fd(const ConvexBody& body, Vec2 nu, double step = 1e-6);

struct RatioReport {
  double max_gap_hd = 0.0;  // sup |H_D - kappa(pi_K(nu_h)) f|
  double max_gap_hk = 0.0;  // sup |H_K - f|
  std::size_t n_samples = 0;
  CurveScalar h_k;
  CurveScalar h_d;
  std::vector<double> kappa;  // kappa(pi_K(nu_h))
};

/// Throws GridMismatch unless f has one value per sample.
RatioReport verify_ratio(const ConvexBody& body, const FramedCurve& fc, const CurveScalar& f);

}  // namespace subfinsler
