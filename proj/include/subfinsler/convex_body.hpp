#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "subfinsler/vec2.hpp"

namespace subfinsler {

/// Support function value and its first two angular derivatives.
struct SupportJet {
  double h = 0.0;
  double dh = 0.0;
  double d2h = 0.0;
  double rho() const { return h + d2h; }
};

/// A planar convex body of class C^2_+ with the origin in its interior, given
/// by its support function as a truncated Fourier series
///   h(theta) = a0 + sum_{k>=1} a_k cos(k theta) + b_k sin(k theta).
///
/// The boundary point with outer normal u(theta) = (cos theta, sin theta) is
///   p(theta) = h u + h' u_perp,  p'(theta) = (h + h'') u_perp,
/// so the radius of curvature is rho = h + h'' and the curvature is 1/rho.
/// Everything the geometry needs (inverse Gauss map, both norms, F) is read off
/// this parameterization. Immutable after construction.
class ConvexBody {
 public:
  static constexpr std::size_t kDefaultValidationSamples = 4096;

  /// Validates by dense sampling: throws NotConvexPlus if min(h + h'') <= 0 and
  /// OriginOutside if min(h) <= 0.
  static ConvexBody make(double a0, std::vector<double> cos_coeffs, std::vector<double> sin_coeffs,
                         std::size_t validation_samples = kDefaultValidationSamples);

  static ConvexBody disk(double radius = 1.0);

  /// Ellipse with semi-axes a (along x) and b (along y) centered at the origin;
  /// its support function sqrt(a^2 cos^2 + b^2 sin^2) truncated at `harmonics`.
  static ConvexBody ellipse(double a, double b, std::size_t harmonics = 64);

  double a0() const { return a0_; }
  std::span<const double> cos_coeffs() const { return cos_; }
  std::span<const double> sin_coeffs() const { return sin_; }
  double rho_min() const { return rho_min_; }
  double h_min() const { return h_min_; }

  SupportJet support(double theta) const;
  /// Same, at the direction of a unit vector.
  SupportJet support_unit(Vec2 unit) const;

  Vec2 boundary_point(double theta) const;
  double curvature(double theta) const;
  double radius_of_curvature(double theta) const;

  /// pi_K: the boundary point whose outer normal is v/|v|. Throws ZeroVector.
  Vec2 inverse_gauss(Vec2 v) const;

  /// ||v||_{K,*} = <v, pi_K(v)> = |v| h(arg v): the support function of K.
  double dual_norm(Vec2 v) const;

  /// Minkowski gauge inf{lambda > 0 : v / lambda in K}.
  double gauge_norm(Vec2 v) const;

  /// F(x) = first coordinate of pi_K(x, -1).
  double F_value(double x) const;
  /// F'(x) = rho(theta(x)) (1 + x^2)^{-3/2} with theta(x) = atan2(-1, x).
  double F_derivative(double x) const;
  /// Solves F(x) = m; throws OutOfRange unless m lies strictly inside F_range().
  double F_inverse(double m) const;
  /// Open range of F: (-h(pi), h(0)), the x-extent of the lower boundary arc.
  std::pair<double, double> F_range() const;

  /// Batched F over many slopes through the SIMD kernel.
  void F_batch(std::span<const double> x, std::span<double> out) const;
  /// Batched ||(g, -1)||_{K,*}, the intrinsic-graph area integrand.
  void lower_dual_batch(std::span<const double> g, std::span<double> out) const;
  /// Batched support jets at unit directions.
  void support_batch(std::span<const double> c, std::span<const double> s, std::span<double> h,
                     std::span<double> dh, std::span<double> d2h) const;

  /// int_0^theta rho, the boundary arc length measured counterclockwise from theta = 0.
  double arc_length(double theta) const;
  double perimeter() const;
  /// Enclosed area, 1/2 int h rho dtheta in closed form.
  double area() const;

 private:
  ConvexBody() = default;
  void validate(std::size_t samples);

  double a0_ = 0.0;
  std::vector<double> cos_;
  std::vector<double> sin_;
  double rho_min_ = 0.0;
  double h_min_ = 0.0;
};

}  // namespace subfinsler
