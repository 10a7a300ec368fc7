#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "subfinsler/vec2.hpp"

namespace subfinsler {

/// A point (x, y, t) of the first Heisenberg group.
struct HeisenbergPoint {
  double x = 0.0;
  double y = 0.0;
  double t = 0.0;
};

constexpr bool operator==(const HeisenbergPoint& a, const HeisenbergPoint& b) {
  return a.x == b.x && a.y == b.y && a.t == b.t;
}

/// Coordinate tangent vector (dx, dy, dt).
struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double t = 0.0;
};

constexpr bool operator==(const Vec3& a, const Vec3& b) {
  return a.x == b.x && a.y == b.y && a.t == b.t;
}

/// (x, y, t) * (x', y', t') = (x + x', y + y', t + t' + x' y - x y').
constexpr HeisenbergPoint group_product(const HeisenbergPoint& p, const HeisenbergPoint& q) {
  return {p.x + q.x, p.y + q.y, p.t + q.t + q.x * p.y - p.x * q.y};
}

constexpr HeisenbergPoint group_inverse(const HeisenbergPoint& p) { return {-p.x, -p.y, -p.t}; }

/// Left translation L_p(q) = p * q.
constexpr HeisenbergPoint left_translate(const HeisenbergPoint& p, const HeisenbergPoint& q) {
  return group_product(p, q);
}

/// Differential of L_p acting on a coordinate vector.
constexpr Vec3 left_translate_vector(const HeisenbergPoint& p, const Vec3& v) {
  return {v.x, v.y, v.t + p.y * v.x - p.x * v.y};
}

enum class Frame { X, Y, T };

/// Left-invariant frame: X = d/dx + y d/dt, Y = d/dy - x d/dt, T = d/dt.
constexpr Vec3 frame_vector(Frame kind, const HeisenbergPoint& p) {
  switch (kind) {
    case Frame::X: return {1.0, 0.0, p.y};
    case Frame::Y: return {0.0, 1.0, -p.x};
    case Frame::T: return {0.0, 0.0, 1.0};
  }
  return {};
}

/// Contact form omega = dt - y dx + x dy; its kernel is the horizontal plane.
constexpr double contact_form(const HeisenbergPoint& p, const Vec3& v) {
  return v.t - p.y * v.x + p.x * v.y;
}

/// Levi-Civita connection of the left-invariant metric making X, Y, T
/// orthonormal: D_A B expressed in the frame, as (X, Y, T) coefficients.
/// Only the tests consult it; horizontal fields along curves are
/// differentiated componentwise.
constexpr std::array<double, 3> levi_civita(Frame a, Frame b) {
  constexpr std::array<std::array<std::array<double, 3>, 3>, 3> table = {{
      // D_X X, D_X Y, D_X T
      {{{0, 0, 0}, {0, 0, -1}, {0, 1, 0}}},
      // D_Y X, D_Y Y, D_Y T
      {{{0, 0, 1}, {0, 0, 0}, {-1, 0, 0}}},
      // D_T X, D_T Y, D_T T
      {{{0, 1, 0}, {-1, 0, 0}, {0, 0, 0}}},
  }};
  return table[static_cast<int>(a)][static_cast<int>(b)];
}

/// A horizontal vector fX + gY based at a point.
struct HorizontalVector {
  HeisenbergPoint base;
  double f = 0.0;
  double g = 0.0;

  Vec3 coordinates() const { return {f, g, f * base.y - g * base.x}; }
  Vec2 coefficients() const { return {f, g}; }
  HorizontalVector rotated() const { return {base, -g, f}; }  // J
};

/// Sampled curve in H^1 with strictly increasing parameters.
class HeisenbergCurve {
 public:
  HeisenbergCurve() = default;
  /// Throws NonMonotoneParam unless params increase strictly.
  HeisenbergCurve(std::vector<double> params, std::vector<HeisenbergPoint> points);

  std::span<const double> params() const { return params_; }
  std::span<const HeisenbergPoint> points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  const HeisenbergPoint& front() const { return points_.front(); }
  const HeisenbergPoint& back() const { return points_.back(); }

  /// max |omega(velocity)| over the samples, velocity by five-point differences.
  double horizontality_residual() const { return residual_; }
  /// Per-sample |omega(velocity)|.
  std::vector<double> horizontality_profile() const;

  std::vector<double> xs() const;
  std::vector<double> ys() const;
  std::vector<double> ts() const;

  /// Same trace traversed backwards, parameter s -> s_first + s_last - s.
  HeisenbergCurve reversed() const;
  /// Applies L_p to every sample.
  HeisenbergCurve translated(const HeisenbergPoint& p) const;

 private:
  std::vector<double> params_;
  std::vector<HeisenbergPoint> points_;
  double residual_ = 0.0;
};

/// Planar curve samples; velocities are optional (differences are used otherwise).
struct PlanarCurve {
  std::vector<double> params;
  std::vector<double> x;
  std::vector<double> y;
  std::optional<std::vector<double>> dx;
  std::optional<std::vector<double>> dy;
};

/// Horizontal lift t(s) = t0 + int_{s_0}^{s} (y x' - x y') on the sample grid.
HeisenbergCurve horizontal_lift(const PlanarCurve& curve, double t0);

/// Componentwise parameter derivative of a horizontal field (f_i, g_i) along
/// the curve (X and Y are parallel for the pseudo-hermitian connection).
/// Throws TooFewSamples below five samples.
std::vector<Vec2> covariant_derivative_horizontal(const HeisenbergCurve& curve,
                                                  std::span<const Vec2> field);

/// Resamples a horizontal curve at `samples` points uniformly spaced in the
/// sub-Riemannian arc length sqrt(x'^2 + y'^2); 0 keeps the sample count.
HeisenbergCurve reparameterize_arclength(const HeisenbergCurve& curve, std::size_t samples = 0);

}  // namespace subfinsler
