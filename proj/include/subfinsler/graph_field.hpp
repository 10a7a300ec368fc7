#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace subfinsler {

/// Closed rectangle [x0, x1] x [t0, t1] in the vertical plane y = 0.
struct Domain {
  double x0 = 0.0, x1 = 1.0;
  double t0 = 0.0, t1 = 1.0;

  double width() const { return x1 - x0; }
  double height() const { return t1 - t0; }
  /// Membership with a relative slack absorbing rounding at the edges.
  bool contains(double x, double t) const;
  /// True when `inner` sits inside this rectangle shrunk by `margin`.
  bool contains(const Domain& inner, double margin = 0.0) const;
};

struct FieldSample {
  double u = 0.0;
  double ux = 0.0;
  double ut = 0.0;
};

/// Scalar function u on a rectangle, with first derivatives; defines the
/// intrinsic graph Gr(u). Either analytic (an evaluator returning u, u_x, u_t)
/// or a regular grid (bilinear interpolation of nodal values and of nodal
/// centered differences). Cheap to copy; the data is shared and immutable.
class GraphField {
 public:
  using Evaluator = std::function<FieldSample(double x, double t)>;

  static GraphField analytic(const Domain& domain, Evaluator eval);

  /// Nodal values u[it * nx + ix] on the lattice x0 + ix*dx, t0 + it*dt.
  static GraphField grid(const Domain& domain, std::size_t nx, std::size_t nt,
                         std::vector<double> values);

  /// Throws OutOfDomain outside the rectangle.
  FieldSample sample(double x, double t) const;
  double value(double x, double t) const { return sample(x, t).u; }
  /// u_x + 2 u u_t, the slope of the characteristic direction.
  double slope(double x, double t) const;

  const Domain& domain() const;
  bool is_grid() const;
  std::size_t nx() const;
  std::size_t nt() const;
  double dx() const;
  double dt() const;
  std::span<const double> grid_values() const;

  /// Grid spacing (the larger one) for grid sources, zero for analytic ones.
  double support_margin() const;

  /// max |grad u| over an n x n evaluation grid.
  double lipschitz_estimate(std::size_t n = 65) const;
  /// Largest jump of the slope u_x + 2 u u_t between neighbouring points of an
  /// n x n evaluation grid; small values indicate a continuous slope.
  double slope_jump_statistic(std::size_t n = 65) const;
  bool slope_is_continuous(double threshold, std::size_t n = 65) const {
    return slope_jump_statistic(n) <= threshold;
  }

 private:
  struct Impl;
  explicit GraphField(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

}  // namespace subfinsler
