#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "subfinsler/convex_body.hpp"
#include "subfinsler/graph_field.hpp"
#include "subfinsler/heisenberg.hpp"
#include "subfinsler/vec2.hpp"

namespace subfinsler {

using ScalarField = std::function<double(double x, double t)>;

/// Phi^u(x, t) = (x, u, t - x u). Throws OutOfDomain.
HeisenbergPoint graph_map(const GraphField& u, double x, double t);

/// Frame data of Gr(u) at Phi^u(x, t).
struct GraphPointData {
  double x = 0.0;
  double t = 0.0;
  double g = 0.0;       // u_x + 2 u u_t
  Vec3 N_tilde;         // (g, -1, u_t) as X, Y, T coefficients
  Vec2 N_tilde_h;       // (g, -1)
  Vec2 nu_h;            // N_tilde_h / |N_tilde_h|
  Vec2 Z_tilde;         // (1, g)
  Vec2 Z;               // Z_tilde / |Z_tilde|, so J(Z) = -nu_h
  double jac = 0.0;     // |N_tilde| = sqrt(g^2 + 1 + u_t^2)
};

GraphPointData point_data(const GraphField& u, double x, double t);

/// Tensor-product polynomial bumps
///   v(x, t) = sum_k w_k phi((x - cx_k) / wx_k) phi((t - ct_k) / wt_k),
///   phi(r) = (1 - r^2)^4 on |r| < 1.
class TestField {
 public:
  struct Bump {
    double weight = 1.0;
    double cx = 0.0, ct = 0.0;
    double wx = 1.0, wt = 1.0;
  };

  TestField() = default;
  explicit TestField(std::vector<Bump> bumps);
  static TestField bump(double cx, double ct, double wx, double wt, double weight = 1.0);

  double value(double x, double t) const;
  /// (v, v_x, v_t).
  FieldSample sample(double x, double t) const;
  /// Bounding box of the support.
  Domain support() const;

  std::span<const Bump> bumps() const { return bumps_; }
  TestField scaled(double factor) const;
  TestField operator+(const TestField& other) const;

  /// Exact integral of one unit bump: (int phi)^2 wx wt, int_{-1}^{1} phi = 256/315.
  double exact_integral() const;

 private:
  std::vector<Bump> bumps_;
};

struct QuadratureOptions {
  int cells_x = 16;
  int cells_t = 16;
  int order = 8;
};

/// Tensor Gauss-Legendre quadrature of a batched integrand over a box. The
/// integrand receives node coordinates and fills values; cells are processed
/// in parallel and summed in a fixed order with compensation.
using BatchIntegrand =
    std::function<void(std::span<const double> x, std::span<const double> t, std::span<double> out)>;
double integrate_box(const Domain& box, const BatchIntegrand& integrand,
                     const QuadratureOptions& opts = {});

/// int_D ||(g, -1)||_{K,*} dx dt, the K-perimeter of the epigraph inside the
/// cylinder over D. Throws QuadratureFailure on non-finite integrand values.
double area_K(const GraphField& u, const ConvexBody& body, const QuadratureOptions& opts = {});
/// Same integral over a sub-rectangle of the domain.
double area_K(const GraphField& u, const ConvexBody& body, const Domain& region,
              const QuadratureOptions& opts = {});

/// d/ds A_K(Gr(u + s v)) at s = 0:
///   int (v_x + 2 v u_t + 2 u v_t) F(g) dx dt over the support box of v.
/// Throws SupportViolation unless the support keeps one grid cell (grid
/// fields) away from the boundary.
double first_variation_area(const GraphField& u, const TestField& v, const ConvexBody& body,
                            const QuadratureOptions& opts = {});

/// int v dx dt.
double volume_variation(const TestField& v, const QuadratureOptions& opts = {});
/// int |v| dx dt.
double l1_norm(const TestField& v, const QuadratureOptions& opts = {});

struct ResidualReport {
  double max_residual = 0.0;
  std::vector<double> per_test;  // |Q(v) + int f v| / ||v||_1
};

/// Weak prescribed-curvature equation tested against a battery.
ResidualReport criticality_residual_report(const GraphField& u, const ScalarField& f,
                                           const ConvexBody& body,
                                           std::span<const TestField> tests,
                                           const QuadratureOptions& opts = {});
double criticality_residual(const GraphField& u, const ScalarField& f, const ConvexBody& body,
                            std::span<const TestField> tests, const QuadratureOptions& opts = {});

/// Curvature read off a single variation: -Q(v) / int v. The epigraph loses
/// volume when the graph moves up, hence the sign. Throws ZeroVolumeVariation.
double h0_estimate(const GraphField& u, const ConvexBody& body, const TestField& v,
                   const QuadratureOptions& opts = {});

/// u + s v as an analytic field on the same domain.
GraphField perturbed(const GraphField& u, const TestField& v, double s);

struct BatteryOptions {
  /// Bump half-widths as fractions of the half-extent available per axis.
  std::vector<double> scales = {0.2, 0.35, 0.5};
  int centers_per_axis = 3;
  /// 0 places centers on a regular grid; otherwise centers are drawn
  /// uniformly (reproducibly) from the admissible range.
  std::uint64_t seed = 0;
};

/// Scales x centers_per_axis^2 bumps, each supported in the domain shrunk by `margin`.
std::vector<TestField> bump_battery(const Domain& domain, double margin,
                                    const BatteryOptions& opts = {});

}  // namespace subfinsler
