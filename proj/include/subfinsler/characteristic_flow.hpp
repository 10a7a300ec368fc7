#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "subfinsler/convex_body.hpp"
#include "subfinsler/graph_field.hpp"
#include "subfinsler/heisenberg.hpp"
#include "subfinsler/intrinsic_graph.hpp"

namespace subfinsler {

/// Closed parameter interval.
struct Span {
  double lo = 0.0;
  double hi = 0.0;
};

/// Samples of a scalar along a curve parameter.
struct CurveScalar {
  std::vector<double> params;
  std::vector<double> values;
};

/// Uniform samples of [span.lo, span.hi] through `anchor`: the spacing is
/// the largest value <= step that divides each side evenly.
std::vector<double> anchored_grid(double anchor, Span span, double step);

/// Projection of a characteristic curve onto the (x, t) plane, parameterized by
/// xi = x and solving t'(xi) = 2 u(xi, t(xi)), t(a) = b.
struct Leaf {
  double a = 0.0;
  double b = 0.0;
  std::vector<double> xi;
  std::vector<double> t;
  std::vector<double> u;  // u(xi, t(xi))
  std::vector<double> g;  // slope u_x + 2 u u_t along the leaf
  /// The requested span was cut short because the leaf left the domain.
  bool exited_domain = false;
  /// Accumulated Richardson error estimate (grid fields only).
  double error_estimate = 0.0;
  HeisenbergCurve lifted;  // Phi^u along the leaf
};

struct LeafOptions {
  double step = 1e-3;
  /// Local tolerance of the Heun step control on grid fields.
  double tolerance = 1e-9;
  /// Integrate a neighbouring probe leaf and require the two to stay ordered.
  bool probe = true;
};

/// RK4 with fixed step on analytic fields, Heun with half-step Richardson
/// control on grid fields. Output samples are uniform on each side of a.
/// Throws StartOutOfDomain, StepTooLarge.
Leaf integrate_leaf(const GraphField& u, double a, double b, Span span, const LeafOptions& opts = {});

/// max |t'(xi) - 2 u(xi, t(xi))| with t' from five-point differences.
double ode_residual(const GraphField& u, const Leaf& leaf);

/// Leaves t_eps started at (a, b + eps) for eps on a uniform grid.
struct CharacteristicFamily {
  double a = 0.0;
  double b = 0.0;
  std::vector<double> eps;
  std::vector<Leaf> leaves;
  /// Common xi grid; t and jacobian are row-major [k * xi.size() + i] with NaN
  /// where a leaf stopped early.
  std::vector<double> xi;
  std::vector<double> t;
  std::vector<double> jacobian;  // d t_eps / d eps

  double t_at(std::size_t k, std::size_t i) const { return t[k * xi.size() + i]; }
  double jacobian_at(std::size_t k, std::size_t i) const { return jacobian[k * xi.size() + i]; }
};

/// Throws OrderingViolation if two leaves touch or cross, and propagates leaf errors.
CharacteristicFamily build_family(const GraphField& u, double a, double b, Span eps_range,
                                  std::size_t n_leaves, Span span, const LeafOptions& opts = {});

struct ChangeOfVariables {
  double direct = 0.0;    // int psi dx dt
  double pulled_back = 0.0;  // int psi(G(xi, eps)) J dxi deps
};

/// Compares the two sides of the change of variables through the chart G.
/// Throws SupportOutsideChart unless the support of psi lies in the chart image.
ChangeOfVariables change_of_variables_check(const CharacteristicFamily& family, const TestField& psi,
                                            const QuadratureOptions& opts = {});

/// M = F(g) along the leaf.
CurveScalar m_along(const Leaf& leaf, const ConvexBody& body);

struct FEstimate {
  std::vector<double> params;
  std::vector<double> values;     // dM/dxi
  std::vector<double> residuals;  // RMS misfit of each local quadratic
};

/// Derivative of M by local least-squares quadratics over 2*window+1 samples
/// (windows are shifted inward at the ends). Throws TooFewSamples.
FEstimate estimate_f(const CurveScalar& m, std::size_t window = 7);

enum class Regularity { C2Consistent, C2Violation, Inconclusive };
const char* to_string(Regularity r);

struct RegularityReport {
  Regularity verdict = Regularity::Inconclusive;
  /// max |c(xi + kh) - 2 c(xi) + c(xi - kh)| / (kh)^2 over the lifted coordinates,
  /// for strides k = 1, 2, 4.
  std::vector<double> quotients;
  std::vector<double> spacings;
  double drift = 0.0;  // largest relative change between successive strides
};

/// Second-difference convergence test of a uniformly sampled curve.
/// Throws TooFewSamples below nine samples and InvalidArgument on a
/// non-uniform grid.
RegularityReport regularity_diagnostic(const HeisenbergCurve& curve);
inline RegularityReport regularity_diagnostic(const Leaf& leaf) {
  return regularity_diagnostic(leaf.lifted);
}

using CurveFunction = std::function<double(double xi)>;

struct SlopeProfile {
  std::vector<double> params;
  std::vector<double> M;
  std::vector<double> g;
};

/// M(xi) = F(g0) + int_{anchor}^{xi} f and g = F^{-1}(M) on a uniform grid of
/// the span (the anchor must lie in it). Throws RangeEscapeError at the
/// crossing nearest to the anchor when M leaves the range of F.
SlopeProfile reconstruct_slope(const ConvexBody& body, const CurveFunction& f, double g0,
                               double anchor, Span span, double step);

}  // namespace subfinsler
