#include "subfinsler/numerics.hpp"

#include <atomic>

#include <array>
#include <cmath>
#include <cstdlib>
#include <map>
#include <numbers>

#include "subfinsler/errors.hpp"

namespace subfinsler {

namespace {

GaussRule build_gauss(int n) {
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    // Chebyshev-like initial guess, then Newton on P_n.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double pn = n == 1 ? x : p1;
      const double pn1 = n == 1 ? 1.0 : p0;
      dp = n * (x * pn - pn1) / (x * x - 1.0);
      const double dx = pn / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    const double pn = n == 1 ? x : p1;
    const double pn1 = n == 1 ? 1.0 : p0;
    dp = n * (x * pn - pn1) / (x * x - 1.0);
    rule.nodes[n - 1 - i] = x;
    rule.weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

}  // namespace

const GaussRule& gauss_legendre(int order) {
  if (order < 1 || order > 64) {
    throw Error(ErrorKind::InvalidArgument, "Gauss-Legendre order must be in [1, 64]");
  }
  static std::mutex mutex;
  static std::map<int, GaussRule> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(order);
  if (it == cache.end()) it = cache.emplace(order, build_gauss(order)).first;
  return it->second;
}

std::vector<double> fd_weights(double x0, std::span<const double> nodes, int m) {
  const int n = static_cast<int>(nodes.size()) - 1;
  // c[j][k]: weight of node j for derivative k.
  std::vector<std::vector<double>> c(n + 1, std::vector<double>(m + 1, 0.0));
  double c1 = 1.0;
  double c4 = nodes[0] - x0;
  c[0][0] = 1.0;
  for (int i = 1; i <= n; ++i) {
    const int mn = std::min(i, m);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = nodes[i] - x0;
    for (int j = 0; j < i; ++j) {
      const double c3 = nodes[i] - nodes[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) {
          c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        }
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (int k = mn; k >= 1; --k) {
        c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
      }
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(n + 1);
  for (int j = 0; j <= n; ++j) w[j] = c[j][m];
  return w;
}

std::vector<double> differentiate(std::span<const double> params, std::span<const double> values) {
  const std::size_t n = params.size();
  if (values.size() != n) throw Error(ErrorKind::GridMismatch, "differentiate: size mismatch");
  if (n < 5) throw Error(ErrorKind::TooFewSamples, "differentiate needs at least 5 samples");
  std::vector<double> out(n);
  const bool uniform = is_uniform(params);
  const double h = (params[n - 1] - params[0]) / static_cast<double>(n - 1);
  // Uniform stencils, in units of 1/h, for offsets of the target within the window.
  static constexpr std::array<std::array<double, 5>, 5> kUniform = {{
      {-25.0 / 12, 4.0, -3.0, 4.0 / 3, -0.25},
      {-0.25, -5.0 / 6, 1.5, -0.5, 1.0 / 12},
      {1.0 / 12, -2.0 / 3, 0.0, 2.0 / 3, -1.0 / 12},
      {-1.0 / 12, 0.5, -1.5, 5.0 / 6, 0.25},
      {0.25, -4.0 / 3, 3.0, -4.0, 25.0 / 12},
  }};
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i < 2 ? 0 : (i + 2 >= n ? n - 5 : i - 2);
    const std::size_t pos = i - lo;
    double acc = 0.0;
    if (uniform) {
      for (std::size_t j = 0; j < 5; ++j) acc += kUniform[pos][j] * values[lo + j];
      out[i] = acc / h;
    } else {
      const auto w = fd_weights(params[i], params.subspan(lo, 5), 1);
      for (std::size_t j = 0; j < 5; ++j) acc += w[j] * values[lo + j];
      out[i] = acc;
    }
  }
  return out;
}

std::vector<double> cumulative_integral(std::span<const double> params,
                                        std::span<const double> values) {
  const std::size_t n = params.size();
  if (values.size() != n) throw Error(ErrorKind::GridMismatch, "cumulative_integral: size mismatch");
  std::vector<double> out(n, 0.0);
  if (n < 2) return out;
  const std::size_t width = std::min<std::size_t>(4, n);
  // Two-point Gauss integrates the cubic interpolant exactly.
  const double g = 1.0 / std::sqrt(3.0);
  CompensatedSum total;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    std::size_t lo = i == 0 ? 0 : i - 1;
    if (lo + width > n) lo = n - width;
    const double a = params[i], b = params[i + 1];
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double piece = 0.0;
    for (double q : {mid - half * g, mid + half * g}) {
      // Lagrange interpolation at q through nodes lo..lo+width-1.
      double val = 0.0;
      for (std::size_t j = 0; j < width; ++j) {
        double basis = 1.0;
        for (std::size_t k = 0; k < width; ++k) {
          if (k == j) continue;
          basis *= (q - params[lo + k]) / (params[lo + j] - params[lo + k]);
        }
        val += basis * values[lo + j];
      }
      piece += half * val;
    }
    total.add(piece);
    out[i + 1] = total.value();
  }
  return out;
}

double interpolate_cubic(std::span<const double> params, std::span<const double> values,
                         double x) {
  const std::size_t n = params.size();
  if (n == 0 || values.size() != n) throw Error(ErrorKind::GridMismatch, "interpolate_cubic: bad sizes");
  if (n == 1) return values[0];
  const std::size_t width = std::min<std::size_t>(4, n);
  const auto it = std::upper_bound(params.begin(), params.end(), x);
  std::size_t right = static_cast<std::size_t>(it - params.begin());
  if (right == 0) right = 1;
  if (right >= n) right = n - 1;
  // Interval [right-1, right]; centre the stencil on it.
  std::size_t lo = right >= 2 ? right - 2 : 0;
  if (lo + width > n) lo = n - width;
  double val = 0.0;
  for (std::size_t j = 0; j < width; ++j) {
    double basis = 1.0;
    for (std::size_t k = 0; k < width; ++k) {
      if (k == j) continue;
      basis *= (x - params[lo + k]) / (params[lo + j] - params[lo + k]);
    }
    val += basis * values[lo + j];
  }
  return val;
}

bool is_uniform(std::span<const double> params, double rtol) {
  if (params.size() < 3) return true;
  const double h = (params.back() - params.front()) / static_cast<double>(params.size() - 1);
  for (std::size_t i = 0; i + 1 < params.size(); ++i) {
    if (std::abs((params[i + 1] - params[i]) - h) > rtol * std::abs(h)) return false;
  }
  return true;
}

namespace {
std::atomic<std::size_t> thread_override{0};
}  // namespace

void set_thread_count(std::size_t n) { thread_override.store(n); }

std::size_t thread_count() {
  if (const std::size_t n = thread_override.load()) return n;
  static const std::size_t count = [] {
    if (const char* env = std::getenv("SUBFINSLER_THREADS")) {
      const long v = std::strtol(env, nullptr, 10);
      if (v >= 1) return static_cast<std::size_t>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return static_cast<std::size_t>(hw == 0 ? 1 : hw);
  }();
  return count;
}

}  // namespace subfinsler
