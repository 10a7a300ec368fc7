#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <exception>
#include <mutex>
#include <span>
#include <thread>
#include <vector>

namespace subfinsler {

/// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Rules are computed once per order and cached; order in [1, 64].
const GaussRule& gauss_legendre(int order);

/// Neumaier compensated summation. Totals do not depend on how partial sums
/// were split across threads as long as they are added back in a fixed order.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Finite-difference weights for the m-th derivative at x0 on arbitrary
/// nodes (Fornberg's recursion). Returns weights for derivative order m.
std::vector<double> fd_weights(double x0, std::span<const double> nodes, int m);

/// First derivative of sampled values: five-point stencils, centered in the
/// interior and one-sided at the ends. Fourth order on smooth data.
/// Throws TooFewSamples below five samples.
std::vector<double> differentiate(std::span<const double> params, std::span<const double> values);

/// Cumulative integral F(s_i) = int_{s_0}^{s_i} f with the cubic
/// interpolatory rule on each interval (Simpson family, fourth order).
std::vector<double> cumulative_integral(std::span<const double> params,
                                        std::span<const double> values);

/// Local cubic Lagrange interpolation of (params, values) at x; params must
/// be strictly increasing. Clamps the stencil at the ends, extrapolates outside.
double interpolate_cubic(std::span<const double> params, std::span<const double> values, double x);

/// True when successive spacings agree to `rtol` relative.
bool is_uniform(std::span<const double> params, double rtol = 1e-9);

/// Threads used by parallel loops: SUBFINSLER_THREADS if set, else hardware.
std::size_t thread_count();
/// Overrides thread_count(); 0 restores the default.
void set_thread_count(std::size_t n);

/// Static-chunked parallel loop over [0, n). fn(i) must only write to slot i
/// of caller-owned storage; the first exception thrown is rethrown.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  const std::size_t workers = std::min(thread_count(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      const std::size_t lo = n * w / workers;
      const std::size_t hi = n * (w + 1) / workers;
      try {
        for (std::size_t i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace subfinsler
