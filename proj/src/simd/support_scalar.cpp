#include "subfinsler/simd/support_kernels.hpp"

namespace subfinsler::simd {

void support_series_scalar(const SeriesView& s, const double* c, const double* sn, std::size_t n,
                           SupportOut out) {
  for (std::size_t i = 0; i < n; ++i) {
    const double c1 = c[i], s1 = sn[i];
    double ck = c1, sk = s1;
    double h = s.a0, dh = 0.0, d2h = 0.0;
    for (std::size_t k = 1; k <= s.order; ++k) {
      const double a = s.cos[k - 1], b = s.sin[k - 1];
      const double kk = static_cast<double>(k);
      const double even = a * ck + b * sk;
      h += even;
      dh += kk * (b * ck - a * sk);
      d2h -= kk * kk * even;
      const double cn = ck * c1 - sk * s1;
      sk = sk * c1 + ck * s1;
      ck = cn;
    }
    out.h[i] = h;
    out.dh[i] = dh;
    if (out.d2h) out.d2h[i] = d2h;
  }
}

}  // namespace subfinsler::simd
