#include <immintrin.h>

#include "subfinsler/simd/support_kernels.hpp"

namespace subfinsler::simd {

void support_series_avx2(const SeriesView& s, const double* c, const double* sn, std::size_t n,
                         SupportOut out) {
  std::size_t i = 0;
  const __m256d a0 = _mm256_set1_pd(s.a0);
  for (; i + 4 <= n; i += 4) {
    const __m256d c1 = _mm256_loadu_pd(c + i);
    const __m256d s1 = _mm256_loadu_pd(sn + i);
    __m256d ck = c1, sk = s1;
    __m256d h = a0;
    __m256d dh = _mm256_setzero_pd();
    __m256d d2h = _mm256_setzero_pd();
    for (std::size_t k = 1; k <= s.order; ++k) {
      const __m256d a = _mm256_set1_pd(s.cos[k - 1]);
      const __m256d b = _mm256_set1_pd(s.sin[k - 1]);
      const double kd = static_cast<double>(k);
      const __m256d kv = _mm256_set1_pd(kd);
      const __m256d kk = _mm256_set1_pd(kd * kd);
      const __m256d even = _mm256_fmadd_pd(a, ck, _mm256_mul_pd(b, sk));
      const __m256d odd = _mm256_fmsub_pd(b, ck, _mm256_mul_pd(a, sk));
      h = _mm256_add_pd(h, even);
      dh = _mm256_fmadd_pd(kv, odd, dh);
      d2h = _mm256_fnmadd_pd(kk, even, d2h);
      const __m256d cn = _mm256_fmsub_pd(ck, c1, _mm256_mul_pd(sk, s1));
      sk = _mm256_fmadd_pd(sk, c1, _mm256_mul_pd(ck, s1));
      ck = cn;
    }
    _mm256_storeu_pd(out.h + i, h);
    _mm256_storeu_pd(out.dh + i, dh);
    if (out.d2h) _mm256_storeu_pd(out.d2h + i, d2h);
  }
  if (i < n) {
    SupportOut tail{out.h + i, out.dh + i, out.d2h ? out.d2h + i : nullptr};
    support_series_scalar(s, c + i, sn + i, n - i, tail);
  }
}

}  // namespace subfinsler::simd
