#pragma once

// Batched evaluation of a truncated Fourier support function
//   h(theta) = a0 + sum_k (a_k cos k theta + b_k sin k theta)
// and its first two angular derivatives, at directions given as unit vectors
// (cos theta, sin theta). Directions rather than angles keep the inner loop free
// of transcendental calls: cos k theta and sin k theta come from the rotation
// recurrence, which vectorizes cleanly.

#include <cstddef>
#include <string_view>

namespace subfinsler::simd {

enum class Isa { scalar, avx2 };

std::string_view to_string(Isa isa);

struct SeriesView {
  double a0 = 0.0;
  const double* cos = nullptr;  // a_1..a_order
  const double* sin = nullptr;  // b_1..b_order
  std::size_t order = 0;
};

/// Output arrays have length n; d2h may be null when not needed.
struct SupportOut {
  double* h = nullptr;
  double* dh = nullptr;
  double* d2h = nullptr;
};

void support_series_scalar(const SeriesView& s, const double* c, const double* sn, std::size_t n,
                           SupportOut out);

#if defined(SUBFINSLER_HAVE_AVX2)
void support_series_avx2(const SeriesView& s, const double* c, const double* sn, std::size_t n,
                         SupportOut out);
#endif

/// Best ISA this CPU supports (cpuid), independent of any override.
Isa detected_isa();

/// ISA used by support_series(). Defaults to detected_isa() unless the
/// environment sets SUBFINSLER_SIMD=scalar.
Isa active_isa();

/// Forces an ISA; requests above detected_isa() are clamped. Returns the ISA in effect.
Isa set_active_isa(Isa isa);

/// Dispatches to the active variant.
void support_series(const SeriesView& s, const double* c, const double* sn, std::size_t n,
                    SupportOut out);

}  // namespace subfinsler::simd
