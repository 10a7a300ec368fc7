#include <atomic>
#include <cstdlib>
#include <string_view>

#include "subfinsler/simd/support_kernels.hpp"

namespace subfinsler::simd {

namespace {

Isa initial_isa() {
  if (const char* env = std::getenv("SUBFINSLER_SIMD")) {
    if (std::string_view(env) == "scalar") return Isa::scalar;
  }
  return detected_isa();
}

std::atomic<Isa>& active() {
  static std::atomic<Isa> isa{initial_isa()};
  return isa;
}

}  // namespace

std::string_view to_string(Isa isa) {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
  }
  return "unknown";
}

Isa detected_isa() {
#if defined(SUBFINSLER_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  static const bool has = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  if (has) return Isa::avx2;
#endif
  return Isa::scalar;
}

Isa active_isa() { return active().load(std::memory_order_relaxed); }

Isa set_active_isa(Isa isa) {
  if (isa == Isa::avx2 && detected_isa() != Isa::avx2) isa = Isa::scalar;
  active().store(isa, std::memory_order_relaxed);
  return isa;
}

void support_series(const SeriesView& s, const double* c, const double* sn, std::size_t n,
                    SupportOut out) {
#if defined(SUBFINSLER_HAVE_AVX2)
  if (active_isa() == Isa::avx2) {
    support_series_avx2(s, c, sn, n, out);
    return;
  }
#endif
  support_series_scalar(s, c, sn, n, out);
}

}  // namespace subfinsler::simd
