#include "svp/kernels.hpp"

#include <stdexcept>

namespace svp::kern {

const Ops& scalar_ops();
#if defined(__AVX2__) || (defined(__x86_64__) && !defined(_MSC_VER))
const Ops& avx2_ops();
#endif
#if defined(__ARM_NEON) || defined(__ARM_NEON__)
const Ops& neon_ops();
#endif

bool backend_available(Backend b) {
  switch (b) {
    case Backend::Scalar:
      return true;
    case Backend::Avx2:
#if defined(__x86_64__) && !defined(_MSC_VER)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
    case Backend::Neon:
#if defined(__ARM_NEON) || defined(__ARM_NEON__)
      return true;
#else
      return false;
#endif
  }
  return false;
}

const Ops& ops(Backend b) {
  switch (b) {
#if defined(__x86_64__) && !defined(_MSC_VER)
    case Backend::Avx2:
      if (backend_available(Backend::Avx2)) return avx2_ops();
      throw std::runtime_error("AVX2 backend not supported on this CPU");
#endif
#if defined(__ARM_NEON) || defined(__ARM_NEON__)
    case Backend::Neon:
      return neon_ops();
#endif
    case Backend::Scalar:
      return scalar_ops();
    default:
      throw std::runtime_error("kernel backend not compiled in");
  }
}

Backend detect_backend() {
#if defined(__ARM_NEON) || defined(__ARM_NEON__)
  return Backend::Neon;
#elif defined(__x86_64__) && !defined(_MSC_VER)
  return backend_available(Backend::Avx2) ? Backend::Avx2 : Backend::Scalar;
#else
  return Backend::Scalar;
#endif
}

namespace {
const Ops* g_active = nullptr;
}

const Ops& active() {
  if (!g_active) g_active = &ops(detect_backend());
  return *g_active;
}

void force_backend(Backend b) { g_active = &ops(b); }

void reset_backend() { g_active = nullptr; }

}  // namespace svp::kern
