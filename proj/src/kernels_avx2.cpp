// AVX2 variants of the kernel table. This translation unit is compiled with
// -mavx2; callers reach it only through the dispatch table after a runtime
// CPU check. All entries except `dot` keep the scalar backend's per-lane
// operation order so results are bitwise identical (FMA contraction is
// disabled project-wide).

#include "svp/kernels.hpp"

#if defined(__AVX2__)

#include <immintrin.h>

namespace svp::kern {
namespace {

void multiply_avx2(const float* a, const float* b, float* out, int n) {
  int i = 0;
  for (; i + 8 <= n; i += 8) {
    _mm256_storeu_ps(out + i, _mm256_mul_ps(_mm256_loadu_ps(a + i),
                                            _mm256_loadu_ps(b + i)));
  }
  for (; i < n; ++i) out[i] = a[i] * b[i];
}

void scale_avx2(const float* x, float s, float* out, int n) {
  const __m256 sv = _mm256_set1_ps(s);
  int i = 0;
  for (; i + 8 <= n; i += 8) {
    _mm256_storeu_ps(out + i, _mm256_mul_ps(_mm256_loadu_ps(x + i), sv));
  }
  for (; i < n; ++i) out[i] = x[i] * s;
}

void window_hsum_avx2(const float* src, float* dst, int n, int radius) {
  int i = 0;
  for (; i + 8 <= n; i += 8) {
    __m256 acc = _mm256_loadu_ps(src + i - radius);
    for (int j = -radius + 1; j <= radius; ++j) {
      acc = _mm256_add_ps(acc, _mm256_loadu_ps(src + i + j));
    }
    _mm256_storeu_ps(dst + i, acc);
  }
  for (; i < n; ++i) {
    float acc = src[i - radius];
    for (int j = -radius + 1; j <= radius; ++j) acc += src[i + j];
    dst[i] = acc;
  }
}

void window_vsum_avx2(const float* src, float* dst, int n, int stride,
                      int radius) {
  int i = 0;
  for (; i + 8 <= n; i += 8) {
    __m256 acc = _mm256_loadu_ps(src + i - radius * stride);
    for (int j = -radius + 1; j <= radius; ++j) {
      acc = _mm256_add_ps(acc, _mm256_loadu_ps(src + i + j * stride));
    }
    _mm256_storeu_ps(dst + i, acc);
  }
  for (; i < n; ++i) {
    float acc = src[i - radius * stride];
    for (int j = -radius + 1; j <= radius; ++j) acc += src[i + j * stride];
    dst[i] = acc;
  }
}

void bilinear_blend_avx2(const float* p00, const float* p01, const float* p10,
                         const float* p11, float w00, float w01, float w10,
                         float w11, float* out, int c) {
  const __m256 v00 = _mm256_set1_ps(w00);
  const __m256 v01 = _mm256_set1_ps(w01);
  const __m256 v10 = _mm256_set1_ps(w10);
  const __m256 v11 = _mm256_set1_ps(w11);
  int k = 0;
  for (; k + 8 <= c; k += 8) {
    __m256 acc = _mm256_add_ps(_mm256_mul_ps(v00, _mm256_loadu_ps(p00 + k)),
                               _mm256_mul_ps(v01, _mm256_loadu_ps(p01 + k)));
    acc = _mm256_add_ps(acc, _mm256_mul_ps(v10, _mm256_loadu_ps(p10 + k)));
    acc = _mm256_add_ps(acc, _mm256_mul_ps(v11, _mm256_loadu_ps(p11 + k)));
    _mm256_storeu_ps(out + k, acc);
  }
  for (; k < c; ++k) {
    out[k] = ((w00 * p00[k] + w01 * p01[k]) + w10 * p10[k]) + w11 * p11[k];
  }
}

void axpy_avx2(float alpha, const float* x, float* y, int n) {
  const __m256 av = _mm256_set1_ps(alpha);
  int i = 0;
  for (; i + 8 <= n; i += 8) {
    __m256 yv = _mm256_loadu_ps(y + i);
    yv = _mm256_add_ps(yv, _mm256_mul_ps(av, _mm256_loadu_ps(x + i)));
    _mm256_storeu_ps(y + i, yv);
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

float dot_avx2(const float* a, const float* b, int n) {
  __m256 acc = _mm256_setzero_ps();
  int i = 0;
  for (; i + 8 <= n; i += 8) {
    acc = _mm256_add_ps(acc, _mm256_mul_ps(_mm256_loadu_ps(a + i),
                                           _mm256_loadu_ps(b + i)));
  }
  __m128 lo = _mm256_castps256_ps128(acc);
  __m128 hi = _mm256_extractf128_ps(acc, 1);
  __m128 s = _mm_add_ps(lo, hi);
  s = _mm_add_ps(s, _mm_movehl_ps(s, s));
  s = _mm_add_ss(s, _mm_shuffle_ps(s, s, 1));
  float total = _mm_cvtss_f32(s);
  for (; i < n; ++i) total += a[i] * b[i];
  return total;
}

}  // namespace

const Ops& avx2_ops() {
  static const Ops table = {
      "avx2",           multiply_avx2, scale_avx2,
      window_hsum_avx2, window_vsum_avx2, bilinear_blend_avx2,
      axpy_avx2,        dot_avx2,
  };
  return table;
}

}  // namespace svp::kern

#endif  // __AVX2__
