// NEON variants of the kernel table, mirroring the AVX2 translation unit
// 4-wide. Same bit-exactness contract: every entry except `dot` keeps the
// scalar per-lane operation order.

#include "svp/kernels.hpp"

#if defined(__ARM_NEON) || defined(__ARM_NEON__)

#include <arm_neon.h>

namespace svp::kern {
namespace {

void multiply_neon(const float* a, const float* b, float* out, int n) {
  int i = 0;
  for (; i + 4 <= n; i += 4) {
    vst1q_f32(out + i, vmulq_f32(vld1q_f32(a + i), vld1q_f32(b + i)));
  }
  for (; i < n; ++i) out[i] = a[i] * b[i];
}

void scale_neon(const float* x, float s, float* out, int n) {
  const float32x4_t sv = vdupq_n_f32(s);
  int i = 0;
  for (; i + 4 <= n; i += 4) {
    vst1q_f32(out + i, vmulq_f32(vld1q_f32(x + i), sv));
  }
  for (; i < n; ++i) out[i] = x[i] * s;
}

void window_hsum_neon(const float* src, float* dst, int n, int radius) {
  int i = 0;
  for (; i + 4 <= n; i += 4) {
    float32x4_t acc = vld1q_f32(src + i - radius);
    for (int j = -radius + 1; j <= radius; ++j) {
      acc = vaddq_f32(acc, vld1q_f32(src + i + j));
    }
    vst1q_f32(dst + i, acc);
  }
  for (; i < n; ++i) {
    float acc = src[i - radius];
    for (int j = -radius + 1; j <= radius; ++j) acc += src[i + j];
    dst[i] = acc;
  }
}

void window_vsum_neon(const float* src, float* dst, int n, int stride,
                      int radius) {
  int i = 0;
  for (; i + 4 <= n; i += 4) {
    float32x4_t acc = vld1q_f32(src + i - radius * stride);
    for (int j = -radius + 1; j <= radius; ++j) {
      acc = vaddq_f32(acc, vld1q_f32(src + i + j * stride));
    }
    vst1q_f32(dst + i, acc);
  }
  for (; i < n; ++i) {
    float acc = src[i - radius * stride];
    for (int j = -radius + 1; j <= radius; ++j) acc += src[i + j * stride];
    dst[i] = acc;
  }
}

void bilinear_blend_neon(const float* p00, const float* p01, const float* p10,
                         const float* p11, float w00, float w01, float w10,
                         float w11, float* out, int c) {
  const float32x4_t v00 = vdupq_n_f32(w00);
  const float32x4_t v01 = vdupq_n_f32(w01);
  const float32x4_t v10 = vdupq_n_f32(w10);
  const float32x4_t v11 = vdupq_n_f32(w11);
  int k = 0;
  for (; k + 4 <= c; k += 4) {
    float32x4_t acc = vaddq_f32(vmulq_f32(v00, vld1q_f32(p00 + k)),
                                vmulq_f32(v01, vld1q_f32(p01 + k)));
    acc = vaddq_f32(acc, vmulq_f32(v10, vld1q_f32(p10 + k)));
    acc = vaddq_f32(acc, vmulq_f32(v11, vld1q_f32(p11 + k)));
    vst1q_f32(out + k, acc);
  }
  for (; k < c; ++k) {
    out[k] = ((w00 * p00[k] + w01 * p01[k]) + w10 * p10[k]) + w11 * p11[k];
  }
}

void axpy_neon(float alpha, const float* x, float* y, int n) {
  const float32x4_t av = vdupq_n_f32(alpha);
  int i = 0;
  for (; i + 4 <= n; i += 4) {
    float32x4_t yv = vld1q_f32(y + i);
    yv = vaddq_f32(yv, vmulq_f32(av, vld1q_f32(x + i)));
    vst1q_f32(y + i, yv);
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

float dot_neon(const float* a, const float* b, int n) {
  float32x4_t acc = vdupq_n_f32(0.0f);
  int i = 0;
  for (; i + 4 <= n; i += 4) {
    acc = vaddq_f32(acc, vmulq_f32(vld1q_f32(a + i), vld1q_f32(b + i)));
  }
  float total = vaddvq_f32(acc);
  for (; i < n; ++i) total += a[i] * b[i];
  return total;
}

}  // namespace

const Ops& neon_ops() {
  static const Ops table = {
      "neon",           multiply_neon, scale_neon,
      window_hsum_neon, window_vsum_neon, bilinear_blend_neon,
      axpy_neon,        dot_neon,
  };
  return table;
}

}  // namespace svp::kern

#endif  // __ARM_NEON
