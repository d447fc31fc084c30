#include "svp/kernels.hpp"

namespace svp::kern {
namespace {

void multiply_scalar(const float* a, const float* b, float* out, int n) {
  for (int i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

void scale_scalar(const float* x, float s, float* out, int n) {
  for (int i = 0; i < n; ++i) out[i] = x[i] * s;
}

void window_hsum_scalar(const float* src, float* dst, int n, int radius) {
  for (int i = 0; i < n; ++i) {
    float acc = src[i - radius];
    for (int j = -radius + 1; j <= radius; ++j) acc += src[i + j];
    dst[i] = acc;
  }
}

void window_vsum_scalar(const float* src, float* dst, int n, int stride,
                        int radius) {
  for (int i = 0; i < n; ++i) {
    float acc = src[i - radius * stride];
    for (int j = -radius + 1; j <= radius; ++j) acc += src[i + j * stride];
    dst[i] = acc;
  }
}

void bilinear_blend_scalar(const float* p00, const float* p01, const float* p10,
                           const float* p11, float w00, float w01, float w10,
                           float w11, float* out, int c) {
  for (int k = 0; k < c; ++k) {
    out[k] = ((w00 * p00[k] + w01 * p01[k]) + w10 * p10[k]) + w11 * p11[k];
  }
}

void axpy_scalar(float alpha, const float* x, float* y, int n) {
  for (int i = 0; i < n; ++i) y[i] += alpha * x[i];
}

float dot_scalar(const float* a, const float* b, int n) {
  float acc = 0.0f;
  for (int i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

}  // namespace

const Ops& scalar_ops() {
  static const Ops table = {
      "scalar",          multiply_scalar, scale_scalar,
      window_hsum_scalar, window_vsum_scalar, bilinear_blend_scalar,
      axpy_scalar,       dot_scalar,
  };
  return table;
}

}  // namespace svp::kern
