#pragma once

namespace svp::kern {

enum class Backend { Scalar, Avx2, Neon };

/// Table of the data-parallel inner loops shared by the warp, correlation and
/// training code. Every backend fills the same table; entries marked
/// "bit-exact" must produce results bitwise identical to the scalar backend
/// (same per-lane operation order, no FMA). `dot` reassociates partial sums
/// and is only equivalent within floating-point tolerance.
struct Ops {
  const char* name;

  // out[i] = a[i] * b[i]                                        (bit-exact)
  void (*multiply)(const float* a, const float* b, float* out, int n);

  // out[i] = x[i] * s                                           (bit-exact)
  void (*scale)(const float* x, float s, float* out, int n);

  // dst[i] = sum_{j=-radius..radius} src[i+j], ascending j      (bit-exact)
  // src must be valid on [-radius, n+radius).
  void (*window_hsum)(const float* src, float* dst, int n, int radius);

  // dst[i] = sum_{j=-radius..radius} src[i + j*stride], ascending j
  // (bit-exact); src must be valid over the full row span.
  void (*window_vsum)(const float* src, float* dst, int n, int stride,
                      int radius);

  // out[k] = ((w00*p00[k] + w01*p01[k]) + w10*p10[k]) + w11*p11[k]
  // for k in [0, c)                                             (bit-exact)
  void (*bilinear_blend)(const float* p00, const float* p01, const float* p10,
                         const float* p11, float w00, float w01, float w10,
                         float w11, float* out, int c);

  // y[i] += alpha * x[i]                                        (bit-exact)
  void (*axpy)(float alpha, const float* x, float* y, int n);

  // sum_i a[i]*b[i]                              (tolerance-equivalent only)
  float (*dot)(const float* a, const float* b, int n);
};

const Ops& ops(Backend b);
bool backend_available(Backend b);

/// Best backend the current CPU supports.
Backend detect_backend();

/// Backend used by the rest of the library. Defaults to detect_backend();
/// force_backend() narrows it (tests use this to compare variants).
const Ops& active();
void force_backend(Backend b);
void reset_backend();

}  // namespace svp::kern
