#include <arm_neon.h>

#include "kernels.hpp"

// Two points per lane; same operation order as the scalar reference, no fused
// multiply-add.

namespace espf::simd::neon {

void whitened_sq_norms(const double* lower, int dim, const double* coords, std::size_t ld,
                       std::size_t count, const double* offset, double* out) {
  std::size_t i = 0;
  float64x2_t z[32];
  for (; i + 2 <= count; i += 2) {
    float64x2_t acc = vdupq_n_f64(0.0);
    for (int r = 0; r < dim; ++r) {
      float64x2_t s = vld1q_f64(coords + static_cast<std::size_t>(r) * ld + i);
      if (offset != nullptr) s = vsubq_f64(s, vdupq_n_f64(offset[r]));
      for (int c = 0; c < r; ++c) s = vsubq_f64(s, vmulq_f64(vdupq_n_f64(lower[c * dim + r]), z[c]));
      z[r] = vdivq_f64(s, vdupq_n_f64(lower[r * dim + r]));
      acc = vaddq_f64(acc, vmulq_f64(z[r], z[r]));
    }
    vst1q_f64(out + i, acc);
  }
  for (; i < count; ++i) out[i] = generic::whitened_sq_norm_one(lower, dim, coords, ld, i, offset);
}

void affine_dots(const double* coords, std::size_t ld, std::size_t count, int dim,
                 const double* weights, double bias, double* out) {
  std::size_t i = 0;
  for (; i + 2 <= count; i += 2) {
    float64x2_t acc = vdupq_n_f64(bias);
    for (int c = 0; c < dim; ++c) {
      const float64x2_t x = vld1q_f64(coords + static_cast<std::size_t>(c) * ld + i);
      acc = vaddq_f64(acc, vmulq_f64(x, vdupq_n_f64(weights[c])));
    }
    vst1q_f64(out + i, acc);
  }
  if (i < count) generic::affine_dots(coords + i, ld, count - i, dim, weights, bias, out + i);
}

void rank1_rescale(double* values, const double* h, std::size_t count, double coef, double denom) {
  std::size_t i = 0;
  const float64x2_t k = vdupq_n_f64(coef);
  const float64x2_t d = vdupq_n_f64(denom);
  for (; i + 2 <= count; i += 2) {
    const float64x2_t hv = vld1q_f64(h + i);
    const float64x2_t v = vld1q_f64(values + i);
    vst1q_f64(values + i, vdivq_f64(vaddq_f64(v, vmulq_f64(k, vmulq_f64(hv, hv))), d));
  }
  if (i < count) generic::rank1_rescale(values + i, h + i, count - i, coef, denom);
}

}  // namespace espf::simd::neon
