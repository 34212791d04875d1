#include <immintrin.h>

#include "kernels.hpp"

// Four points per lane. Operation order mirrors kernels_scalar.cpp exactly and
// no FMA is used, so every lane rounds like the scalar reference.

namespace espf::simd::avx2 {

void whitened_sq_norms(const double* lower, int dim, const double* coords, std::size_t ld,
                       std::size_t count, const double* offset, double* out) {
  std::size_t i = 0;
  __m256d z[32];
  for (; i + 4 <= count; i += 4) {
    __m256d acc = _mm256_setzero_pd();
    for (int r = 0; r < dim; ++r) {
      __m256d s = _mm256_loadu_pd(coords + static_cast<std::size_t>(r) * ld + i);
      if (offset != nullptr) s = _mm256_sub_pd(s, _mm256_set1_pd(offset[r]));
      for (int c = 0; c < r; ++c)
        s = _mm256_sub_pd(s, _mm256_mul_pd(_mm256_set1_pd(lower[c * dim + r]), z[c]));
      z[r] = _mm256_div_pd(s, _mm256_set1_pd(lower[r * dim + r]));
      acc = _mm256_add_pd(acc, _mm256_mul_pd(z[r], z[r]));
    }
    _mm256_storeu_pd(out + i, acc);
  }
  for (; i < count; ++i) out[i] = generic::whitened_sq_norm_one(lower, dim, coords, ld, i, offset);
}

void affine_dots(const double* coords, std::size_t ld, std::size_t count, int dim,
                 const double* weights, double bias, double* out) {
  std::size_t i = 0;
  const __m256d b = _mm256_set1_pd(bias);
  for (; i + 4 <= count; i += 4) {
    __m256d acc = b;
    for (int c = 0; c < dim; ++c) {
      const __m256d x = _mm256_loadu_pd(coords + static_cast<std::size_t>(c) * ld + i);
      acc = _mm256_add_pd(acc, _mm256_mul_pd(x, _mm256_set1_pd(weights[c])));
    }
    _mm256_storeu_pd(out + i, acc);
  }
  if (i < count) generic::affine_dots(coords + i, ld, count - i, dim, weights, bias, out + i);
}

void rank1_rescale(double* values, const double* h, std::size_t count, double coef, double denom) {
  std::size_t i = 0;
  const __m256d k = _mm256_set1_pd(coef);
  const __m256d d = _mm256_set1_pd(denom);
  for (; i + 4 <= count; i += 4) {
    const __m256d hv = _mm256_loadu_pd(h + i);
    const __m256d v = _mm256_loadu_pd(values + i);
    const __m256d r = _mm256_div_pd(_mm256_add_pd(v, _mm256_mul_pd(k, _mm256_mul_pd(hv, hv))), d);
    _mm256_storeu_pd(values + i, r);
  }
  if (i < count) generic::rank1_rescale(values + i, h + i, count - i, coef, denom);
}

}  // namespace espf::simd::avx2
