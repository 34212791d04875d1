#pragma once

#include <cstddef>

namespace espf::simd {

using WhitenedSqNormsFn = void (*)(const double*, int, const double*, std::size_t, std::size_t,
                                   const double*, double*);
using AffineDotsFn = void (*)(const double*, std::size_t, std::size_t, int, const double*, double,
                              double*);
using Rank1RescaleFn = void (*)(double*, const double*, std::size_t, double, double);

struct KernelTable {
  WhitenedSqNormsFn whitened_sq_norms;
  AffineDotsFn affine_dots;
  Rank1RescaleFn rank1_rescale;
};

namespace generic {
void whitened_sq_norms(const double* lower, int dim, const double* coords, std::size_t ld,
                       std::size_t count, const double* offset, double* out);
void affine_dots(const double* coords, std::size_t ld, std::size_t count, int dim,
                 const double* weights, double bias, double* out);
void rank1_rescale(double* values, const double* h, std::size_t count, double coef, double denom);

// Single-point helpers reused for vector tails.
double whitened_sq_norm_one(const double* lower, int dim, const double* coords, std::size_t ld,
                            std::size_t i, const double* offset);
}  // namespace generic

#if defined(ESPF_HAVE_AVX2)
namespace avx2 {
void whitened_sq_norms(const double* lower, int dim, const double* coords, std::size_t ld,
                       std::size_t count, const double* offset, double* out);
void affine_dots(const double* coords, std::size_t ld, std::size_t count, int dim,
                 const double* weights, double bias, double* out);
void rank1_rescale(double* values, const double* h, std::size_t count, double coef, double denom);
}  // namespace avx2
#endif

#if defined(ESPF_HAVE_NEON)
namespace neon {
void whitened_sq_norms(const double* lower, int dim, const double* coords, std::size_t ld,
                       std::size_t count, const double* offset, double* out);
void affine_dots(const double* coords, std::size_t ld, std::size_t count, int dim,
                 const double* weights, double bias, double* out);
void rank1_rescale(double* values, const double* h, std::size_t count, double coef, double denom);
}  // namespace neon
#endif

}  // namespace espf::simd
