#include "kernels.hpp"

namespace espf::simd::generic {

double whitened_sq_norm_one(const double* lower, int dim, const double* coords, std::size_t ld,
                            std::size_t i, const double* offset) {
  double z[32];
  double acc = 0.0;
  for (int r = 0; r < dim; ++r) {
    double s = coords[static_cast<std::size_t>(r) * ld + i];
    if (offset != nullptr) s = s - offset[r];
    for (int c = 0; c < r; ++c) s = s - lower[c * dim + r] * z[c];
    z[r] = s / lower[r * dim + r];
    acc = acc + z[r] * z[r];
  }
  return acc;
}

void whitened_sq_norms(const double* lower, int dim, const double* coords, std::size_t ld,
                       std::size_t count, const double* offset, double* out) {
  for (std::size_t i = 0; i < count; ++i)
    out[i] = whitened_sq_norm_one(lower, dim, coords, ld, i, offset);
}

void affine_dots(const double* coords, std::size_t ld, std::size_t count, int dim,
                 const double* weights, double bias, double* out) {
  for (std::size_t i = 0; i < count; ++i) {
    double acc = bias;
    for (int c = 0; c < dim; ++c) acc = acc + coords[static_cast<std::size_t>(c) * ld + i] * weights[c];
    out[i] = acc;
  }
}

void rank1_rescale(double* values, const double* h, std::size_t count, double coef, double denom) {
  for (std::size_t i = 0; i < count; ++i) values[i] = (values[i] + coef * (h[i] * h[i])) / denom;
}

}  // namespace espf::simd::generic
