#pragma once

// Batched inner loops shared by the MVEE solver, the innovation geometry and
// the kernel extension. Every kernel has a scalar reference implementation and
// optional vector variants chosen once at runtime. Variants perform the same
// IEEE operations in the same order per point, so results are bit-identical
// across backends.

#include <cstddef>
#include <string_view>

namespace espf::simd {

enum class Backend { scalar, avx2, neon };

/// Largest dimension the batched substitution kernels accept.
inline constexpr int kMaxDim = 32;

std::string_view backend_name(Backend b) noexcept;
bool backend_supported(Backend b) noexcept;

/// Backend in use. Chosen on first call from CPU features, overridable with the
/// ESPF_SIMD environment variable (scalar | avx2 | neon | auto).
Backend active_backend() noexcept;

/// Forces a backend; throws espf::Error when the CPU or build lacks it.
void set_backend(Backend b);

/// out[i] = || L^{-1} (x_i - offset) ||^2 for `count` points.
///
/// `lower` is a dim x dim lower-triangular factor stored column-major.
/// `coords` holds the points coordinate-major: coordinate c of point i lives
/// at coords[c * ld + i]. `offset` may be null (treated as zero).
void whitened_sq_norms(const double* lower, int dim, const double* coords, std::size_t ld,
                       std::size_t count, const double* offset, double* out);

/// out[i] = bias + sum_c coords[c * ld + i] * weights[c], summed in c order.
void affine_dots(const double* coords, std::size_t ld, std::size_t count, int dim,
                 const double* weights, double bias, double* out);

/// values[i] = (values[i] + coef * h[i] * h[i]) / denom.
void rank1_rescale(double* values, const double* h, std::size_t count, double coef, double denom);

}  // namespace espf::simd
