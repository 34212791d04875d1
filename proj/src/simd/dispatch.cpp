#include <atomic>
#include <cstdlib>
#include <string>

#include "espf/errors.hpp"
#include "espf/simd.hpp"
#include "kernels.hpp"

namespace espf::simd {
namespace {

constexpr KernelTable kScalarTable{generic::whitened_sq_norms, generic::affine_dots,
                                   generic::rank1_rescale};
#if defined(ESPF_HAVE_AVX2)
constexpr KernelTable kAvx2Table{avx2::whitened_sq_norms, avx2::affine_dots, avx2::rank1_rescale};
#endif
#if defined(ESPF_HAVE_NEON)
constexpr KernelTable kNeonTable{neon::whitened_sq_norms, neon::affine_dots, neon::rank1_rescale};
#endif

const KernelTable& table_for(Backend b) {
  switch (b) {
#if defined(ESPF_HAVE_AVX2)
    case Backend::avx2:
      return kAvx2Table;
#endif
#if defined(ESPF_HAVE_NEON)
    case Backend::neon:
      return kNeonTable;
#endif
    default:
      return kScalarTable;
  }
}

Backend detect() noexcept {
  if (const char* env = std::getenv("ESPF_SIMD")) {
    const std::string v(env);
    if (v == "scalar") return Backend::scalar;
    if (v == "avx2" && backend_supported(Backend::avx2)) return Backend::avx2;
    if (v == "neon" && backend_supported(Backend::neon)) return Backend::neon;
  }
  if (backend_supported(Backend::avx2)) return Backend::avx2;
  if (backend_supported(Backend::neon)) return Backend::neon;
  return Backend::scalar;
}

std::atomic<Backend>& current() {
  static std::atomic<Backend> backend{detect()};
  return backend;
}

void check_dim(int dim) {
  if (dim < 0 || dim > kMaxDim)
    throw Error("simd kernels support dimensions up to " + std::to_string(kMaxDim));
}

}  // namespace

std::string_view backend_name(Backend b) noexcept {
  switch (b) {
    case Backend::avx2:
      return "avx2";
    case Backend::neon:
      return "neon";
    case Backend::scalar:
      break;
  }
  return "scalar";
}

bool backend_supported(Backend b) noexcept {
  switch (b) {
    case Backend::scalar:
      return true;
    case Backend::avx2:
#if defined(ESPF_HAVE_AVX2)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
    case Backend::neon:
#if defined(ESPF_HAVE_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

Backend active_backend() noexcept { return current().load(std::memory_order_relaxed); }

void set_backend(Backend b) {
  if (!backend_supported(b))
    throw Error("simd backend '" + std::string(backend_name(b)) + "' is not available");
  current().store(b, std::memory_order_relaxed);
}

void whitened_sq_norms(const double* lower, int dim, const double* coords, std::size_t ld,
                       std::size_t count, const double* offset, double* out) {
  check_dim(dim);
  table_for(active_backend()).whitened_sq_norms(lower, dim, coords, ld, count, offset, out);
}

void affine_dots(const double* coords, std::size_t ld, std::size_t count, int dim,
                 const double* weights, double bias, double* out) {
  check_dim(dim);
  table_for(active_backend()).affine_dots(coords, ld, count, dim, weights, bias, out);
}

void rank1_rescale(double* values, const double* h, std::size_t count, double coef, double denom) {
  table_for(active_backend()).rank1_rescale(values, h, count, coef, denom);
}

}  // namespace espf::simd
