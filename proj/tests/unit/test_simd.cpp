#include <doctest.h>

#include <cstring>
#include <random>
#include <vector>

#include "espf/errors.hpp"
#include "espf/geometry.hpp"
#include "espf/simd.hpp"
#include "oracles.hpp"

using namespace espf;
namespace simd = espf::simd;

namespace {

struct Inputs {
  int dim;
  std::size_t count;
  std::vector<double> lower;
  std::vector<double> coords;
  std::vector<double> offset;
  std::vector<double> weights;
};

Inputs make_inputs(int dim, std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  Inputs in{dim, count, {}, {}, {}, {}};
  in.lower.assign(static_cast<std::size_t>(dim * dim), 0.0);
  for (int j = 0; j < dim; ++j)
    for (int i = j; i < dim; ++i) in.lower[static_cast<std::size_t>(j * dim + i)] = i == j ? 1.0 + std::abs(g(rng)) : g(rng);
  in.coords.resize(static_cast<std::size_t>(dim) * count);
  for (double& c : in.coords) c = 10.0 * g(rng);
  in.offset.resize(static_cast<std::size_t>(dim));
  for (double& c : in.offset) c = g(rng);
  in.weights.resize(static_cast<std::size_t>(dim));
  for (double& c : in.weights) c = g(rng);
  return in;
}

struct Outputs {
  std::vector<double> norms;
  std::vector<double> dots;
  std::vector<double> rescaled;
};

Outputs evaluate(const Inputs& in) {
  Outputs out;
  out.norms.resize(in.count);
  out.dots.resize(in.count);
  simd::whitened_sq_norms(in.lower.data(), in.dim, in.coords.data(), in.count, in.count, in.offset.data(),
                          out.norms.data());
  simd::affine_dots(in.coords.data(), in.count, in.count, in.dim, in.weights.data(), 0.25, out.dots.data());
  out.rescaled = out.norms;
  simd::rank1_rescale(out.rescaled.data(), out.dots.data(), in.count, 0.3, 1.7);
  return out;
}

bool bit_equal(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

struct BackendGuard {
  simd::Backend saved = simd::active_backend();
  ~BackendGuard() { simd::set_backend(saved); }
};

}  // namespace

TEST_CASE("scalar kernel matches a direct evaluation") {
  BackendGuard guard;
  simd::set_backend(simd::Backend::scalar);
  const Inputs in = make_inputs(3, 17, 81);
  const Outputs out = evaluate(in);
  Eigen::Map<const Matrix> l(in.lower.data(), 3, 3);
  for (std::size_t i = 0; i < in.count; ++i) {
    Vector x(3), w(3);
    for (int c = 0; c < 3; ++c) {
      x[c] = in.coords[static_cast<std::size_t>(c) * in.count + i] - in.offset[static_cast<std::size_t>(c)];
      w[c] = in.weights[static_cast<std::size_t>(c)];
    }
    const Vector z = l.triangularView<Eigen::Lower>().solve(x);
    CHECK(out.norms[i] == doctest::Approx(z.squaredNorm()).epsilon(1e-12));
    const double dot = 0.25 + w.dot(x + Eigen::Map<const Vector>(in.offset.data(), 3));
    CHECK(out.dots[i] == doctest::Approx(dot).epsilon(1e-12));
  }
}

TEST_CASE("vector backends are bit-identical to scalar") {
  BackendGuard guard;
  int compared = 0;
  for (simd::Backend b : {simd::Backend::avx2, simd::Backend::neon}) {
    if (!simd::backend_supported(b)) continue;
    for (int dim : {1, 2, 3, 7, 12}) {
      for (std::size_t count : {1u, 3u, 4u, 5u, 33u, 113u}) {
        const Inputs in = make_inputs(dim, count, 82 + static_cast<std::uint64_t>(dim * 1000 + count));
        simd::set_backend(simd::Backend::scalar);
        const Outputs ref = evaluate(in);
        simd::set_backend(b);
        const Outputs vec = evaluate(in);
        CHECK(bit_equal(ref.norms, vec.norms));
        CHECK(bit_equal(ref.dots, vec.dots));
        CHECK(bit_equal(ref.rescaled, vec.rescaled));
        ++compared;
      }
    }
  }
  MESSAGE("compared " << compared << " vector configurations");
}

TEST_CASE("solver output does not depend on the backend") {
  BackendGuard guard;
  std::mt19937_64 rng(83);
  const Points p = oracle::gaussian_cloud(rng, 40, 7);
  simd::set_backend(simd::Backend::scalar);
  const MveeSolution ref = mvee_solve(p);
  for (simd::Backend b : {simd::Backend::avx2, simd::Backend::neon}) {
    if (!simd::backend_supported(b)) continue;
    simd::set_backend(b);
    const MveeSolution s = mvee_solve(p);
    CHECK(s.log_det == ref.log_det);
    CHECK(s.ellipsoid.shape == ref.ellipsoid.shape);
  }
}

TEST_CASE("unsupported backends are refused") {
  BackendGuard guard;
  CHECK(simd::backend_supported(simd::Backend::scalar));
  for (simd::Backend b : {simd::Backend::avx2, simd::Backend::neon})
    if (!simd::backend_supported(b)) CHECK_THROWS_AS(simd::set_backend(b), Error);
}
