#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "espf/types.hpp"

namespace espf {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Integral over (0, 1] of log(-2 log alpha), by tanh-sinh quadrature.
double gaussian_level_integral();

/// Gaussian-shaped possibilities on `rings` concentric regular octagons
/// mapped through chol(cov); the ring levels are evenly spaced in alpha.
struct DenseGaussianCloud {
  Points points;
  Vector poss;
};
DenseGaussianCloud dense_gaussian_cloud(const Matrix& cov, int rings, int per_ring = 8);

CheckResult check_mvee_certification(int clouds, std::uint64_t seed);
CheckResult check_selection_optimality(int instances, std::uint64_t seed);
CheckResult check_pcrb_synthetic(int steps, std::uint64_t seed, double slack = 0.05);
CheckResult check_holder_ordering(int clouds, std::uint64_t seed);
CheckResult check_entropy_properties(int pairs, std::uint64_t seed);
CheckResult check_gaussian_quadrature();
CheckResult check_dense_gaussian();
CheckResult check_linear_tracking(std::uint64_t seed);

/// Every synthetic suite above, in order.
std::vector<CheckResult> run_validation_suite(std::uint64_t seed);
std::vector<CheckResult> run_gaussian_limit_suite(std::uint64_t seed);

}  // namespace espf
