#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "espf/types.hpp"

namespace espf {

/// Smallest possibility a hypothesis may carry; keeps every value inside (0, 1].
inline constexpr double kPossibilityFloor = 1e-12;

/// Finite-support possibility distribution: the filter's whole epistemic state.
///
/// Values are immutable once built; every operation below returns a new cloud.
class SupportCloud {
public:
  SupportCloud() = default;

  /// Throws espf::Error when sizes disagree or a possibility is outside (0, 1].
  SupportCloud(Points points, Vector poss, double epoch = 0.0);

  /// Cloud with every possibility equal to one.
  static SupportCloud uniform(Points points, double epoch = 0.0);

  const Points& points() const noexcept { return points_; }
  const Vector& poss() const noexcept { return poss_; }
  double epoch() const noexcept { return epoch_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(points_.rows()); }
  int dim() const noexcept { return static_cast<int>(points_.cols()); }

  bool is_normalized() const noexcept;

  SupportCloud with_points(Points points) const;
  SupportCloud with_epoch(double epoch) const;
  /// Rows listed in `indices`, in that order.
  SupportCloud subset(const std::vector<std::size_t>& indices) const;

private:
  Points points_;
  Vector poss_;
  double epoch_ = 0.0;
};

struct AlphaCut {
  double level = 1.0;
  std::vector<std::size_t> members;  // ascending indices with poss >= level
};

/// Indices with possibility >= level. Throws when level is outside (0, 1].
AlphaCut alpha_cut(const SupportCloud& c, double level);

/// Divides by the maximum. Throws AllZero when the maximum is zero or not finite.
Vector max_normalize(const Vector& values);

struct ConjunctiveResult {
  Vector unnormalized;  // min(prior, comp), elementwise
  SupportCloud cloud;   // same points, max-normalized possibilities
};

/// Pointwise min of prior possibility and compatibility, then max-normalized.
/// Normalized values are floored at kPossibilityFloor; AllZero is raised only
/// when the maximum itself underflows.
ConjunctiveResult conjunctive_update(const SupportCloud& c, const Vector& comp);

/// kappa(x, x') = exp(-0.5 ||L^{-1}(x - x')||^2) for a lower-triangular L.
struct GaussianKernel {
  Matrix lower;

  double operator()(const Eigen::Ref<const Vector>& a, const Eigen::Ref<const Vector>& b) const;
};

/// Max-min extension: pi_new(x) = max_j min(pi_j, kappa(x, chi_j)). Raw values
/// are returned; zero is possible when the kernel vanishes everywhere.
Vector kernel_extend(const SupportCloud& survivors, const Points& new_points, const GaussianKernel& kernel);

using ProximityFn = std::function<double(const Eigen::Ref<const Vector>&, const Eigen::Ref<const Vector>&)>;
Vector kernel_extend(const SupportCloud& survivors, const Points& new_points, const ProximityFn& kernel);

/// Index of the maximal possibility, ties to the smallest index.
std::size_t anchor(const SupportCloud& c);

}  // namespace espf
