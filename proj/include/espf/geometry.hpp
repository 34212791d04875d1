#pragma once

#include <optional>
#include <cstddef>
#include <utility>
#include <vector>

#include "espf/types.hpp"

namespace espf {

inline constexpr double kDefaultMveeTolerance = 1e-7;

/// {x : (x - center)^T shape^{-1} (x - center) <= 1}
struct Ellipsoid {
  Vector center;
  Matrix shape;

  int dim() const noexcept { return static_cast<int>(center.size()); }

  /// (x - center)^T shape^{-1} (x - center)
  double containment(const Eigen::Ref<const Vector>& x) const;
  /// containment() for every row of `points`.
  Vector containments(const Points& points) const;
};

struct VfiBounds {
  double eps_min = 1e-6;
  double lambda_max = 1e6;

  /// Throws espf::Error unless 0 < eps_min < lambda_max.
  void validate() const;
};

enum class VfiStatus { ok, below_floor, above_ceiling };

struct VfiCheck {
  VfiStatus status = VfiStatus::ok;
  double lambda_min = 0.0;
  double lambda_max = 0.0;
};

/// MVEE together with its dual certificate (barycentric weights on the input
/// points; positive weights mark the active points).
struct MveeSolution {
  Ellipsoid ellipsoid;
  Vector weights;
  double log_det = 0.0;  // log det of ellipsoid.shape, evaluated in the solver frame
  int iterations = 0;
};

/// Minimum-volume enclosing ellipsoid by Khachiyan barycentric ascent with
/// Todd-Yildirim away steps, finished by a log-barrier Newton solve when the
/// ascent stalls. On return every point satisfies
/// containment <= 1 + tolerance and every point with positive weight satisfies
/// containment >= 1 - tolerance. Throws DegenerateCloud when the points do not
/// affinely span R^n. The solve runs in the frame of the cloud's own scatter.
MveeSolution mvee_solve(const Points& points, double tolerance = kDefaultMveeTolerance);

Ellipsoid mvee(const Points& points, double tolerance = kDefaultMveeTolerance);

/// log of the n-ball volume constant c_n = pi^{n/2} / Gamma(n/2 + 1).
double log_unit_ball_volume(int n);

/// log c_n + 0.5 log det shape, in nats.
double log_volume(const Ellipsoid& e);

/// log det of the MVEE shape matrix. Clouds with fewer than 2n+1 points count
/// as degenerate and raise DegenerateCloud, like affinely flat clouds.
double log_det_mvee(const Points& points, double tolerance = kDefaultMveeTolerance);

/// Lower-triangular L with m = L L^T. Throws NotPositiveDefinite.
Matrix whitening_factor(const Matrix& m);

VfiCheck check_vfi(const Ellipsoid& e, const VfiBounds& b);

/// Clamps the spectrum of a symmetric shape into [eps_min, lambda_max]. The
/// floor is applied as an isotropic inflation (shape + (eps_min - lambda_min) I);
/// eigenvalues above the ceiling are clipped.
Matrix enforce_vfi(const Matrix& shape, const VfiBounds& b);

/// True when the rows of `points` affinely span R^n: the smallest scatter
/// eigenvalue exceeds relative_floor times the largest.
inline constexpr double kFlatnessFloor = 1e-13;
bool spans_affinely(const Points& points, double relative_floor = kFlatnessFloor);

/// Mean and Cholesky factor of the scatter of `points`, used as a solver frame.
/// Throws DegenerateCloud when the scatter is singular.
std::pair<Vector, Matrix> scatter_frame(const Points& points);

/// Incremental MVEE over a growing point set. Points are appended in batches
/// and the solver warm-starts from the previous dual weights, which makes a
/// sweep over nested alpha-cuts cost little more than a single solve.
class MveeAccumulator {
public:
  MveeAccumulator(int dim, std::size_t capacity, double tolerance = kDefaultMveeTolerance);

  /// Works internally on lower^{-1} (x - center). Choosing a frame close to the
  /// cloud's own scatter keeps the lifted normal matrix well conditioned for
  /// clouds far from the origin or strongly anisotropic. Must precede add().
  void set_frame(const Vector& center, const Matrix& lower);

  void add(const Eigen::Ref<const Vector>& point);
  std::size_t size() const noexcept { return count_; }
  int dim() const noexcept { return dim_; }

  /// Solves over every point added so far. Throws DegenerateCloud.
  MveeSolution solve();

private:
  void recompute();
  // Log-barrier Newton on the lifted primal, used when the first-order
  // iteration stalls on near-ties (many points almost on the boundary).
  bool refine_barrier();
  Ellipsoid ellipsoid() const;
  double local_log_det() const;
  void local_ellipsoid(Vector& center, Matrix& shape) const;

  int dim_;
  std::size_t capacity_;
  Vector frame_center_;
  Matrix frame_lower_;  // empty: identity frame anchored at the first point
  std::size_t count_ = 0;
  double tolerance_;
  std::vector<double> coords_;  // (dim_ + 1) x capacity_, coordinate-major, last row = 1
  std::vector<double> weights_;
  std::vector<double> g_;
  std::vector<double> h_;
  Matrix xinv_;
  bool warm_ = false;
  int last_iterations_ = 0;
  bool primal_valid_ = false;  // set by refine_barrier(); the slice defines the ellipsoid
  Vector primal_center_;
  Matrix primal_shape_;
  std::vector<double> certificate_;  // weights restricted to the active points
  // Last solution and its ellipsoid in the solver frame. Points added inside
  // it leave the optimum unchanged, so the next solve can return it as is.
  std::optional<MveeSolution> last_;
  Vector last_center_;
  Matrix last_lower_;
};

}  // namespace espf
