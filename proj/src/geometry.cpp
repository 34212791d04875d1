#include "espf/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "espf/errors.hpp"
#include "espf/simd.hpp"

namespace espf {
namespace {

// First-order budget before switching to the barrier solve. The ascent is
// fast on generic clouds but crawls when many points nearly tie on the
// boundary, which is the normal state of a propagated sparse grid.
constexpr int kAscentBaseBudget = 3000;
constexpr int kAscentPerPoint = 10;
constexpr double kBarrierGrowth = 50.0;
constexpr int kRefreshInterval = 64;
// Flatness test inside the solver frame. Points there are whitened by the
// scatter of the whole cloud, so a cut thinner than ~1e-5 of the cloud in some
// direction counts as flat: such cuts come from exactly flat node subsets bent
// slightly by the dynamics, and their volumes are meaningless.
constexpr double kLocalFlatnessFloor = 1e-10;

Matrix dense_lower(const Eigen::LLT<Matrix>& llt) { return Matrix(llt.matrixL()); }

}  // namespace

double Ellipsoid::containment(const Eigen::Ref<const Vector>& x) const {
  const Eigen::LLT<Matrix> llt(shape);
  if (llt.info() != Eigen::Success) throw NotPositiveDefinite("ellipsoid shape is not positive definite");
  const Vector z = llt.matrixL().solve(x - center);
  return z.squaredNorm();
}

Vector Ellipsoid::containments(const Points& points) const {
  const Eigen::LLT<Matrix> llt(shape);
  if (llt.info() != Eigen::Success) throw NotPositiveDefinite("ellipsoid shape is not positive definite");
  const Matrix lower = dense_lower(llt);
  Vector out(points.rows());
  simd::whitened_sq_norms(lower.data(), dim(), points.data(), static_cast<std::size_t>(points.rows()),
                          static_cast<std::size_t>(points.rows()), center.data(), out.data());
  return out;
}

void VfiBounds::validate() const {
  if (!(eps_min > 0.0) || !(lambda_max > eps_min))
    throw Error("VFI bounds require 0 < eps_min < lambda_max");
}

bool spans_affinely(const Points& points, double relative_floor) {
  const auto n = points.cols();
  if (n == 0 || points.rows() < n + 1) return false;
  const Vector mean = points.colwise().mean();
  const Matrix centered = points.rowwise() - mean.transpose();
  const Matrix scatter = centered.transpose() * centered;
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(scatter, Eigen::EigenvaluesOnly);
  const double hi = eig.eigenvalues().maxCoeff();
  const double lo = eig.eigenvalues().minCoeff();
  return hi > 0.0 && std::isfinite(hi) && lo > relative_floor * hi;
}

MveeAccumulator::MveeAccumulator(int dim, std::size_t capacity, double tolerance)
    : dim_(dim),
      capacity_(capacity),
      tolerance_(tolerance),
      coords_(static_cast<std::size_t>(dim + 1) * capacity, 0.0),
      weights_(),
      g_(capacity, 0.0),
      h_(capacity, 0.0) {
  if (dim < 1 || dim + 1 > simd::kMaxDim) throw Error("mvee: unsupported dimension " + std::to_string(dim));
  if (!(tolerance > 0.0)) throw Error("mvee: tolerance must be positive");
  weights_.reserve(capacity);
}

void MveeAccumulator::set_frame(const Vector& center, const Matrix& lower) {
  if (count_ != 0) throw Error("mvee: frame must be set before adding points");
  if (center.size() != dim_ || lower.rows() != dim_ || lower.cols() != dim_)
    throw Error("mvee: frame dimension mismatch");
  frame_center_ = center;
  frame_lower_ = lower;
}

void MveeAccumulator::add(const Eigen::Ref<const Vector>& point) {
  if (point.size() != dim_) throw Error("mvee: point dimension mismatch");
  if (count_ == capacity_) throw Error("mvee: accumulator capacity exceeded");
  if (frame_center_.size() == 0) frame_center_ = point;
  Vector local = point - frame_center_;
  if (frame_lower_.size() != 0) local = frame_lower_.triangularView<Eigen::Lower>().solve(local);
  for (int c = 0; c < dim_; ++c) coords_[static_cast<std::size_t>(c) * capacity_ + count_] = local[c];
  coords_[static_cast<std::size_t>(dim_) * capacity_ + count_] = 1.0;
  weights_.push_back(0.0);
  if (primal_valid_) certificate_.push_back(0.0);
  if (last_) {
    const Vector z = last_lower_.triangularView<Eigen::Lower>().solve(local - last_center_);
    if (z.squaredNorm() > 1.0 + tolerance_) {
      last_.reset();
      primal_valid_ = false;
    }
  }
  ++count_;
}

void MveeAccumulator::recompute() {
  const int d = dim_ + 1;
  Matrix x = Matrix::Zero(d, d);
  Vector p(d);
  for (std::size_t i = 0; i < count_; ++i) {
    const double u = weights_[i];
    if (u <= 0.0) continue;
    for (int c = 0; c < d; ++c) p[c] = coords_[static_cast<std::size_t>(c) * capacity_ + i];
    x.noalias() += u * p * p.transpose();
  }
  const Eigen::LLT<Matrix> llt(x);
  if (llt.info() != Eigen::Success) throw DegenerateCloud("mvee: weighted scatter lost rank");
  const Matrix lower = dense_lower(llt);
  for (int r = 0; r < d; ++r)
    if (!(lower(r, r) > 0.0) || !std::isfinite(lower(r, r)))
      throw DegenerateCloud("mvee: weighted scatter lost rank");
  xinv_ = llt.solve(Matrix::Identity(d, d));
  simd::whitened_sq_norms(lower.data(), d, coords_.data(), capacity_, count_, nullptr, g_.data());
}

void MveeAccumulator::local_ellipsoid(Vector& center, Matrix& shape) const {
  const int n = dim_;
  if (primal_valid_) {
    center = primal_center_;
    shape = primal_shape_;
    return;
  }
  Vector c = Vector::Zero(n);
  Matrix s = Matrix::Zero(n, n);
  Vector x(n);
  for (std::size_t i = 0; i < count_; ++i) {
    const double u = weights_[i];
    if (u <= 0.0) continue;
    for (int k = 0; k < n; ++k) x[k] = coords_[static_cast<std::size_t>(k) * capacity_ + i];
    c.noalias() += u * x;
    s.noalias() += u * x * x.transpose();
  }
  s.noalias() -= c * c.transpose();
  shape = static_cast<double>(n) * s;
  shape = 0.5 * (shape + shape.transpose()).eval();
  center = c;
}

Ellipsoid MveeAccumulator::ellipsoid() const {
  Vector c;
  Matrix shape;
  local_ellipsoid(c, shape);
  if (frame_lower_.size() != 0) {
    c = frame_lower_ * c;
    shape = frame_lower_ * shape * frame_lower_.transpose();
    shape = 0.5 * (shape + shape.transpose()).eval();
  }
  c += frame_center_;
  return Ellipsoid{std::move(c), std::move(shape)};
}

double MveeAccumulator::local_log_det() const {
  Vector c;
  Matrix shape;
  local_ellipsoid(c, shape);
  const Eigen::LLT<Matrix> llt(shape);
  if (llt.info() != Eigen::Success) throw DegenerateCloud("mvee: shape lost definiteness");
  double out = 2.0 * dense_lower(llt).diagonal().array().log().sum();
  if (frame_lower_.size() != 0) out += 2.0 * frame_lower_.diagonal().array().abs().log().sum();
  return out;
}

MveeSolution MveeAccumulator::solve() {
  const int n = dim_;
  const int d = n + 1;
  if (count_ < static_cast<std::size_t>(d))
    throw DegenerateCloud("mvee: need at least n+1 points, have " + std::to_string(count_));
  if (last_) {
    MveeSolution out = *last_;
    out.weights = Vector::Zero(static_cast<Eigen::Index>(count_));
    out.weights.head(last_->weights.size()) = last_->weights;
    out.iterations = 0;
    last_iterations_ = 0;
    return out;
  }

  // Checked on every solve: a new batch can leave a warm cloud flat when all
  // earlier points were flat too.
  Points pts(count_, n);
  for (int c = 0; c < n; ++c)
    for (std::size_t i = 0; i < count_; ++i)
      pts(static_cast<Eigen::Index>(i), c) = coords_[static_cast<std::size_t>(c) * capacity_ + i];
  if (!spans_affinely(pts, kLocalFlatnessFloor)) {
    warm_ = false;
    throw DegenerateCloud("mvee: points do not affinely span R^n");
  }
  if (!warm_) std::fill(weights_.begin(), weights_.end(), 1.0 / static_cast<double>(count_));

  recompute();
  warm_ = true;
  primal_valid_ = false;
  const int budget = kAscentBaseBudget + kAscentPerPoint * static_cast<int>(count_);

  const double inner_tol = 0.5 * tolerance_;
  const double dn = static_cast<double>(n);
  const double dd = static_cast<double>(d);
  bool fresh = true;
  int iterations = 0;
  Vector p(d);

  for (;;) {
    std::size_t jp = 0;
    std::size_t jm = count_;
    for (std::size_t i = 1; i < count_; ++i)
      if (g_[i] > g_[jp]) jp = i;
    for (std::size_t i = 0; i < count_; ++i)
      if (weights_[i] > 0.0 && (jm == count_ || g_[i] < g_[jm])) jm = i;

    const double excess = (g_[jp] - 1.0) / dn - 1.0;
    const double slack = 1.0 - (g_[jm] - 1.0) / dn;
    if (excess <= inner_tol && slack <= inner_tol) {
      if (fresh) break;
      recompute();
      fresh = true;
      continue;
    }
    if (++iterations > budget) {
      if (refine_barrier()) break;
      warm_ = false;
      throw ConvergenceFailure("mvee: barrier refinement failed");
    }
    fresh = false;

    bool forward = excess >= slack;
    std::size_t j = forward ? jp : jm;
    const double gj = g_[j];
    double beta = 0.0;
    double denom_scale = 0.0;
    double coef = 0.0;
    bool drop = false;

    if (!forward) {
      const double uj = weights_[j];
      const double cap = uj / (1.0 - uj);
      beta = gj > 1.0 ? (dd - gj) / (dd * (gj - 1.0)) : std::numeric_limits<double>::infinity();
      if (beta >= cap) {
        beta = cap;
        drop = true;
      }
      double den = (1.0 + beta) - beta * gj;
      if (den <= 1e-12 * (1.0 + beta)) {
        beta = 0.5 * cap;
        drop = false;
        den = (1.0 + beta) - beta * gj;
      }
      if (den <= 1e-12 * (1.0 + beta)) {
        forward = true;
        j = jp;
      } else {
        coef = beta / den;
        denom_scale = 1.0 + beta;
      }
    }

    for (int c = 0; c < d; ++c) p[c] = coords_[static_cast<std::size_t>(c) * capacity_ + j];

    if (forward) {
      const double gf = g_[j];
      beta = (gf - dd) / (dd * (gf - 1.0));
      const double den = (1.0 - beta) + beta * gf;
      coef = -beta / den;
      denom_scale = 1.0 - beta;
      for (std::size_t i = 0; i < count_; ++i) weights_[i] *= (1.0 - beta);
      weights_[j] += beta;
    } else {
      for (std::size_t i = 0; i < count_; ++i) weights_[i] *= (1.0 + beta);
      weights_[j] -= beta;
      if (drop || weights_[j] < 0.0) weights_[j] = 0.0;
    }

    const Vector w = xinv_ * p;
    simd::affine_dots(coords_.data(), capacity_, count_, n, w.data(), w[n], h_.data());
    xinv_ = (xinv_ + coef * w * w.transpose()) / denom_scale;
    simd::rank1_rescale(g_.data(), h_.data(), count_, coef, denom_scale);

    if (iterations % kRefreshInterval == 0) {
      recompute();
      fresh = true;
    }
  }

  last_iterations_ = iterations;
  MveeSolution out{ellipsoid(), Vector(static_cast<Eigen::Index>(count_)), local_log_det(), iterations};
  const std::vector<double>& w = primal_valid_ ? certificate_ : weights_;
  for (std::size_t i = 0; i < count_; ++i) out.weights[static_cast<Eigen::Index>(i)] = w[i];
  Matrix local_shape;
  local_ellipsoid(last_center_, local_shape);
  const Eigen::LLT<Matrix> llt(local_shape);
  if (llt.info() == Eigen::Success) {
    last_lower_ = dense_lower(llt);
    last_ = out;
  }
  return out;
}

bool MveeAccumulator::refine_barrier() {
  const int d = dim_ + 1;
  const int nv = d * (d + 1) / 2;
  const auto m = static_cast<Eigen::Index>(count_);
  Matrix q(m, d);
  for (int c = 0; c < d; ++c)
    for (std::size_t i = 0; i < count_; ++i) q(static_cast<Eigen::Index>(i), c) = coords_[static_cast<std::size_t>(c) * capacity_ + i];

  std::vector<std::pair<int, int>> basis;
  for (int a = 0; a < d; ++a)
    for (int b = a; b < d; ++b) basis.emplace_back(a, b);
  Matrix phi(m, nv);
  for (int k = 0; k < nv; ++k) {
    const auto [a, b] = basis[static_cast<std::size_t>(k)];
    phi.col(k) = q.col(a).cwiseProduct(q.col(b)) * (a == b ? 1.0 : 2.0);
  }
  auto slacks = [&](const Matrix& p, Vector& s) {
    s = Vector::Ones(m) - (q * p).cwiseProduct(q).rowwise().sum();
    return s.minCoeff() > 0.0;
  };
  auto objective = [&](const Matrix& p, const Vector& s, double t, double& value) {
    const Eigen::LLT<Matrix> llt(p);
    if (llt.info() != Eigen::Success) return false;
    value = -2.0 * t * dense_lower(llt).diagonal().array().log().sum() - s.array().log().sum();
    return std::isfinite(value);
  };

  // Feasible start from the current ascent iterate.
  double gmax = 0.0;
  for (std::size_t i = 0; i < count_; ++i) gmax = std::max(gmax, g_[i]);
  Matrix p = xinv_ / (gmax * (1.0 + 1e-3));
  p = 0.5 * (p + p.transpose()).eval();
  Vector s;
  if (!slacks(p, s)) return false;

  const double md = static_cast<double>(m);
  const double t_final = 10.0 * md / tolerance_;
  double t = std::min(t_final, 100.0 * md);
  for (int outer = 0; outer < 40; ++outer) {
    for (int inner = 0; inner < 100; ++inner) {
      const Eigen::LLT<Matrix> pl(p);
      if (pl.info() != Eigen::Success) return false;
      const Matrix b = pl.solve(Matrix::Identity(d, d));
      const Vector inv_s = s.cwiseInverse();
      Matrix grad_m = -t * b + q.transpose() * inv_s.asDiagonal() * q;
      Vector grad(nv);
      Matrix hess = phi.transpose() * inv_s.cwiseAbs2().asDiagonal() * phi;
      for (int k = 0; k < nv; ++k) {
        const auto [a, bb] = basis[static_cast<std::size_t>(k)];
        grad[k] = grad_m(a, bb) * (a == bb ? 1.0 : 2.0);
        for (int l = k; l < nv; ++l) {
          const auto [c, e] = basis[static_cast<std::size_t>(l)];
          // tr(B E_k B E_l) with E_ab = e_a e_b^T + e_b e_a^T off the diagonal.
          double v = b(bb, c) * b(e, a);
          if (a != bb) v += b(a, c) * b(e, bb);
          if (c != e) v += b(bb, e) * b(c, a);
          if (a != bb && c != e) v += b(a, e) * b(c, bb);
          hess(k, l) += t * v;
          if (l != k) hess(l, k) = hess(k, l);
        }
      }
      const Eigen::LDLT<Matrix> ldlt(hess);
      const Vector step = -ldlt.solve(grad);
      const double decrement = -grad.dot(step);
      if (!std::isfinite(decrement)) return false;
      if (decrement < 1e-14) break;
      Matrix delta = Matrix::Zero(d, d);
      for (int k = 0; k < nv; ++k) {
        const auto [a, bb] = basis[static_cast<std::size_t>(k)];
        delta(a, bb) = step[k];
        delta(bb, a) = step[k];
      }
      double f0 = 0.0;
      if (!objective(p, s, t, f0)) return false;
      double alpha = 1.0;
      Matrix trial;
      Vector ts;
      double f1 = 0.0;
      bool accepted = false;
      for (int ls = 0; ls < 60; ++ls, alpha *= 0.5) {
        trial = p + alpha * delta;
        if (!slacks(trial, ts) || !objective(trial, ts, t, f1)) continue;
        if (f1 <= f0 - 0.25 * alpha * decrement) {
          accepted = true;
          break;
        }
      }
      if (!accepted) break;
      p = trial;
      s = ts;
      if (decrement < 1e-10) break;
    }
    if (t >= t_final) break;
    t = std::min(t_final, kBarrierGrowth * t);
  }

  // Slice of the lifted ellipsoid at the affine coordinate 1.
  const int n = dim_;
  const Matrix a = p.topLeftCorner(n, n);
  const Vector bvec = p.topRightCorner(n, 1);
  const double gamma = p(n, n);
  const Eigen::LLT<Matrix> al(a);
  if (al.info() != Eigen::Success) return false;
  const Vector center = -al.solve(bvec);
  const double rho = 1.0 - gamma - bvec.dot(center);
  if (!(rho > 0.0)) return false;
  primal_center_ = center;
  primal_shape_ = rho * al.solve(Matrix::Identity(n, n));
  primal_shape_ = 0.5 * (primal_shape_ + primal_shape_.transpose()).eval();

  // Dual weights 1/(t s_i), normalized. The certificate keeps only points on
  // the boundary to within the tolerance.
  double total = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) total += 1.0 / s[i];
  certificate_.assign(count_, 0.0);
  double active_total = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto k = static_cast<std::size_t>(i);
    weights_[k] = (1.0 / s[i]) / total;
    if (s[i] / rho <= tolerance_) {
      certificate_[k] = weights_[k];
      active_total += weights_[k];
    }
  }
  if (!(active_total > 0.0)) return false;
  for (double& w : certificate_) w /= active_total;
  recompute();
  primal_valid_ = true;
  return true;
}

MveeSolution mvee_solve(const Points& points, double tolerance) {
  const auto n = static_cast<int>(points.cols());
  if (n < 1) throw DegenerateCloud("mvee: empty dimension");
  if (points.rows() < n + 1) throw DegenerateCloud("mvee: need at least n+1 points");
  if (!spans_affinely(points)) throw DegenerateCloud("mvee: points do not affinely span R^n");
  MveeAccumulator acc(n, static_cast<std::size_t>(points.rows()), tolerance);
  const auto [center, lower] = scatter_frame(points);
  acc.set_frame(center, lower);
  for (Eigen::Index i = 0; i < points.rows(); ++i) acc.add(points.row(i).transpose());
  return acc.solve();
}

Ellipsoid mvee(const Points& points, double tolerance) { return mvee_solve(points, tolerance).ellipsoid; }

double log_unit_ball_volume(int n) {
  const double half = 0.5 * static_cast<double>(n);
  return half * std::log(std::numbers::pi) - std::lgamma(half + 1.0);
}

double log_volume(const Ellipsoid& e) {
  const Eigen::LLT<Matrix> llt(e.shape);
  if (llt.info() != Eigen::Success) throw NotPositiveDefinite("log_volume: shape is not positive definite");
  const Matrix lower = dense_lower(llt);
  return log_unit_ball_volume(e.dim()) + lower.diagonal().array().log().sum();
}

double log_det_mvee(const Points& points, double tolerance) {
  const auto n = points.cols();
  if (points.rows() < 2 * n + 1)
    throw DegenerateCloud("log_det_mvee: fewer than 2n+1 points (volume taken as zero)");
  return mvee_solve(points, tolerance).log_det;
}

std::pair<Vector, Matrix> scatter_frame(const Points& points) {
  const Vector mean = points.colwise().mean();
  const Matrix centered = points.rowwise() - mean.transpose();
  const Matrix scatter = centered.transpose() * centered / static_cast<double>(std::max<Eigen::Index>(points.rows(), 1));
  const Eigen::LLT<Matrix> llt(scatter);
  if (llt.info() != Eigen::Success) throw DegenerateCloud("scatter frame is singular");
  Matrix lower = dense_lower(llt);
  for (Eigen::Index i = 0; i < lower.rows(); ++i)
    if (!(lower(i, i) > 0.0)) throw DegenerateCloud("scatter frame is singular");
  return {mean, lower};
}

Matrix whitening_factor(const Matrix& m) {
  if (m.rows() != m.cols() || m.rows() == 0) throw NotPositiveDefinite("whitening_factor: not square");
  const double scale = m.cwiseAbs().maxCoeff();
  if (!((m - m.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * scale))
    throw NotPositiveDefinite("whitening_factor: matrix is not symmetric");
  const Eigen::LLT<Matrix> llt(m);
  if (llt.info() != Eigen::Success) throw NotPositiveDefinite("whitening_factor: matrix is not positive definite");
  Matrix lower = dense_lower(llt);
  for (Eigen::Index i = 0; i < lower.rows(); ++i)
    if (!(lower(i, i) > 0.0)) throw NotPositiveDefinite("whitening_factor: zero pivot");
  return lower;
}

VfiCheck check_vfi(const Ellipsoid& e, const VfiBounds& b) {
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(e.shape, Eigen::EigenvaluesOnly);
  VfiCheck out;
  out.lambda_min = eig.eigenvalues().minCoeff();
  out.lambda_max = eig.eigenvalues().maxCoeff();
  if (out.lambda_min < b.eps_min)
    out.status = VfiStatus::below_floor;
  else if (out.lambda_max > b.lambda_max)
    out.status = VfiStatus::above_ceiling;
  return out;
}

Matrix enforce_vfi(const Matrix& shape, const VfiBounds& b) {
  b.validate();
  const Matrix sym = 0.5 * (shape + shape.transpose());
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(sym);
  Vector lambda = eig.eigenvalues();
  const double lo = lambda.minCoeff();
  if (lo < b.eps_min) lambda.array() += (b.eps_min - lo);
  bool clipped = lo < b.eps_min;
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    if (lambda[i] > b.lambda_max) {
      lambda[i] = b.lambda_max;
      clipped = true;
    }
  }
  if (!clipped) return sym;
  Matrix out = eig.eigenvectors() * lambda.asDiagonal() * eig.eigenvectors().transpose();
  return 0.5 * (out + out.transpose());
}

}  // namespace espf
