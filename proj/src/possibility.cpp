#include "espf/possibility.hpp"

#include <cmath>

#include "espf/errors.hpp"
#include "espf/simd.hpp"

namespace espf {

SupportCloud::SupportCloud(Points points, Vector poss, double epoch)
    : points_(std::move(points)), poss_(std::move(poss)), epoch_(epoch) {
  if (poss_.size() != points_.rows()) throw Error("SupportCloud: possibility count does not match point count");
  for (Eigen::Index i = 0; i < poss_.size(); ++i)
    if (!(poss_[i] > 0.0 && poss_[i] <= 1.0))
      throw Error("SupportCloud: possibility values must lie in (0, 1]");
}

SupportCloud SupportCloud::uniform(Points points, double epoch) {
  Vector ones = Vector::Ones(points.rows());
  return SupportCloud(std::move(points), std::move(ones), epoch);
}

bool SupportCloud::is_normalized() const noexcept { return poss_.size() > 0 && poss_.maxCoeff() == 1.0; }

SupportCloud SupportCloud::with_points(Points points) const { return SupportCloud(std::move(points), poss_, epoch_); }

SupportCloud SupportCloud::with_epoch(double epoch) const { return SupportCloud(points_, poss_, epoch); }

SupportCloud SupportCloud::subset(const std::vector<std::size_t>& indices) const {
  Points pts(static_cast<Eigen::Index>(indices.size()), points_.cols());
  Vector poss(static_cast<Eigen::Index>(indices.size()));
  for (std::size_t k = 0; k < indices.size(); ++k) {
    const auto i = static_cast<Eigen::Index>(indices[k]);
    pts.row(static_cast<Eigen::Index>(k)) = points_.row(i);
    poss[static_cast<Eigen::Index>(k)] = poss_[i];
  }
  return SupportCloud(std::move(pts), std::move(poss), epoch_);
}

AlphaCut alpha_cut(const SupportCloud& c, double level) {
  if (!(level > 0.0 && level <= 1.0)) throw Error("alpha_cut: level must lie in (0, 1]");
  AlphaCut cut{level, {}};
  for (std::size_t i = 0; i < c.size(); ++i)
    if (c.poss()[static_cast<Eigen::Index>(i)] >= level) cut.members.push_back(i);
  return cut;
}

Vector max_normalize(const Vector& values) {
  if (values.size() == 0) throw AllZero("max_normalize: empty distribution");
  const double hi = values.maxCoeff();
  if (!(hi > 0.0) || !std::isfinite(hi)) throw AllZero("max_normalize: maximum possibility underflowed to zero");
  return values / hi;
}

ConjunctiveResult conjunctive_update(const SupportCloud& c, const Vector& comp) {
  if (comp.size() != static_cast<Eigen::Index>(c.size()))
    throw Error("conjunctive_update: compatibility count does not match cloud size");
  Vector raw = c.poss().cwiseMin(comp);
  Vector normalized = max_normalize(raw).cwiseMax(kPossibilityFloor);
  return {std::move(raw), SupportCloud(c.points(), std::move(normalized), c.epoch())};
}

double GaussianKernel::operator()(const Eigen::Ref<const Vector>& a, const Eigen::Ref<const Vector>& b) const {
  const Vector z = lower.triangularView<Eigen::Lower>().solve(a - b);
  return std::exp(-0.5 * z.squaredNorm());
}

Vector kernel_extend(const SupportCloud& survivors, const Points& new_points, const GaussianKernel& kernel) {
  if (survivors.size() == 0) throw Error("kernel_extend: no survivors");
  if (new_points.cols() != survivors.dim() || kernel.lower.rows() != survivors.dim())
    throw Error("kernel_extend: dimension mismatch");
  const Points& surv = survivors.points();
  const auto m = static_cast<std::size_t>(surv.rows());
  Vector sq(static_cast<Eigen::Index>(m));
  Vector out(new_points.rows());
  Vector x(new_points.cols());
  for (Eigen::Index k = 0; k < new_points.rows(); ++k) {
    x = new_points.row(k).transpose();
    simd::whitened_sq_norms(kernel.lower.data(), survivors.dim(), surv.data(), m, m, x.data(), sq.data());
    double best = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      const auto jj = static_cast<Eigen::Index>(j);
      const double v = std::min(survivors.poss()[jj], std::exp(-0.5 * sq[jj]));
      if (v > best) best = v;
    }
    out[k] = best;
  }
  return out;
}

Vector kernel_extend(const SupportCloud& survivors, const Points& new_points, const ProximityFn& kernel) {
  if (survivors.size() == 0) throw Error("kernel_extend: no survivors");
  Vector out(new_points.rows());
  for (Eigen::Index k = 0; k < new_points.rows(); ++k) {
    double best = 0.0;
    for (Eigen::Index j = 0; j < survivors.points().rows(); ++j) {
      const double kappa = kernel(new_points.row(k).transpose(), survivors.points().row(j).transpose());
      best = std::max(best, std::min(survivors.poss()[j], kappa));
    }
    out[k] = best;
  }
  return out;
}

std::size_t anchor(const SupportCloud& c) {
  if (c.size() == 0) throw Error("anchor: empty cloud");
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < c.poss().size(); ++i)
    if (c.poss()[i] > c.poss()[best]) best = i;
  return static_cast<std::size_t>(best);
}

}  // namespace espf
