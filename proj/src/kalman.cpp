#include "espf/kalman.hpp"

#include "espf/errors.hpp"

namespace espf {

KalmanEstimate kalman_oracle_step(const Vector& mean, const Matrix& cov, const Matrix& f, const Matrix& h,
                                  const Matrix& q, const Matrix& r, const Vector& y) {
  const auto n = mean.size();
  if (cov.rows() != n || f.rows() != n || f.cols() != n || q.rows() != n || h.cols() != n || r.rows() != h.rows() ||
      y.size() != h.rows())
    throw Error("kalman_oracle_step: dimension mismatch");
  const Vector m_pred = f * mean;
  Matrix p_pred = f * cov * f.transpose() + q;
  p_pred = 0.5 * (p_pred + p_pred.transpose()).eval();

  KalmanEstimate out;
  out.innovation = y - h * m_pred;
  out.innovation_cov = h * p_pred * h.transpose() + r;
  const Eigen::LLT<Matrix> llt(out.innovation_cov);
  if (llt.info() != Eigen::Success) throw SingularInnovation("kalman_oracle_step: innovation covariance is singular");
  const Matrix gain = llt.solve(h * p_pred).transpose();
  out.mean = m_pred + gain * out.innovation;
  // Joseph form keeps the covariance symmetric positive semidefinite.
  const Matrix i_kh = Matrix::Identity(n, n) - gain * h;
  out.cov = i_kh * p_pred * i_kh.transpose() + gain * r * gain.transpose();
  out.cov = 0.5 * (out.cov + out.cov.transpose()).eval();
  return out;
}

}  // namespace espf
