#pragma once

#include "espf/types.hpp"

namespace espf {

struct KalmanEstimate {
  Vector mean;
  Matrix cov;
  Vector innovation;
  Matrix innovation_cov;
};

/// One predict + update cycle of the linear Kalman filter. Throws
/// SingularInnovation when H P H^T + R is not positive definite.
KalmanEstimate kalman_oracle_step(const Vector& mean, const Matrix& cov, const Matrix& f, const Matrix& h,
                                  const Matrix& q, const Matrix& r, const Vector& y);

}  // namespace espf
