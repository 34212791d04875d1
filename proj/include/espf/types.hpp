#pragma once

#include <Eigen/Dense>

namespace espf {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// A point set with one point per row. Column-major storage keeps each
/// coordinate contiguous across points, which is the layout the batched
/// kernels consume.
using Points = Eigen::MatrixXd;

}  // namespace espf
